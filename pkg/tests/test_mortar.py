import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slidingdg.basis import NodeKind, build_node_set
from slidingdg.errors import ConfigurationError
from slidingdg.mortar import (
    MortarIndex,
    MortarSide,
    build_mortar_operators,
    moving_index,
    project_flux_to_face,
    static_index,
    sub_index,
    transfer_solution_to_mortars,
)

sigmas = st.floats(min_value=-1.0, max_value=0.999)
degrees = st.integers(min_value=1, max_value=8)


def _polynomial(degree: int) -> np.ndarray:
    return np.linspace(0.5, -0.7, degree + 1)


def _face_lines(nodeset, coefficients):
    values = np.polynomial.polynomial.polyval(nodeset.nodes, coefficients)
    # two lines with two variables each
    lines = np.stack([values, 2.0 * values], axis=-1)
    return np.stack([lines, -lines])


@given(degrees, sigmas)
def test_static_transfer_is_exact_for_polynomials(degree, sigma):
    nodeset = build_node_set(degree, NodeKind.LOBATTO)
    coefficients = _polynomial(degree)
    ops = build_mortar_operators(nodeset, sigma)
    sub0, sub1 = transfer_solution_to_mortars(_face_lines(nodeset, coefficients), ops, "static")
    z = nodeset.nodes
    expected0 = np.polynomial.polynomial.polyval(-1.0 + 0.5 * (z + 1.0) * (1.0 + sigma), coefficients)
    expected1 = np.polynomial.polynomial.polyval(sigma + 0.5 * (z + 1.0) * (1.0 - sigma), coefficients)
    np.testing.assert_allclose(sub0[0, :, 0], expected0, atol=1e-11)
    np.testing.assert_allclose(sub1[0, :, 0], expected1, atol=1e-11)
    np.testing.assert_allclose(sub1[1, :, 1], -2.0 * expected1, atol=1e-11)


@given(degrees, sigmas)
def test_moving_transfer_sees_the_mirrored_hanging_node(degree, sigma):
    nodeset = build_node_set(degree, NodeKind.LOBATTO)
    coefficients = _polynomial(degree)
    ops = build_mortar_operators(nodeset, sigma)
    sub0, sub1 = transfer_solution_to_mortars(_face_lines(nodeset, coefficients), ops, MortarSide.MOVING)
    z = nodeset.nodes
    expected0 = np.polynomial.polynomial.polyval(1.0 - 0.5 * (1.0 - z) * (1.0 + sigma), coefficients)
    expected1 = np.polynomial.polynomial.polyval(-sigma - 0.5 * (1.0 - z) * (1.0 - sigma), coefficients)
    np.testing.assert_allclose(sub0[0, :, 0], expected0, atol=1e-11)
    np.testing.assert_allclose(sub1[0, :, 0], expected1, atol=1e-11)


@pytest.mark.parametrize("side", [MortarSide.STATIC, MortarSide.MOVING])
@given(degree=degrees, sigma=sigmas)
def test_round_trip_reproduces_polynomials(side, degree, sigma):
    nodeset = build_node_set(degree, NodeKind.LOBATTO)
    face = _face_lines(nodeset, _polynomial(degree))
    ops = build_mortar_operators(nodeset, sigma)
    back = project_flux_to_face(transfer_solution_to_mortars(face, ops, side), ops, side)
    np.testing.assert_allclose(back, face, atol=1e-10)


@pytest.mark.parametrize("kind", [NodeKind.LOBATTO, NodeKind.GAUSS])
@given(sigma=sigmas)
def test_back_projection_conserves_the_integral(kind, sigma):
    nodeset = build_node_set(4, kind)
    rng = np.random.default_rng(7)
    sub0 = rng.normal(size=(3, 5))
    sub1 = rng.normal(size=(3, 5))
    ops = build_mortar_operators(nodeset, sigma)
    face = project_flux_to_face((sub0, sub1), ops, "static")
    w = nodeset.weights
    expected = ops.weight_m2 * (sub0 @ w) + ops.weight_m1 * (sub1 @ w)
    np.testing.assert_allclose(face @ w, expected, atol=1e-12)


def test_mortar_weights():
    ops = build_mortar_operators(build_node_set(3), -0.5)
    assert ops.weight_m2 == pytest.approx(0.25)
    assert ops.weight_m1 == pytest.approx(0.75)


def test_operators_are_cached():
    nodeset = build_node_set(3)
    assert build_mortar_operators(nodeset, 0.25) is build_mortar_operators(nodeset, 0.25)
    with pytest.raises(ValueError):
        build_mortar_operators(nodeset, 0.25).p_face_to_m1[0, 0] = 1.0


@pytest.mark.parametrize("sigma", [1.0, -1.5])
def test_hanging_node_outside_the_face(sigma):
    with pytest.raises(ConfigurationError, match="Hanging node"):
        build_mortar_operators(build_node_set(3), sigma)


@given(
    n_faces=st.integers(min_value=1, max_value=40),
    i_par=st.integers(min_value=0, max_value=39),
    n_delta=st.integers(min_value=0, max_value=39),
    i_sub=st.integers(min_value=0, max_value=1),
)
def test_static_index_inverts_moving_index(n_faces, i_par, n_delta, i_sub):
    i_par %= n_faces
    n_delta %= n_faces
    i_moving = moving_index(i_par, n_delta, i_sub, n_faces)
    assert 0 <= i_moving < n_faces
    assert static_index(i_moving, n_delta, i_sub, n_faces) == i_par
    assert MortarIndex(i_par, 0, i_sub).moving(n_delta, n_faces) == i_moving


@given(
    i_par=st.integers(min_value=0, max_value=11),
    n_delta=st.integers(min_value=0, max_value=11),
    s_delta=st.floats(min_value=0.01, max_value=0.99),
)
def test_moving_face_covers_its_mortar(i_par, n_delta, s_delta):
    n_faces = 12
    # mortars of static face i_par in face-length units: [i, i+s] and [i+s, i+1]
    spans = [(i_par, i_par + s_delta), (i_par + s_delta, i_par + 1.0)]
    for i_sub, (start, stop) in enumerate(spans):
        i_moving = moving_index(i_par, n_delta, i_sub, n_faces)
        # the moving face spans [i_moving + n_delta + s, ... + 1] modulo the period
        offset = (i_par - i_moving - n_delta) % n_faces + (start - i_par) - s_delta
        assert offset >= -1e-12
        assert offset + (stop - start) <= 1.0 + 1e-12


def test_sub_index():
    assert sub_index(0.0, 0.3, 1.0) == 0
    assert sub_index(0.29, 0.3, 1.0) == 0
    assert sub_index(0.3, 0.3, 1.0) == 1
    assert sub_index(0.5, 0.0, 1.0) == 1
