import math
import pickle

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from slidingdg.errors import InvalidStateError, SolverAbort
from slidingdg.physics import (
    ConservedState,
    DensityWaveParams,
    FreestreamParams,
    GasModel,
    GridVelocity,
    VortexParams,
    ale_convective_flux,
    eos_pressure,
    roe_flux,
    viscous_flux,
)
from slidingdg.physics.fluxes import ale_normal_flux
from slidingdg.physics.gas import conserved, is_physical, primitive
from slidingdg.physics.riemann import _harten_hyman

densities = st.floats(min_value=0.1, max_value=10.0)
velocities = st.floats(min_value=-3.0, max_value=3.0)
pressures = st.floats(min_value=0.1, max_value=10.0)
angles = st.floats(min_value=0.0, max_value=2.0 * math.pi)


def test_ale_flux_of_a_moving_grid(gas):
    state = ConservedState.from_primitive(1.0, 2.0, 0.0, 1.0, gas)
    f1, f2 = ale_convective_flux(state, GridVelocity(vg1=1.0, vg2=0.0), gas)
    np.testing.assert_allclose(f1, [1.0, 3.0, 0.0, 6.5], atol=1e-14)
    np.testing.assert_allclose(f2, [0.0, 0.0, 1.0, 0.0], atol=1e-14)


def test_ale_flux_rejects_nonphysical_state(gas):
    with pytest.raises(InvalidStateError, match="Nonpositive pressure"):
        ale_convective_flux(np.array([1.0, 0.0, 0.0, -1.0]), (0.0, 0.0), gas)


def test_state_validation(gas):
    with pytest.raises(InvalidStateError):
        ConservedState.from_primitive(1.0, 0.0, 0.0, -0.5, gas)
    with pytest.raises(InvalidStateError, match="Nonpositive density"):
        eos_pressure(np.array([[1.0, 0.0, 0.0, 2.5], [-1.0, 0.0, 0.0, 2.5]]), gas)
    mask = is_physical(np.array([[1.0, 0.0, 0.0, 2.5], [1.0, 0.0, 0.0, -1.0], [np.nan, 0, 0, 1]]), gas)
    assert mask.tolist() == [True, False, False]


def test_eos_pressure_of_single_state(gas):
    state = ConservedState.from_primitive(1.2, 0.5, -0.3, 0.8, gas)
    assert abs(eos_pressure(state, gas) - 0.8) < 1e-14


@given(densities, velocities, velocities, pressures)
def test_primitive_round_trip(rho, v1, v2, p):
    gas = GasModel()
    u = conserved(rho, v1, v2, p, gas)
    back = primitive(u, gas)
    np.testing.assert_allclose(back, (rho, v1, v2, p), rtol=1e-12, atol=1e-12)


@given(densities, velocities, velocities, pressures, angles, velocities)
def test_roe_flux_is_consistent(rho, v1, v2, p, angle, vg_normal):
    gas = GasModel()
    u = conserved(rho, v1, v2, p, gas)
    normal = np.array([math.cos(angle), math.sin(angle)])
    flux = roe_flux(u, u, normal, vg_normal, gas)
    np.testing.assert_allclose(flux, ale_normal_flux(u, normal, vg_normal, gas), rtol=1e-12, atol=1e-12)


def test_roe_flux_resolves_stationary_contact(gas):
    left = ConservedState.from_primitive(1.0, 0.0, 0.0, 1.0, gas)
    right = ConservedState.from_primitive(0.125, 0.0, 0.0, 1.0, gas)
    flux = roe_flux(left, right, (1.0, 0.0), 0.0, gas)
    np.testing.assert_allclose(flux, [0.0, 1.0, 0.0, 0.0], atol=1e-14)


def test_roe_flux_resolves_contact_moving_with_the_grid(gas):
    left = ConservedState.from_primitive(1.0, 1.0, 0.0, 1.0, gas)
    right = ConservedState.from_primitive(0.125, 1.0, 0.0, 1.0, gas)
    flux = roe_flux(left, right, (1.0, 0.0), 1.0, gas)
    np.testing.assert_allclose(flux, [0.0, 1.0, 0.0, 1.0], atol=1e-13)


@given(
    densities,
    velocities,
    velocities,
    pressures,
    densities,
    velocities,
    velocities,
    pressures,
    angles,
    velocities,
)
def test_roe_flux_is_antisymmetric_in_the_normal(rho_l, v1_l, v2_l, p_l, rho_r, v1_r, v2_r, p_r, angle, vg_normal):
    gas = GasModel()
    left = conserved(rho_l, v1_l, v2_l, p_l, gas)
    right = conserved(rho_r, v1_r, v2_r, p_r, gas)
    normal = np.array([math.cos(angle), math.sin(angle)])
    forward = roe_flux(left, right, normal, vg_normal, gas)
    backward = roe_flux(right, left, -normal, -vg_normal, gas)
    np.testing.assert_allclose(forward, -backward, rtol=1e-11, atol=1e-11)


@given(densities, velocities, velocities, pressures, velocities, velocities)
def test_ale_flux_subtracts_the_grid_velocity(rho, v1, v2, p, vg1, vg2):
    gas = GasModel()
    u = conserved(rho, v1, v2, p, gas)
    f1, f2 = ale_convective_flux(u, (vg1, vg2), gas)
    e1, e2 = ale_convective_flux(u, (0.0, 0.0), gas)
    np.testing.assert_allclose(f1, e1 - vg1 * u, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(f2, e2 - vg2 * u, rtol=1e-13, atol=1e-13)
    normal = np.array([0.6, -0.8])
    np.testing.assert_allclose(
        ale_normal_flux(u, normal, 0.6 * vg1 - 0.8 * vg2, gas),
        normal[0] * f1 + normal[1] * f2,
        rtol=1e-12,
        atol=1e-12,
    )


def test_roe_flux_rejects_invalid_states(gas):
    good = conserved(1.0, 0.0, 0.0, 1.0, gas)
    bad = np.array([1.0, 0.0, 0.0, -1.0])
    with pytest.raises(InvalidStateError, match="Invalid right state"):
        roe_flux(good, bad, (1.0, 0.0), 0.0, gas)


def test_harten_hyman_fix():
    # transonic: |lambda| is smoothed over the spread of the wave speeds
    assert _harten_hyman(np.array(0.0), np.array(-1.0), np.array(1.0)) == pytest.approx(0.5)
    assert _harten_hyman(np.array(2.0), np.array(1.5), np.array(2.5)) == pytest.approx(2.0)
    assert _harten_hyman(np.array(-0.5), np.array(-0.5), np.array(-0.5)) == pytest.approx(0.5)


def test_viscous_flux_of_simple_shear():
    gas = GasModel(mu=0.01, Pr=0.72)
    state = conserved(1.0, 0.0, 0.0, 1.0, gas)
    grad = np.zeros((2, 4))
    grad[1, 1] = 1.0
    grad[0, 3] = 2.0
    g1, g2 = viscous_flux(state, grad, gas)
    np.testing.assert_allclose(g1, [0.0, 0.0, 0.01, gas.k * 2.0], atol=1e-15)
    np.testing.assert_allclose(g2, [0.0, 0.01, 0.0, 0.0], atol=1e-15)
    assert gas.k == pytest.approx(1.4 * 0.01 / (0.4 * 0.72))
    assert gas.lam == pytest.approx(-2.0 / 3.0 * 0.01)


@given(densities, velocities, velocities, pressures, st.integers(0, 2**16), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_viscous_flux_is_linear_in_the_gradient(rho, v1, v2, p, seed, a, b):
    gas = GasModel(mu=0.01)
    u = conserved(rho, v1, v2, p, gas)
    gen = np.random.default_rng(seed)
    grad_a = gen.uniform(-1.0, 1.0, (2, 4))
    grad_b = gen.uniform(-1.0, 1.0, (2, 4))
    combined = viscous_flux(u, a * grad_a + b * grad_b, gas)
    for column, fa, fb in zip(combined, viscous_flux(u, grad_a, gas), viscous_flux(u, grad_b, gas), strict=True):
        np.testing.assert_allclose(column, a * fa + b * fb, rtol=1e-12, atol=1e-13)


def test_viscous_flux_of_pure_dilatation():
    gas = GasModel(mu=0.02, Pr=0.72)
    v1, v2, rate, dt_dx1 = 0.5, -0.25, 3.0, 0.4
    state = conserved(1.2, v1, v2, 1.0, gas)
    grad = np.zeros((2, 4))
    grad[0, 1] = rate
    grad[0, 3] = dt_dx1
    g1, g2 = viscous_flux(state, grad, gas)
    normal_stress = 4.0 / 3.0 * gas.mu * rate
    bulk_stress = gas.lam * rate
    assert g1[1] == pytest.approx(normal_stress, rel=1e-13)
    assert g1[2] == pytest.approx(0.0, abs=1e-15)
    assert g2[2] == pytest.approx(-2.0 / 3.0 * gas.mu * rate, rel=1e-13)
    assert g2[2] == pytest.approx(bulk_stress, rel=1e-13)
    assert g1[3] == pytest.approx(normal_stress * v1 + gas.k * dt_dx1, rel=1e-13)
    assert g2[3] == pytest.approx(bulk_stress * v2, rel=1e-13)


def test_vortex_center_density():
    params = VortexParams(eps=1.0, Ma_inf=0.3)
    u = params.state(np.array([0.0, 0.0]), 0.0)
    assert u[0] == pytest.approx(0.99690, abs=5e-6)
    far = params.state(np.array([40.0, 40.0]), 0.0)
    np.testing.assert_allclose(far, conserved(1.0, 1.0, 0.0, params.p_inf, GasModel()), atol=1e-12)


def test_vortex_is_advected_and_periodic():
    params = VortexParams(eps=5.0, Ma_inf=0.5, theta=math.atan2(1.0, 2.0), period=(20.0, 20.0))
    x = np.array([[0.3, -0.2], [1.5, 2.0]])
    direction = np.array([math.cos(params.theta), math.sin(params.theta)])
    np.testing.assert_allclose(params.state(x + 2.0 * direction, 2.0), params.state(x, 0.0), atol=1e-12)
    np.testing.assert_allclose(params.state(x + [20.0, -20.0], 0.0), params.state(x, 0.0), atol=1e-12)


def test_density_wave():
    params = DensityWaveParams(alpha=0.1, advect_velocity=(1.0, 1.0), p0=1.0)
    x = np.array([[0.25, 0.0], [0.1, 0.7]])
    u = params.state(x, 0.0)
    assert u[0, 0] == pytest.approx(2.0 + 0.1 * math.sin(math.pi * 0.25))
    np.testing.assert_allclose(params.state(x + 0.3, 0.3), u, atol=1e-13)
    assert params.source(x, 0.0, GasModel()) is None
    source = params.source(x, 0.0, GasModel(mu=0.01))
    assert np.all(source[..., :3] == 0.0)
    with pytest.raises(ValueError):
        DensityWaveParams(alpha=1.0)


def test_freestream_pressure_from_mach():
    params = FreestreamParams(v_inf=0.3, Ma_inf=0.3, theta=math.atan2(1.0, 2.0))
    assert params.p_inf == pytest.approx(1.0 / 1.4)
    u = params.state(np.zeros((3, 2)), 0.0)
    assert u.shape == (3, 4)
    assert np.hypot(u[0, 1], u[0, 2]) == pytest.approx(0.3)


def test_errors_survive_pickling():
    abort = pickle.loads(pickle.dumps(SolverAbort("negative pressure", rank=1, step=7, stage=2, element=40)))
    assert (abort.rank, abort.step, abort.stage, abort.element) == (1, 7, 2, 40)
    assert "step=7" in str(abort)
    state_error = pickle.loads(pickle.dumps(InvalidStateError("bad", values={"p": -1.0})))
    assert state_error.values == {"p": -1.0}


def _sample_at_interface(left, right, gamma):
    """Exact Riemann solution at x/t = 0 for a star region moving right."""
    (rho_l, u_l, p_l), (rho_r, u_r, p_r) = left, right
    c_l = math.sqrt(gamma * p_l / rho_l)
    c_r = math.sqrt(gamma * p_r / rho_r)

    def wave(p, rho, p_k, c):
        if p > p_k:
            a = 2.0 / ((gamma + 1.0) * rho)
            b = (gamma - 1.0) / (gamma + 1.0) * p_k
            return (p - p_k) * math.sqrt(a / (p + b))
        return 2.0 * c / (gamma - 1.0) * ((p / p_k) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)

    p_star = brentq(lambda p: wave(p, rho_l, p_l, c_l) + wave(p, rho_r, p_r, c_r) + u_r - u_l, 1e-8, 10.0)
    u_star = 0.5 * (u_l + u_r) + 0.5 * (wave(p_star, rho_r, p_r, c_r) - wave(p_star, rho_l, p_l, c_l))
    assert u_star > 0.0 and p_star < p_l
    head = u_l - c_l
    tail = u_star - c_l * (p_star / p_l) ** ((gamma - 1.0) / (2.0 * gamma))
    if head >= 0.0:
        return rho_l, u_l, p_l
    if tail <= 0.0:
        return rho_l * (p_star / p_l) ** (1.0 / gamma), u_star, p_star
    ratio = 2.0 / (gamma + 1.0) + (gamma - 1.0) / ((gamma + 1.0) * c_l) * u_l
    rho = rho_l * ratio ** (2.0 / (gamma - 1.0))
    velocity = 2.0 / (gamma + 1.0) * (c_l + 0.5 * (gamma - 1.0) * u_l)
    return rho, velocity, p_l * ratio ** (2.0 * gamma / (gamma - 1.0))


def test_roe_flux_against_exact_riemann_solution(gas):
    left, right = (1.0, 0.0, 1.0), (0.125, 0.0, 0.1)
    rho, v, p = _sample_at_interface(left, right, gas.gamma)
    exact = ale_normal_flux(conserved(rho, v, 0.0, p, gas), np.array([1.0, 0.0]), 0.0, gas)
    flux = roe_flux(conserved(*left[:2], 0.0, left[2], gas), conserved(*right[:2], 0.0, right[2], gas), (1.0, 0.0), 0.0, gas)
    assert flux[0] == pytest.approx(exact[0], rel=0.05)
    assert flux[1] == pytest.approx(exact[1], rel=0.2)
    assert flux[2] == pytest.approx(0.0, abs=1e-14)
    assert flux[3] == pytest.approx(exact[3], rel=0.2)
