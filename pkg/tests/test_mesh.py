import logging

import numpy as np
import pytest

from slidingdg.basis import build_node_set
from slidingdg.errors import ConfigurationError
from slidingdg.mesh import (
    SIDE_XI_MINUS,
    SIDE_XI_PLUS,
    BandSpec,
    BoundaryKind,
    MeshSpec,
    advance_displacement,
    build_mesh,
    sigma_from_displacement,
)
from slidingdg.parallel import assign_ranks
from tests.helpers import three_band_spec


def test_three_band_layout(sliding_mesh):
    mesh = sliding_mesh
    assert mesh.n_elements == 36
    assert [sub.element_offset for sub in mesh.subdomains] == [0, 12, 24]
    assert [sub.moving for sub in mesh.subdomains] == [False, True, False]
    assert mesh.subdomains[1].element(row=2, col=1) == 12 + 2 * 2 + 1
    assert mesh.faces.size == 60
    assert mesh.boundary.size == 0
    np.testing.assert_allclose(mesh.metrics.jac, 1.0 / 36.0)
    np.testing.assert_allclose(mesh.metrics.h, 1.0 / 3.0)


def test_sliding_interfaces(sliding_mesh):
    first, second = sliding_mesh.interfaces
    assert (first.static_band, first.moving_band) == (0, 1)
    assert (first.static_side, first.moving_side) == (SIDE_XI_PLUS, SIDE_XI_MINUS)
    assert (second.static_band, second.moving_band) == (2, 1)
    assert (second.static_side, second.moving_side) == (SIDE_XI_MINUS, SIDE_XI_PLUS)
    assert first.n_faces_par == 6
    assert first.l_par == pytest.approx(1.0 / 3.0)
    assert first.x1 == pytest.approx(2.0 / 3.0)
    assert second.x1 == pytest.approx(4.0 / 3.0)
    assert first.velocity == 1.0
    np.testing.assert_array_equal(first.static_elements, [1, 3, 5, 7, 9, 11])
    np.testing.assert_array_equal(first.moving_elements, [12, 14, 16, 18, 20, 22])
    np.testing.assert_array_equal(second.static_elements, [24, 26, 28, 30, 32, 34])
    np.testing.assert_array_equal(first.normal, [1.0, 0.0])
    np.testing.assert_array_equal(second.normal, [-1.0, 0.0])


def test_conforming_mesh_has_no_interfaces():
    mesh = build_mesh(three_band_spec(velocity=0.0))
    assert mesh.interfaces == []
    assert mesh.faces.size == 72
    np.testing.assert_array_equal(mesh.faces.vg_normal, 0.0)


def test_dirichlet_boundaries():
    spec = MeshSpec(
        height=1.0,
        bands=[BandSpec(width=1.0, cols=3, rows=2)],
        x1_boundary=BoundaryKind.DIRICHLET,
        x2_boundary=BoundaryKind.DIRICHLET,
    )
    mesh = build_mesh(spec)
    assert mesh.boundary.size == 2 * 2 + 2 * 3
    assert mesh.faces.size == 2 * 2 + 3 * 1


def test_node_coordinates_follow_the_grid(sliding_mesh):
    nodeset = build_node_set(3)
    x0 = sliding_mesh.node_coordinates(nodeset, 0.0)
    x1 = sliding_mesh.node_coordinates(nodeset, 0.5)
    assert x0.shape == (36, 4, 4, 2)
    np.testing.assert_allclose(x0[0, 0, 0], [0.0, 0.0])
    np.testing.assert_allclose(x0[0, -1, -1], [1.0 / 3.0, 1.0 / 3.0])
    np.testing.assert_allclose(x1[12:24] - x0[12:24], np.broadcast_to([0.0, 0.5], x0[12:24].shape))
    np.testing.assert_array_equal(x1[:12], x0[:12])


def test_mismatched_interface_spacing_is_rejected():
    spec = MeshSpec(height=1.0, bands=[BandSpec(width=1.0, cols=2, rows=4), BandSpec(width=1.0, cols=2, rows=5)])
    with pytest.raises(ConfigurationError, match="Mismatched interface spacing"):
        build_mesh(spec)


def test_normal_motion_is_rejected():
    spec = MeshSpec(
        height=1.0,
        bands=[BandSpec(width=1.0, cols=2, rows=4), BandSpec(width=1.0, cols=2, rows=4, velocity=(0.5, 1.0))],
    )
    with pytest.raises(ConfigurationError, match="vg1 = 0"):
        build_mesh(spec)


def test_motion_needs_periodic_x2():
    spec = three_band_spec().model_copy(update={"x2_boundary": BoundaryKind.DIRICHLET})
    with pytest.raises(ConfigurationError, match="periodic x2"):
        build_mesh(spec)


def test_refined_spec():
    spec = three_band_spec().refined(2)
    assert [band.rows for band in spec.bands] == [12, 12, 12]
    assert spec.n_elements == 144
    assert spec.width == pytest.approx(2.0)


def test_advance_displacement(sliding_mesh):
    iface = sliding_mesh.interfaces[0]
    first = advance_displacement(iface, 0.25)
    assert not first.changed
    assert first.n_delta == 0
    assert first.s_delta == pytest.approx(0.75)
    second = advance_displacement(iface, 0.25)
    assert second.changed
    assert second.n_delta == 1
    assert second.s_delta == pytest.approx(0.5)
    assert second.delta == pytest.approx(0.5)
    with pytest.raises(ConfigurationError, match="nonnegative"):
        advance_displacement(iface, -0.1)


def test_displacement_wraps_around_the_interface(sliding_mesh):
    iface = sliding_mesh.interfaces[0]
    iface.set_displacement(7.25 * iface.l_par)
    assert iface.n_total == 7
    assert iface.n_delta == 1
    assert iface.s_delta == pytest.approx(0.25)
    n_total, s_delta = iface.stage_displacement(0.3)
    assert n_total == 8
    assert s_delta == pytest.approx(0.15)
    assert iface.n_total == 7


def test_sigma_from_displacement():
    assert sigma_from_displacement(0.0) == -1.0
    assert sigma_from_displacement(0.5) == 0.0
    with pytest.raises(ValueError):
        sigma_from_displacement(1.0)


class _Collect(logging.Handler):
    def __init__(self):
        super().__init__(logging.INFO)
        self.messages: list[str] = []

    def emit(self, record):
        self.messages.append(record.getMessage())


def test_setup_summaries_are_logged_at_info():
    root = logging.getLogger("slidingdg")
    handler = _Collect()
    previous = root.level
    root.addHandler(handler)
    root.setLevel(logging.INFO)
    try:
        mesh = build_mesh(three_band_spec())
        assign_ranks(mesh, 3)
    finally:
        root.removeHandler(handler)
        root.setLevel(previous)
    assert any(m.startswith("Mesh built: 36 elements") for m in handler.messages)
    assert any(m.startswith("Assigned 36 elements to 3 ranks") for m in handler.messages)
