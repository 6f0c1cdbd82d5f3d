"""Preset test cases on the three-band sliding mesh."""

import math

from slidingdg.driver.config import RunConfig, validate_config
from slidingdg.mesh import BandSpec, BoundaryKind, MeshSpec
from slidingdg.physics import DensityWaveParams, ExactSolution, FreestreamParams, VortexParams


def build_solution(config: RunConfig) -> ExactSolution:
    """Case parameters of a config, periodic images enabled on fully periodic meshes."""
    mesh = config.mesh
    if mesh.x1_boundary is BoundaryKind.PERIODIC and mesh.x2_boundary is BoundaryKind.PERIODIC:
        return config.case.model_copy(update={"period": (mesh.width, mesh.height)})
    return config.case


def three_bands(
    x0: float,
    y0: float,
    size: float,
    cols: int,
    rows: int,
    middle_velocity: tuple[float, float],
) -> MeshSpec:
    """
    Square domain split into three equal vertical bands, the middle one moving.

    Args:
        x0 (float): Left edge.
        y0 (float): Bottom edge.
        size (float): Side length of the square.
        cols (int): Elements per band along x1.
        rows (int): Elements along x2.
        middle_velocity (tuple[float, float]): Grid velocity of the middle band.

    Returns:
        MeshSpec: Periodic three-band mesh.
    """
    width = size / 3.0
    bands = [
        BandSpec(width=width, cols=cols, rows=rows),
        BandSpec(width=width, cols=cols, rows=rows, velocity=middle_velocity),
        BandSpec(width=width, cols=cols, rows=rows),
    ]
    return MeshSpec(x0=x0, y0=y0, height=size, bands=bands)


def freestream_config(**overrides) -> RunConfig:
    """Uniform flow through a middle band that slides four face lengths in 200 steps."""
    values = {
        "name": "freestream",
        "case": FreestreamParams(v_inf=0.3, Ma_inf=0.3, theta=math.atan2(1.0, 2.0)),
        "mesh": three_bands(0.0, 0.0, 3.0, 3, 6, (0.0, 1.0)),
        "degree": 4,
        "dt": 0.01,
        "n_steps": 200,
    }
    values.update(overrides)
    return validate_config(values)


def density_wave_config(**overrides) -> RunConfig:
    """Oblique density wave on [0, 2]^2; level 1 has 6 x 6 elements."""
    values = {
        "name": "density_wave",
        "case": DensityWaveParams(alpha=0.1, advect_velocity=(1.0, 1.0), p0=1.0),
        "mesh": three_bands(0.0, 0.0, 2.0, 2, 6, (0.0, 1.0)),
        "degree": 3,
        "cfl": 0.1,
        "t_end": 0.5,
        "levels": (1, 2, 4),
    }
    values.update(overrides)
    return validate_config(values)


def vortex_config(**overrides) -> RunConfig:
    """
    Isentropic vortex starting in the left band of [-10, 10]^2.

    The middle band translates at unit speed along x2; with the default
    heading the vortex center reaches the first interface at
    t = (10/3) / cos(atan2(1, 2)), about 3.727.

    The strength eps = 5 at Ma_inf = 0.5 keeps the perturbation well above
    round-off where it meets the interface, and the run ends at that arrival
    time rather than after a fixed number of periods. configs/vortex.ini
    carries the same values.
    """
    values = {
        "name": "vortex",
        "case": VortexParams(
            eps=5.0,
            rc=1.0,
            v_inf=1.0,
            Ma_inf=0.5,
            theta=math.atan2(1.0, 2.0),
            center=(-20.0 / 3.0, 0.0),
        ),
        "mesh": three_bands(-10.0, -10.0, 20.0, 4, 12, (0.0, 1.0)),
        "degree": 4,
        "cfl": 0.4,
        "t_end": vortex_arrival_time(),
        "levels": (1, 2, 4),
    }
    values.update(overrides)
    return validate_config(values)


def vortex_arrival_time(
    center_x1: float = -20.0 / 3.0, interface_x1: float = -10.0 / 3.0, theta: float = math.atan2(1.0, 2.0)
) -> float:
    """Time the vortex center, moving at unit speed, needs to reach an interface."""
    return (interface_x1 - center_x1) / math.cos(theta)


PRESETS = {
    "freestream": freestream_config,
    "density_wave": density_wave_config,
    "vortex": vortex_config,
}
