"""Explicit low-storage Runge-Kutta stepping and the CFL time step."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from slidingdg.errors import ConfigurationError, SolverAbort
from slidingdg.mesh import Mesh
from slidingdg.physics.gas import GasModel, primitive, sound_speed

RHS = Callable[[np.ndarray, float, float], np.ndarray]


@dataclass(frozen=True)
class RKScheme:
    """
    Two-register low-storage scheme: r = a_k r + dt L(y); y = y + b_k r.

    c_k is the stage time offset in units of dt.
    """

    name: str
    a: tuple[float, ...]
    b: tuple[float, ...]
    c: tuple[float, ...]

    @property
    def n_stages(self) -> int:
        return len(self.b)


CARPENTER_KENNEDY_RK4 = RKScheme(
    name="rk4-5stage",
    a=(
        0.0,
        -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0,
        -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0,
    ),
    b=(
        1432997174477.0 / 9575080441755.0,
        5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0,
        3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0,
    ),
    c=(
        0.0,
        1432997174477.0 / 9575080441755.0,
        2526269341429.0 / 6820363962896.0,
        2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0,
    ),
)


def rk_step(
    u: np.ndarray,
    t: float,
    dt: float,
    rhs: RHS,
    scheme: RKScheme = CARPENTER_KENNEDY_RK4,
    on_stage: Callable[[int], None] | None = None,
) -> np.ndarray:
    """
    Advance u by one time step.

    Args:
        u (np.ndarray): State at time t; not modified.
        t (float): Current time.
        dt (float): Time step, positive.
        rhs (RHS): rhs(y, t_stage, offset) returning dy/dt, offset = c_k * dt.
        scheme (RKScheme): Low-storage coefficients.
        on_stage (Callable[[int], None] | None): Called with the stage index
            before each evaluation.

    Returns:
        np.ndarray: State at t + dt.
    """
    if not dt > 0.0:
        raise ConfigurationError(f"Time step must be positive, got {dt}")
    y = np.array(u, dtype=float, copy=True)
    residual = np.zeros_like(y)
    for stage, (a, b, c) in enumerate(zip(scheme.a, scheme.b, scheme.c)):
        if on_stage is not None:
            on_stage(stage)
        offset = c * dt
        residual = a * residual + dt * rhs(y, t + offset, offset)
        y += b * residual
        if not np.all(np.isfinite(y)):
            raise SolverAbort("Non-finite value after Runge-Kutta stage", stage=stage)
    return y


def compute_dt(u: np.ndarray, mesh: Mesh, gas: GasModel, cfl: float, degree: int) -> float:
    """
    CFL time step min_e cfl * h_e / (lambda_e (2N + 1)).

    Args:
        u (np.ndarray): Nodal states of all elements (ne, N+1, N+1, 4).
        mesh (Mesh): Mesh providing element sizes and grid velocities.
        gas (GasModel): Gas model.
        cfl (float): CFL number, positive.
        degree (int): Polynomial degree N.

    Returns:
        float: Largest stable time step estimate.
    """
    if not cfl > 0.0:
        raise ConfigurationError(f"CFL number must be positive, got {cfl}")
    _, v1, v2, _ = primitive(u, gas)
    vg = mesh.velocity[:, None, None, :]
    relative = np.hypot(v1 - vg[..., 0], v2 - vg[..., 1])
    lam = np.max((relative + sound_speed(u, gas)).reshape(u.shape[0], -1), axis=1)
    if gas.is_viscous:
        rho = u[..., 0].reshape(u.shape[0], -1).min(axis=1)
        diffusivity = max(4.0 / 3.0, gas.gamma / gas.Pr) * gas.mu / rho
        lam = lam + (2 * degree + 1) * diffusivity / mesh.metrics.h
    return float(np.min(cfl * mesh.metrics.h / (lam * (2 * degree + 1))))
