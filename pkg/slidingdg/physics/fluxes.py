"""ALE convective and Navier-Stokes viscous fluxes in 2D."""

import numpy as np

from slidingdg.physics.gas import (
    ConservedState,
    GasModel,
    GridVelocity,
    as_state_array,
    eos_pressure,
    primitive,
)


def _grid_velocity_array(vg: "GridVelocity | np.ndarray | tuple[float, float]") -> np.ndarray:
    if isinstance(vg, GridVelocity):
        return vg.as_array()
    return np.asarray(vg, dtype=float)


def euler_fluxes(u: np.ndarray, gas: GasModel) -> tuple[np.ndarray, np.ndarray]:
    """Physical Euler fluxes in x1 and x2, without validity checks."""
    _, v1, v2, p = primitive(u, gas)
    f1 = np.empty_like(u)
    f2 = np.empty_like(u)
    f1[..., 0] = u[..., 1]
    f1[..., 1] = u[..., 1] * v1 + p
    f1[..., 2] = u[..., 2] * v1
    f1[..., 3] = (u[..., 3] + p) * v1
    f2[..., 0] = u[..., 2]
    f2[..., 1] = u[..., 1] * v2
    f2[..., 2] = u[..., 2] * v2 + p
    f2[..., 3] = (u[..., 3] + p) * v2
    return f1, f2


def ale_fluxes(u: np.ndarray, vg: np.ndarray, gas: GasModel) -> tuple[np.ndarray, np.ndarray]:
    """ALE fluxes F_i - vg_i U for states u and grid velocities vg (..., 2)."""
    f1, f2 = euler_fluxes(u, gas)
    vg = np.asarray(vg, dtype=float)
    f1 -= vg[..., 0, None] * u
    f2 -= vg[..., 1, None] * u
    return f1, f2


def ale_normal_flux(u: np.ndarray, normal: np.ndarray, vg_normal: np.ndarray, gas: GasModel) -> np.ndarray:
    """ALE flux projected on a (unit) normal: F.n - (vg.n) U."""
    _, v1, v2, p = primitive(u, gas)
    normal = np.asarray(normal, dtype=float)
    qn = v1 * normal[..., 0] + v2 * normal[..., 1]
    flux = np.empty_like(u)
    flux[..., 0] = u[..., 0] * qn
    flux[..., 1] = u[..., 1] * qn + p * normal[..., 0]
    flux[..., 2] = u[..., 2] * qn + p * normal[..., 1]
    flux[..., 3] = (u[..., 3] + p) * qn
    return flux - np.asarray(vg_normal, dtype=float)[..., None] * u


def ale_convective_flux(
    state: "ConservedState | np.ndarray",
    vg: "GridVelocity | np.ndarray | tuple[float, float]",
    gas: GasModel,
) -> tuple[np.ndarray, np.ndarray]:
    """
    ALE convective flux pair of a state seen from a moving grid.

    Args:
        state (ConservedState | np.ndarray): Conserved state(s), last axis of size 4.
        vg (GridVelocity | np.ndarray | tuple[float, float]): Grid velocity.
        gas (GasModel): Gas model.

    Returns:
        tuple[np.ndarray, np.ndarray]: Flux columns along x1 and x2.
    """
    u = as_state_array(state)
    eos_pressure(u, gas)
    return ale_fluxes(u, np.broadcast_to(_grid_velocity_array(vg), u.shape[:-1] + (2,)), gas)


def viscous_fluxes(u: np.ndarray, grad: np.ndarray, gas: GasModel) -> tuple[np.ndarray, np.ndarray]:
    """
    Viscous flux pair from gradients of the lifting variables.

    Args:
        u (np.ndarray): Conserved states (..., 4).
        grad (np.ndarray): Gradients (..., 2, 4) of (rho, v1, v2, T); axis -2
            is the derivative direction.
        gas (GasModel): Gas model providing mu, lambda and k.

    Returns:
        tuple[np.ndarray, np.ndarray]: Flux columns along x1 and x2. They are
        not shifted by the grid velocity.
    """
    rho = u[..., 0]
    v1 = u[..., 1] / rho
    v2 = u[..., 2] / rho
    du1_dx1 = grad[..., 0, 1]
    du1_dx2 = grad[..., 1, 1]
    du2_dx1 = grad[..., 0, 2]
    du2_dx2 = grad[..., 1, 2]
    div = du1_dx1 + du2_dx2
    tau11 = 2.0 * gas.mu * du1_dx1 + gas.lam * div
    tau22 = 2.0 * gas.mu * du2_dx2 + gas.lam * div
    tau12 = gas.mu * (du1_dx2 + du2_dx1)
    k = gas.k

    g1 = np.zeros_like(u)
    g2 = np.zeros_like(u)
    g1[..., 1] = tau11
    g1[..., 2] = tau12
    g1[..., 3] = tau11 * v1 + tau12 * v2 + k * grad[..., 0, 3]
    g2[..., 1] = tau12
    g2[..., 2] = tau22
    g2[..., 3] = tau12 * v1 + tau22 * v2 + k * grad[..., 1, 3]
    return g1, g2


def viscous_flux(state: "ConservedState | np.ndarray", grad: np.ndarray, gas: GasModel) -> tuple[np.ndarray, np.ndarray]:
    """Viscous flux pair of validated state(s); see viscous_fluxes."""
    u = as_state_array(state)
    eos_pressure(u, gas)
    return viscous_fluxes(u, np.asarray(grad, dtype=float), gas)


def stress_tensor(grad: np.ndarray, gas: GasModel) -> np.ndarray:
    """Stress tensor tau[..., i, j] from lifting-variable gradients."""
    tau = np.empty(grad.shape[:-2] + (2, 2))
    div = grad[..., 0, 1] + grad[..., 1, 2]
    tau[..., 0, 0] = 2.0 * gas.mu * grad[..., 0, 1] + gas.lam * div
    tau[..., 1, 1] = 2.0 * gas.mu * grad[..., 1, 2] + gas.lam * div
    tau[..., 0, 1] = gas.mu * (grad[..., 1, 1] + grad[..., 0, 2])
    tau[..., 1, 0] = tau[..., 0, 1]
    return tau
