"""Roe approximate Riemann solver with the Harten-Hyman entropy fix, ALE form."""

import numpy as np

from slidingdg.errors import InvalidStateError
from slidingdg.physics.fluxes import ale_normal_flux
from slidingdg.physics.gas import ConservedState, GasModel, as_state_array, primitive


def _harten_hyman(lam: np.ndarray, lam_left: np.ndarray, lam_right: np.ndarray) -> np.ndarray:
    """|lambda| with the Harten-Hyman fix, delta taken from the wave-speed spread."""
    delta = np.maximum(0.0, np.maximum(lam - lam_left, lam_right - lam))
    abs_lam = np.abs(lam)
    fixed = abs_lam < delta
    with np.errstate(divide="ignore", invalid="ignore"):
        smoothed = (lam * lam + delta * delta) / (2.0 * delta)
    return np.where(fixed, smoothed, abs_lam)


def roe_fluxes(
    u_left: np.ndarray,
    u_right: np.ndarray,
    normal: np.ndarray,
    vg_normal: np.ndarray,
    gas: GasModel,
) -> np.ndarray:
    """
    Vectorized Roe flux on unit normals, eigenvalues shifted by -vg_normal.

    Args:
        u_left (np.ndarray): States on the side the normal points away from.
        u_right (np.ndarray): States on the side the normal points into.
        normal (np.ndarray): Unit normals (..., 2), broadcastable to the states.
        vg_normal (np.ndarray): Normal grid speed, broadcastable to the states.
        gas (GasModel): Gas model.

    Returns:
        np.ndarray: Numerical flux (..., 4) along the normal.
    """
    gamma = gas.gamma
    normal = np.asarray(normal, dtype=float)
    vg_normal = np.asarray(vg_normal, dtype=float)
    nx = normal[..., 0]
    ny = normal[..., 1]

    rho_l, u_l, v_l, p_l = primitive(u_left, gas)
    rho_r, u_r, v_r, p_r = primitive(u_right, gas)
    h_l = (u_left[..., 3] + p_l) / rho_l
    h_r = (u_right[..., 3] + p_r) / rho_r
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)

    # --- Roe averages ---
    s_l = np.sqrt(rho_l)
    s_r = np.sqrt(rho_r)
    s_sum = s_l + s_r
    rho_t = s_l * s_r
    u_t = (s_l * u_l + s_r * u_r) / s_sum
    v_t = (s_l * v_l + s_r * v_r) / s_sum
    h_t = (s_l * h_l + s_r * h_r) / s_sum
    q2_t = u_t * u_t + v_t * v_t
    c2_t = (gamma - 1.0) * (h_t - 0.5 * q2_t)
    if np.any(~(c2_t > 0.0)):
        raise InvalidStateError(
            f"Roe average has nonpositive speed of sound squared: min c^2={np.min(c2_t)}",
            values={"c2": float(np.min(c2_t)), "h": float(np.min(h_t))},
        )
    c_t = np.sqrt(c2_t)
    qn_t = u_t * nx + v_t * ny
    qt_t = -u_t * ny + v_t * nx

    # --- jumps and wave strengths ---
    qn_l = u_l * nx + v_l * ny
    qn_r = u_r * nx + v_r * ny
    d_rho = rho_r - rho_l
    d_p = p_r - p_l
    d_qn = qn_r - qn_l
    d_qt = (-u_r * ny + v_r * nx) - (-u_l * ny + v_l * nx)

    alpha1 = (d_p - rho_t * c_t * d_qn) / (2.0 * c2_t)
    alpha2 = d_rho - d_p / c2_t
    alpha3 = rho_t * d_qt
    alpha4 = (d_p + rho_t * c_t * d_qn) / (2.0 * c2_t)

    # --- shifted eigenvalues, fix on the acoustic waves only ---
    lam1 = _harten_hyman(
        qn_t - c_t - vg_normal, qn_l - c_l - vg_normal, qn_r - c_r - vg_normal
    )
    lam2 = np.abs(qn_t - vg_normal)
    lam4 = _harten_hyman(
        qn_t + c_t - vg_normal, qn_l + c_l - vg_normal, qn_r + c_r - vg_normal
    )

    w1 = lam1 * alpha1
    w2 = lam2 * alpha2
    w3 = lam2 * alpha3
    w4 = lam4 * alpha4

    dissipation = np.empty(np.broadcast(u_left, u_right).shape)
    dissipation[..., 0] = w1 + w2 + w4
    dissipation[..., 1] = w1 * (u_t - c_t * nx) + w2 * u_t - w3 * ny + w4 * (u_t + c_t * nx)
    dissipation[..., 2] = w1 * (v_t - c_t * ny) + w2 * v_t + w3 * nx + w4 * (v_t + c_t * ny)
    dissipation[..., 3] = (
        w1 * (h_t - qn_t * c_t) + w2 * 0.5 * q2_t + w3 * qt_t + w4 * (h_t + qn_t * c_t)
    )

    central = 0.5 * (
        ale_normal_flux(u_left, normal, vg_normal, gas)
        + ale_normal_flux(u_right, normal, vg_normal, gas)
    )
    return central - 0.5 * dissipation


def roe_flux(
    left: "ConservedState | np.ndarray",
    right: "ConservedState | np.ndarray",
    normal: "np.ndarray | tuple[float, float]",
    vg_normal: float | np.ndarray,
    gas: GasModel,
) -> np.ndarray:
    """
    Roe flux between two states across a unit normal.

    Args:
        left (ConservedState | np.ndarray): State behind the normal.
        right (ConservedState | np.ndarray): State ahead of the normal.
        normal (np.ndarray | tuple[float, float]): Unit normal.
        vg_normal (float | np.ndarray): Normal component of the grid velocity.
        gas (GasModel): Gas model.

    Returns:
        np.ndarray: Numerical normal flux, last axis of size 4.
    """
    u_left = as_state_array(left)
    u_right = as_state_array(right)
    for name, u in (("left", u_left), ("right", u_right)):
        rho, _, _, p = primitive(u, gas)
        if np.any(~(rho > 0.0)) or np.any(~(p > 0.0)):
            raise InvalidStateError(
                f"Invalid {name} state for the Roe flux: min rho={np.min(rho)}, min p={np.min(p)}",
                values={"rho": float(np.min(rho)), "p": float(np.min(p))},
            )
    return roe_fluxes(u_left, u_right, np.asarray(normal, dtype=float), vg_normal, gas)
