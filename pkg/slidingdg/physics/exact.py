"""Closed-form reference solutions: isentropic vortex, density wave, freestream."""

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from slidingdg.physics.gas import GasModel, NVAR, conserved


class _ExactSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    period: tuple[float, float] | None = None

    def state(self, x: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def source(self, x: np.ndarray, t: float, gas: GasModel) -> np.ndarray | None:
        """Volume source keeping the closed form an exact solution, None if not needed."""
        return None


class VortexParams(_ExactSolution):
    """Isentropic vortex advected by a uniform freestream."""

    kind: Literal["vortex"] = "vortex"
    eps: float = Field(default=1.0, gt=0.0)
    rc: float = Field(default=1.0, gt=0.0)
    rho_inf: float = Field(default=1.0, gt=0.0)
    v_inf: float = Field(default=1.0, ge=0.0)
    theta: float = 0.0
    Ma_inf: float = Field(default=0.3, gt=0.0)
    gamma: float = Field(default=1.4, gt=1.0)
    center: tuple[float, float] = (0.0, 0.0)

    @property
    def p_inf(self) -> float:
        return self.rho_inf * self.v_inf**2 / (self.gamma * self.Ma_inf**2)

    def state(self, x: np.ndarray, t: float) -> np.ndarray:
        return exact_isentropic_vortex(x, t, self)


class DensityWaveParams(_ExactSolution):
    """Oblique sine density wave carried by a uniform velocity at constant pressure."""

    kind: Literal["density_wave"] = "density_wave"
    alpha: float = 0.1
    advect_velocity: tuple[float, float] = (1.0, 1.0)
    p0: float = Field(default=1.0, gt=0.0)
    gamma: float = Field(default=1.4, gt=1.0)

    @field_validator("alpha")
    @classmethod
    def _amplitude_below_one(cls, value: float) -> float:
        if not 0.0 <= value < 1.0:
            raise ValueError(f"Density wave amplitude must be in [0, 1), got {value}")
        return value

    def state(self, x: np.ndarray, t: float) -> np.ndarray:
        return exact_density_wave(x, t, self)

    def source(self, x: np.ndarray, t: float, gas: GasModel) -> np.ndarray | None:
        if not gas.is_viscous:
            return None
        return density_wave_source(x, t, self, gas)


class FreestreamParams(_ExactSolution):
    """Uniform flow at a given Mach number."""

    kind: Literal["freestream"] = "freestream"
    rho_inf: float = Field(default=1.0, gt=0.0)
    v_inf: float = Field(default=1.0, ge=0.0)
    theta: float = 0.0
    Ma_inf: float = Field(default=0.3, gt=0.0)
    gamma: float = Field(default=1.4, gt=1.0)

    @property
    def p_inf(self) -> float:
        if self.v_inf == 0.0:
            return 1.0 / self.gamma
        return self.rho_inf * self.v_inf**2 / (self.gamma * self.Ma_inf**2)

    def state(self, x: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        gas = GasModel(gamma=self.gamma)
        shape = x.shape[:-1]
        return conserved(
            np.full(shape, self.rho_inf),
            np.full(shape, self.v_inf * math.cos(self.theta)),
            np.full(shape, self.v_inf * math.sin(self.theta)),
            np.full(shape, self.p_inf),
            gas,
        )


ExactSolution = VortexParams | DensityWaveParams | FreestreamParams


def _nearest_image(dx: np.ndarray, period: tuple[float, float] | None) -> np.ndarray:
    if period is None:
        return dx
    lengths = np.asarray(period, dtype=float)
    return dx - lengths * np.round(dx / lengths)


def exact_isentropic_vortex(x: np.ndarray, t: float, params: VortexParams) -> np.ndarray:
    """
    Isentropic vortex of strength eps and radius rc advected at angle theta.

    Args:
        x (np.ndarray): Points (..., 2).
        t (float): Time.
        params (VortexParams): Vortex and freestream parameters. When
            params.period is set the nearest periodic image of the center is used.

    Returns:
        np.ndarray: Conserved states (..., 4).
    """
    x = np.asarray(x, dtype=float)
    direction = np.array([math.cos(params.theta), math.sin(params.theta)])
    center = np.asarray(params.center, dtype=float) + params.v_inf * direction * t
    xr = _nearest_image(x - center, params.period) / params.rc
    r2 = xr[..., 0] ** 2 + xr[..., 1] ** 2
    bump = np.exp(0.5 * (1.0 - r2))
    swirl = params.eps / (2.0 * math.pi)

    v1 = params.v_inf * (direction[0] - swirl * xr[..., 1] * bump)
    v2 = params.v_inf * (direction[1] + swirl * xr[..., 0] * bump)
    gm1 = params.gamma - 1.0
    temperature_ratio = 1.0 - 0.5 * gm1 * (swirl * params.Ma_inf) ** 2 * bump * bump
    rho = params.rho_inf * temperature_ratio ** (1.0 / gm1)
    p = params.p_inf * temperature_ratio ** (params.gamma / gm1)
    return conserved(rho, v1, v2, p, GasModel(gamma=params.gamma))


def _wave_phase(x: np.ndarray, t: float, params: DensityWaveParams) -> np.ndarray:
    a1, a2 = params.advect_velocity
    return math.pi * (x[..., 0] + x[..., 1] - (a1 + a2) * t)


def exact_density_wave(x: np.ndarray, t: float, params: DensityWaveParams) -> np.ndarray:
    """
    Density wave rho = 2 + alpha sin(pi (x1 + x2 - (a1 + a2) t)).

    Velocity and pressure are uniform, so this solves the Euler equations
    without a source.

    Args:
        x (np.ndarray): Points (..., 2).
        t (float): Time.
        params (DensityWaveParams): Amplitude, advection velocity and pressure.

    Returns:
        np.ndarray: Conserved states (..., 4).
    """
    x = np.asarray(x, dtype=float)
    rho = 2.0 + params.alpha * np.sin(_wave_phase(x, t, params))
    a1, a2 = params.advect_velocity
    return conserved(rho, a1, a2, params.p0, GasModel(gamma=params.gamma))


def density_wave_source(x: np.ndarray, t: float, params: DensityWaveParams, gas: GasModel) -> np.ndarray:
    """
    Energy source -k Lap(T) that makes the density wave a Navier-Stokes solution.

    Args:
        x (np.ndarray): Points (..., 2).
        t (float): Time.
        params (DensityWaveParams): Wave parameters.
        gas (GasModel): Gas model providing R and k.

    Returns:
        np.ndarray: Source terms (..., 4), nonzero only in the energy equation.
    """
    x = np.asarray(x, dtype=float)
    phase = _wave_phase(x, t, params)
    alpha = params.alpha
    rho = 2.0 + alpha * np.sin(phase)
    grad_rho_sq = 2.0 * (alpha * math.pi * np.cos(phase)) ** 2
    lap_rho = -2.0 * alpha * math.pi**2 * np.sin(phase)
    lap_t = -(params.p0 / gas.R) * (lap_rho / rho**2 - 2.0 * grad_rho_sq / rho**3)
    source = np.zeros(x.shape[:-1] + (NVAR,))
    source[..., 3] = -gas.k * lap_t
    return source
