"""Perfect-gas model and conserved/primitive state algebra.

States are numpy arrays whose last axis holds the 2D conserved vector
[rho, rho*v1, rho*v2, rho*e]; single states can also be carried as
ConservedState models.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from slidingdg.errors import InvalidStateError

NVAR = 4


class GasModel(BaseModel):
    """Perfect gas with Stokes' hypothesis and a constant Prandtl number."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(default=1.4, gt=1.0)
    R: float = Field(default=1.0, gt=0.0)
    mu: float = Field(default=0.0, ge=0.0)
    Pr: float = Field(default=0.72, gt=0.0)

    @property
    def lam(self) -> float:
        return -2.0 / 3.0 * self.mu

    @property
    def k(self) -> float:
        return self.gamma * self.R * self.mu / ((self.gamma - 1.0) * self.Pr)

    @property
    def is_viscous(self) -> bool:
        return self.mu > 0.0


class GridVelocity(BaseModel):
    model_config = ConfigDict(frozen=True)

    vg1: float = 0.0
    vg2: float = 0.0

    @field_validator("vg1", "vg2")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"Grid velocity must be finite, got {value}")
        return value

    def as_array(self) -> np.ndarray:
        return np.array([self.vg1, self.vg2])


class ConservedState(BaseModel):
    """A single conserved state [rho, rho*v1, rho*v2, rho*e]."""

    model_config = ConfigDict(frozen=True)

    rho: float
    rhov1: float
    rhov2: float
    rhoe: float

    @field_validator("rho")
    @classmethod
    def _positive_density(cls, value: float) -> float:
        if not value > 0.0:
            raise ValueError(f"Density must be positive, got {value}")
        return value

    @classmethod
    def from_primitive(
        cls, rho: float, v1: float, v2: float, p: float, gas: GasModel
    ) -> "ConservedState":
        """
        Build a state from density, velocity and pressure.

        Args:
            rho (float): Density.
            v1 (float): Velocity along x1.
            v2 (float): Velocity along x2.
            p (float): Pressure.
            gas (GasModel): Gas closing the energy relation.

        Returns:
            ConservedState: The conserved state.
        """
        if not (rho > 0.0 and p > 0.0):
            raise InvalidStateError(
                f"Primitive state is not physical: rho={rho}, p={p}",
                values={"rho": rho, "p": p},
            )
        rhoe = p / (gas.gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2)
        return cls(rho=rho, rhov1=rho * v1, rhov2=rho * v2, rhoe=rhoe)

    def to_array(self) -> np.ndarray:
        return np.array([self.rho, self.rhov1, self.rhov2, self.rhoe])


def as_state_array(state: "ConservedState | np.ndarray") -> np.ndarray:
    if isinstance(state, ConservedState):
        return state.to_array()
    return np.asarray(state, dtype=float)


def pressure(u: np.ndarray, gas: GasModel) -> np.ndarray:
    """Pressure of conserved states without validity checks."""
    rho = u[..., 0]
    kinetic = 0.5 * (u[..., 1] * u[..., 1] + u[..., 2] * u[..., 2]) / rho
    return (gas.gamma - 1.0) * (u[..., 3] - kinetic)


def eos_pressure(state: "ConservedState | np.ndarray", gas: GasModel) -> np.ndarray | float:
    """
    Perfect-gas pressure p = (gamma-1)(rho*e - rho|v|^2/2).

    Args:
        state (ConservedState | np.ndarray): One state or an array of states.
        gas (GasModel): Gas model.

    Returns:
        np.ndarray | float: Pressure, a float for a single state.
    """
    u = as_state_array(state)
    rho = u[..., 0]
    if np.any(~(rho > 0.0)):
        raise InvalidStateError(
            f"Nonpositive density: min rho={np.min(rho)}", values={"rho": np.min(rho)}
        )
    p = pressure(u, gas)
    if np.any(~(p > 0.0)):
        worst = np.unravel_index(np.argmin(p), np.shape(p))
        raise InvalidStateError(
            f"Nonpositive pressure: min p={np.min(p)}",
            values={"p": float(np.min(p)), "state": u[worst].tolist()},
        )
    return float(p) if np.ndim(p) == 0 else p


def primitive(u: np.ndarray, gas: GasModel) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return rho, v1, v2, p of conserved states."""
    rho = u[..., 0]
    v1 = u[..., 1] / rho
    v2 = u[..., 2] / rho
    p = (gas.gamma - 1.0) * (u[..., 3] - 0.5 * rho * (v1 * v1 + v2 * v2))
    return rho, v1, v2, p


def conserved(rho: np.ndarray, v1: np.ndarray, v2: np.ndarray, p: np.ndarray, gas: GasModel) -> np.ndarray:
    rho, v1, v2, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, v1, v2, p)))
    u = np.empty(rho.shape + (NVAR,))
    u[..., 0] = rho
    u[..., 1] = rho * v1
    u[..., 2] = rho * v2
    u[..., 3] = p / (gas.gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2)
    return u


def lifting_variables(u: np.ndarray, gas: GasModel) -> np.ndarray:
    """Primitive set (rho, v1, v2, T) whose gradients feed the viscous fluxes."""
    rho, v1, v2, p = primitive(u, gas)
    w = np.empty_like(u)
    w[..., 0] = rho
    w[..., 1] = v1
    w[..., 2] = v2
    w[..., 3] = p / (rho * gas.R)
    return w


def sound_speed(u: np.ndarray, gas: GasModel) -> np.ndarray:
    rho, _, _, p = primitive(u, gas)
    return np.sqrt(gas.gamma * p / rho)


def is_physical(u: np.ndarray, gas: GasModel) -> np.ndarray:
    """Per-state mask of finite states with positive density and pressure."""
    finite = np.all(np.isfinite(u), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = pressure(u, gas)
        return finite & (u[..., 0] > 0.0) & (p > 0.0)
