"""Sliding interface bookkeeping: displacement split into whole faces and a fraction."""

import math
from dataclasses import dataclass

import numpy as np

from slidingdg.errors import ConfigurationError


@dataclass(frozen=True)
class DisplacementUpdate:
    delta: float
    n_delta: int
    s_delta: float
    changed: bool


class SlidingInterface:
    """
    Planar x1 = const interface between a static and a moving subdomain.

    The displacement of the moving side relative to the static side is kept
    as Delta = (n_total + s_delta) * l_par with an unbounded integer n_total
    and s_delta in [0, 1); n_delta is n_total reduced modulo n_faces_par.

    Attributes:
        id (int): Interface index, also the outermost mortar sort key.
        static_band (int): Subdomain on the primary side.
        moving_band (int): Subdomain on the replica side.
        static_side (int): Local element side touching the interface (0 or 1).
        moving_side (int): Local element side on the moving subdomain.
        static_elements (np.ndarray): Global element ids by static index i_par.
        moving_elements (np.ndarray): Global element ids by moving index.
        l_par (float): Face length along x2.
        velocity (float): Moving-side x2 velocity relative to the static side.
        x1 (float): Interface position.
        normal (np.ndarray): Unit normal pointing out of the static side.
    """

    def __init__(
        self,
        id: int,
        static_band: int,
        moving_band: int,
        static_side: int,
        moving_side: int,
        static_elements: np.ndarray,
        moving_elements: np.ndarray,
        l_par: float,
        velocity: float,
        x1: float,
    ):
        self.id = id
        self.static_band = static_band
        self.moving_band = moving_band
        self.static_side = static_side
        self.moving_side = moving_side
        self.static_elements = static_elements
        self.moving_elements = moving_elements
        self.l_par = l_par
        self.velocity = velocity
        self.x1 = x1
        self.normal = np.array([1.0, 0.0]) if static_side == 1 else np.array([-1.0, 0.0])
        self.n_total = 0
        self.s_delta = 0.0

    def __repr__(self) -> str:
        return (
            f"SlidingInterface(id={self.id}, static={self.static_band}, moving={self.moving_band}, "
            f"faces={self.n_faces_par}, n_delta={self.n_delta}, s_delta={self.s_delta:.6g})"
        )

    @property
    def n_faces_par(self) -> int:
        return int(self.static_elements.size)

    @property
    def n_delta(self) -> int:
        return self.n_total % self.n_faces_par

    @property
    def delta(self) -> float:
        return (self.n_total + self.s_delta) * self.l_par

    @property
    def surf(self) -> float:
        return 0.5 * self.l_par

    def set_displacement(self, delta: float) -> None:
        n_total, s_delta = _split(delta / self.l_par)
        self.n_total = n_total
        self.s_delta = s_delta

    def stage_displacement(self, offset: float) -> tuple[int, float]:
        """
        Displacement split after moving for a time offset, without mutating.

        Args:
            offset (float): Time elapsed since the stored displacement.

        Returns:
            tuple[int, float]: (n_total, s_delta) at the offset time.
        """
        n_extra, s_delta = _split(self.s_delta + self.velocity * offset / self.l_par)
        return self.n_total + n_extra, s_delta


def _split(q: float) -> tuple[int, float]:
    k = math.floor(q)
    s = q - k
    if s >= 1.0:
        k += 1
        s = 0.0
    return int(k), s


def advance_displacement(iface: SlidingInterface, dt: float) -> DisplacementUpdate:
    """
    Move the interface by its relative velocity over dt.

    Whole face lengths are carried into n_total, the fraction stays in s_delta,
    so repeated steps do not drift.

    Args:
        iface (SlidingInterface): Interface to update in place.
        dt (float): Time increment, nonnegative.

    Returns:
        DisplacementUpdate: New displacement, n_delta, s_delta and whether
        n_delta changed.
    """
    if dt < 0.0:
        raise ConfigurationError(f"Time increment must be nonnegative, got {dt}")
    n_total, s_delta = iface.stage_displacement(dt)
    changed = n_total != iface.n_total
    iface.n_total = n_total
    iface.s_delta = s_delta
    return DisplacementUpdate(
        delta=iface.delta, n_delta=iface.n_delta, s_delta=s_delta, changed=changed
    )


def sigma_from_displacement(s_delta: float) -> float:
    """
    Hanging-node position in face reference space, sigma = 2 s_delta - 1.

    Args:
        s_delta (float): Surpassed face fraction in [0, 1).

    Returns:
        float: sigma in [-1, 1).
    """
    if not 0.0 <= s_delta < 1.0:
        raise ValueError(f"s_delta must be in [0, 1), got {s_delta}")
    return 2.0 * s_delta - 1.0
