from dataclasses import dataclass, field

import numpy as np

from slidingdg.errors import SolverAbort
from slidingdg.physics.gas import NVAR, GasModel, is_physical


@dataclass
class SolutionField:
    """
    Nodal conserved states of a set of elements at one time level.

    Attributes:
        u (np.ndarray): States (ne, N+1, N+1, 4), indexed [element, i, j, var].
        t (float): Time level.
        elements (np.ndarray): Global ids of the elements, ascending.
    """

    u: np.ndarray
    t: float
    elements: np.ndarray

    @property
    def degree(self) -> int:
        return self.u.shape[1] - 1

    @property
    def n_elements(self) -> int:
        return int(self.u.shape[0])


def check_positivity(
    u: np.ndarray,
    gas: GasModel,
    elements: np.ndarray,
    rank: int | None = None,
    step: int | None = None,
    stage: int | None = None,
) -> None:
    """Abort on the first element holding a non-finite or nonphysical state."""
    valid = is_physical(u, gas)
    if valid.all():
        return
    bad = np.argwhere(~valid)[0]
    state = u[tuple(bad)]
    raise SolverAbort(
        f"Nonphysical state {state.tolist()} at node ({bad[1]}, {bad[2]})",
        rank=rank,
        step=step,
        stage=stage,
        element=int(elements[bad[0]]),
    )


def _lines(count: int, n: int, values: int = NVAR) -> np.ndarray:
    shape = (count, n, values) if values == NVAR else (count, n, 2, NVAR)
    return np.zeros(shape)


@dataclass
class FaceDataArrays:
    """
    Face and mortar buffers of one rank, in the order of its schedules.

    The primary arrays belong to faces and mortars whose Riemann problem this
    rank solves; *_out holds this rank's own replica data going the other way
    and F_replica the fluxes coming back.
    """

    U_primary: np.ndarray
    U_replica: np.ndarray
    F_primary: np.ndarray
    U_out: np.ndarray
    F_replica: np.ndarray
    U_primary_sm: np.ndarray
    U_replica_sm: np.ndarray
    F_primary_sm: np.ndarray
    U_out_sm: np.ndarray
    F_replica_sm: np.ndarray
    viscous: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def allocate(
        cls, n: int, n_primary: int, n_replica: int, n_static: int, n_moving: int, viscous: bool
    ) -> "FaceDataArrays":
        """
        Buffers sized for the current schedules.

        Args:
            n (int): Nodes per face, N+1.
            n_primary (int): Conforming faces this rank is primary for.
            n_replica (int): Conforming faces this rank is replica for.
            n_static (int): Mortars on this rank's static faces.
            n_moving (int): Mortars on this rank's moving faces.
            viscous (bool): Also allocate lifting buffers.

        Returns:
            FaceDataArrays: Zeroed buffers.
        """
        arrays = cls(
            U_primary=_lines(n_primary, n),
            U_replica=_lines(n_primary, n),
            F_primary=_lines(n_primary, n),
            U_out=_lines(n_replica, n),
            F_replica=_lines(n_replica, n),
            U_primary_sm=_lines(n_static, n),
            U_replica_sm=_lines(n_static, n),
            F_primary_sm=_lines(n_static, n),
            U_out_sm=_lines(n_moving, n),
            F_replica_sm=_lines(n_moving, n),
        )
        if viscous:
            arrays.viscous = {
                "W_primary": _lines(n_primary, n),
                "W_replica": _lines(n_replica, n),
                "Q_primary": _lines(n_primary, n, 2 * NVAR),
                "Q_replica": _lines(n_primary, n, 2 * NVAR),
                "Q_out": _lines(n_replica, n, 2 * NVAR),
                "W_primary_sm": _lines(n_static, n),
                "W_replica_sm": _lines(n_moving, n),
                "Q_primary_sm": _lines(n_static, n, 2 * NVAR),
                "Q_replica_sm": _lines(n_static, n, 2 * NVAR),
                "Q_out_sm": _lines(n_moving, n, 2 * NVAR),
            }
        return arrays
