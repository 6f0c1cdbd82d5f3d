from dataclasses import dataclass

import numpy as np

from slidingdg.errors import ConfigurationError
from slidingdg.mesh import BoundaryKind
from slidingdg.physics import ExactSolution


@dataclass(frozen=True)
class BoundaryCondition:
    """External states for boundary faces; periodic directions have none."""

    kind: BoundaryKind
    solution: ExactSolution | None = None

    def external_state(self, u_inner: np.ndarray, x: np.ndarray, t: float) -> np.ndarray:
        if self.kind is BoundaryKind.DIRICHLET:
            return self.solution.state(x, t)
        if u_inner.size:
            raise ConfigurationError("Periodic directions have no boundary faces to fill")
        return np.empty_like(u_inner)


def make_boundary(kind: BoundaryKind | str, solution: ExactSolution | None = None) -> BoundaryCondition:
    """
    Boundary condition from its name.

    Args:
        kind (BoundaryKind | str): "periodic" or "dirichlet" (exact solution data).
        solution (ExactSolution | None): Exact solution evaluated on Dirichlet faces.

    Returns:
        BoundaryCondition: The condition.
    """
    try:
        kind = BoundaryKind(kind)
    except ValueError as e:
        raise ConfigurationError(f"Unknown boundary condition: {kind}") from e
    if kind is BoundaryKind.DIRICHLET and solution is None:
        raise ConfigurationError("Dirichlet boundaries need an exact solution to evaluate")
    return BoundaryCondition(kind=kind, solution=solution)


def apply_boundary(
    boundary: BoundaryCondition, u_inner: np.ndarray, x: np.ndarray, t: float
) -> np.ndarray:
    """
    External states of boundary face nodes.

    Args:
        boundary (BoundaryCondition): Condition of the faces.
        u_inner (np.ndarray): Interior traces (nf, N+1, 4).
        x (np.ndarray): Face node coordinates (nf, N+1, 2) at time t.
        t (float): Stage time.

    Returns:
        np.ndarray: External states with the shape of u_inner.
    """
    return boundary.external_state(u_inner, x, t)
