"""Error norms against the exact solution and conservation diagnostics."""

import numpy as np

from slidingdg.basis import NodeKind, NodeSet, build_node_set, lagrange_matrix
from slidingdg.mesh import Mesh
from slidingdg.physics import ExactSolution
from slidingdg.physics.gas import NVAR

VARIABLES = ("rho", "rhov1", "rhov2", "rhoe")
# extra Gauss points per direction for the error quadrature
OVERINTEGRATION = 3


def integrate(values: np.ndarray, jac: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    Integral over all elements of nodal values with tensor-product weights.

    Args:
        values (np.ndarray): Nodal values (ne, M, M, ...).
        jac (np.ndarray): Jacobian per element.
        weights (np.ndarray): 1D quadrature weights of the M nodes.

    Returns:
        np.ndarray: Integral per trailing component.
    """
    w2 = np.outer(weights, weights)
    scaled = values * jac.reshape((-1,) + (1,) * (values.ndim - 1))
    return np.tensordot(w2, scaled, axes=([0, 1], [1, 2])).sum(axis=0)


def _interpolate(u: np.ndarray, vdm: np.ndarray) -> np.ndarray:
    return np.einsum("ai,bj,eijv->eabv", vdm, vdm, u)


def error_norms(
    u: np.ndarray,
    mesh: Mesh,
    nodeset: NodeSet,
    solution: ExactSolution,
    t: float,
) -> dict[str, float]:
    """
    L2 and Linf errors of every conserved variable.

    The L2 norm integrates the pointwise squared error with Gauss quadrature
    of N + OVERINTEGRATION points per direction; Linf is taken over the same
    points together with the solution nodes.

    Args:
        u (np.ndarray): Nodal states of all elements (ne, N+1, N+1, 4).
        mesh (Mesh): Mesh of the run.
        nodeset (NodeSet): Nodes u is given on.
        solution (ExactSolution): Reference solution.
        t (float): Time level of u.

    Returns:
        dict[str, float]: Keys L2_<var> and Linf_<var>.
    """
    gauss = build_node_set(nodeset.degree + OVERINTEGRATION, NodeKind.GAUSS)
    vdm = lagrange_matrix(nodeset, gauss.nodes)
    x_fine = mesh.node_coordinates(gauss, t)
    error_fine = _interpolate(u, vdm) - solution.state(x_fine, t)
    error_nodes = u - solution.state(mesh.node_coordinates(nodeset, t), t)

    l2 = np.sqrt(integrate(error_fine**2, mesh.metrics.jac, gauss.weights))
    linf = np.maximum(
        np.abs(error_fine).reshape(-1, NVAR).max(axis=0),
        np.abs(error_nodes).reshape(-1, NVAR).max(axis=0),
    )
    norms = {f"L2_{name}": float(l2[k]) for k, name in enumerate(VARIABLES)}
    norms.update({f"Linf_{name}": float(linf[k]) for k, name in enumerate(VARIABLES)})
    return norms


def conservation_drift(
    u0: np.ndarray, u1: np.ndarray, jac: np.ndarray, nodeset: NodeSet
) -> dict[str, float]:
    """
    Change of the domain integral of every conserved variable.

    Totals use the nodal quadrature the scheme is conservative in. The drift
    is relative to the initial total, or absolute when that total vanishes.

    Returns:
        dict[str, float]: Keys drift_<var>.
    """
    q0 = integrate(u0, jac, nodeset.weights)
    q1 = integrate(u1, jac, nodeset.weights)
    scale = np.where(np.abs(q0) > 1e-12, np.abs(q0), 1.0)
    drift = np.abs(q1 - q0) / scale
    return {f"drift_{name}": float(drift[k]) for k, name in enumerate(VARIABLES)}
