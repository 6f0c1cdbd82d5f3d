"""L2 projections between an element face and its two mortars.

A face in reference coordinates [-1, 1] is split at the hanging node sigma
into a lower mortar [-1, sigma] and an upper mortar [sigma, 1]. On the static
side the lower mortar carries i_sub = 0 and the upper one i_sub = 1. The
moving side sees the hanging node at -sigma with the roles swapped; its data
are mirrored so both sides share one operator set.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from slidingdg.basis import NodeKind, NodeSet, build_node_set, exact_mass_matrix, lagrange_matrix
from slidingdg.errors import ConfigurationError


class MortarSide(str, Enum):
    STATIC = "static"
    MOVING = "moving"


@dataclass(frozen=True, eq=False)
class MortarOperators:
    """
    Face/mortar projection matrices for one hanging-node position.

    Mortar 1 is the upper part [sigma, 1] with weight (1 - sigma) / 2,
    mortar 2 the lower part [-1, sigma] with weight (1 + sigma) / 2.
    The mortar-to-face matrices include the weights.
    """

    sigma: float
    p_face_to_m1: np.ndarray
    p_face_to_m2: np.ndarray
    p_m1_to_face: np.ndarray
    p_m2_to_face: np.ndarray
    s_face_to_m1: np.ndarray
    s_face_to_m2: np.ndarray
    m_inv: np.ndarray

    @property
    def weight_m1(self) -> float:
        return 0.5 * (1.0 - self.sigma)

    @property
    def weight_m2(self) -> float:
        return 0.5 * (1.0 + self.sigma)


def _overlap_matrix(nodeset: NodeSet, gauss: NodeSet, start: float, stop: float) -> np.ndarray:
    """S[i, j] = int l_i(xi(z)) l_j(z) dz with xi mapping [-1, 1] onto [start, stop]."""
    z = gauss.nodes
    xi = start + 0.5 * (z + 1.0) * (stop - start)
    face_values = lagrange_matrix(nodeset, xi)
    mortar_values = lagrange_matrix(nodeset, z)
    return face_values.T @ (gauss.weights[:, None] * mortar_values)


@lru_cache(maxsize=256)
def _cached_operators(degree: int, kind: NodeKind, sigma: float) -> MortarOperators:
    nodeset = build_node_set(degree, kind)
    gauss = build_node_set(degree, NodeKind.GAUSS)
    mass = exact_mass_matrix(nodeset)
    m_inv = np.linalg.inv(mass)
    s1 = _overlap_matrix(nodeset, gauss, sigma, 1.0)
    s2 = _overlap_matrix(nodeset, gauss, -1.0, sigma)
    w1 = 0.5 * (1.0 - sigma)
    w2 = 0.5 * (1.0 + sigma)
    operators = MortarOperators(
        sigma=sigma,
        p_face_to_m1=m_inv @ s1.T,
        p_face_to_m2=m_inv @ s2.T,
        p_m1_to_face=w1 * (m_inv @ s1),
        p_m2_to_face=w2 * (m_inv @ s2),
        s_face_to_m1=s1,
        s_face_to_m2=s2,
        m_inv=m_inv,
    )
    for matrix in (
        operators.p_face_to_m1,
        operators.p_face_to_m2,
        operators.p_m1_to_face,
        operators.p_m2_to_face,
        s1,
        s2,
        m_inv,
    ):
        matrix.setflags(write=False)
    return operators


def build_mortar_operators(nodeset: NodeSet, sigma: float) -> MortarOperators:
    """
    Build (or fetch from the cache) the projections for hanging node sigma.

    Args:
        nodeset (NodeSet): Face interpolation nodes.
        sigma (float): Hanging-node position in [-1, 1).

    Returns:
        MortarOperators: Projection matrices, cached by (N, kind, sigma).
    """
    sigma = float(sigma)
    if not -1.0 <= sigma < 1.0:
        raise ConfigurationError(
            f"Hanging node sigma={sigma} outside [-1, 1); sigma = 1 is the conforming "
            "instant and must be expressed as sigma = -1 with the next face"
        )
    return _cached_operators(nodeset.degree, nodeset.kind, sigma)


def apply_line_operator(matrix: np.ndarray, lines: np.ndarray) -> np.ndarray:
    """
    Apply an (n x n) matrix along axis 1 of lines (m, n, ...).

    The sum runs over the contracted index in a fixed order with elementwise
    operations, so results do not depend on how many lines are batched.
    """
    n = matrix.shape[1]
    trailing = (1,) * (lines.ndim - 2)
    out = matrix[:, 0].reshape((1, -1) + trailing) * lines[:, 0:1]
    for k in range(1, n):
        out = out + matrix[:, k].reshape((1, -1) + trailing) * lines[:, k : k + 1]
    return out


def transfer_solution_to_mortars(
    face_values: np.ndarray, ops: MortarOperators, side: MortarSide | str
) -> tuple[np.ndarray, np.ndarray]:
    """
    Project face lines onto their two mortars.

    Args:
        face_values (np.ndarray): Face data (m, N+1, ...) with nodes ascending in x2.
        ops (MortarOperators): Operators of the current hanging node.
        side (MortarSide | str): "static" or "moving".

    Returns:
        tuple[np.ndarray, np.ndarray]: Mortar lines for i_sub = 0 and i_sub = 1,
        nodes ascending in x2.
    """
    side = MortarSide(side)
    if side is MortarSide.STATIC:
        return (
            apply_line_operator(ops.p_face_to_m2, face_values),
            apply_line_operator(ops.p_face_to_m1, face_values),
        )
    mirrored = face_values[:, ::-1]
    return (
        apply_line_operator(ops.p_face_to_m2, mirrored)[:, ::-1],
        apply_line_operator(ops.p_face_to_m1, mirrored)[:, ::-1],
    )


def project_flux_to_face(
    mortar_fluxes: tuple[np.ndarray, np.ndarray],
    ops: MortarOperators,
    side: MortarSide | str = MortarSide.STATIC,
) -> np.ndarray:
    """
    Weighted back-projection of the two mortar lines onto the face.

    Args:
        mortar_fluxes (tuple[np.ndarray, np.ndarray]): Lines for i_sub = 0 and 1.
        ops (MortarOperators): Operators of the current hanging node.
        side (MortarSide | str): Face side the lines are projected onto.

    Returns:
        np.ndarray: Face lines (m, N+1, ...).
    """
    side = MortarSide(side)
    sub0, sub1 = mortar_fluxes
    if side is MortarSide.STATIC:
        return apply_line_operator(ops.p_m2_to_face, sub0) + apply_line_operator(ops.p_m1_to_face, sub1)
    face = apply_line_operator(ops.p_m2_to_face, sub0[:, ::-1]) + apply_line_operator(
        ops.p_m1_to_face, sub1[:, ::-1]
    )
    return face[:, ::-1]
