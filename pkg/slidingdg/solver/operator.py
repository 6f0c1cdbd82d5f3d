"""Tensor-product DGSEM kernels on affine elements.

Nodal arrays are indexed [element, i, j, ...] with i running along xi (x1)
and j along eta (x2). Face arrays are indexed [element, side, node, ...];
nodes on xi faces ascend in x2, nodes on eta faces ascend in x1.

Contractions loop over the summed index explicitly, so every nodal value is
accumulated in the same order whatever the number of elements in the batch.
"""

import numpy as np

from slidingdg.basis import BasisOperators
from slidingdg.mesh import SIDE_ETA_MINUS, SIDE_ETA_PLUS, SIDE_XI_MINUS, SIDE_XI_PLUS


def _axis_shape(n: int, axis: int, ndim: int) -> tuple[int, ...]:
    shape = [1] * ndim
    shape[axis] = n
    return tuple(shape)


def contract_xi(matrix: np.ndarray, values: np.ndarray) -> np.ndarray:
    """out[e, i, j] = sum_k matrix[i, k] values[e, k, j]."""
    shape = _axis_shape(matrix.shape[0], 1, values.ndim)
    out = matrix[:, 0].reshape(shape) * values[:, 0:1]
    for k in range(1, matrix.shape[1]):
        out = out + matrix[:, k].reshape(shape) * values[:, k : k + 1]
    return out


def contract_eta(matrix: np.ndarray, values: np.ndarray) -> np.ndarray:
    """out[e, i, j] = sum_k matrix[j, k] values[e, i, k]."""
    shape = _axis_shape(matrix.shape[0], 2, values.ndim)
    out = matrix[:, 0].reshape(shape) * values[:, :, 0:1]
    for k in range(1, matrix.shape[1]):
        out = out + matrix[:, k].reshape(shape) * values[:, :, k : k + 1]
    return out


def face_traces(values: np.ndarray, ops: BasisOperators) -> np.ndarray:
    """
    Values on the four element sides, shape (ne, 4, N+1, ...).

    Lobatto nodes include the end points and the traces are plain slices.
    """
    if ops.nodeset.is_lobatto:
        sides = (values[:, 0], values[:, -1], values[:, :, 0], values[:, :, -1])
    else:
        vm = ops.vface_minus
        vp = ops.vface_plus
        sides = (
            _contract_edge(vm, values, axis=1),
            _contract_edge(vp, values, axis=1),
            _contract_edge(vm, values, axis=2),
            _contract_edge(vp, values, axis=2),
        )
    return np.stack(sides, axis=1)


def _contract_edge(weights: np.ndarray, values: np.ndarray, axis: int) -> np.ndarray:
    taken = np.take(values, 0, axis=axis)
    out = weights[0] * taken
    for k in range(1, weights.size):
        out = out + weights[k] * np.take(values, k, axis=axis)
    return out


def volume_integral(ops: BasisOperators, flux1: np.ndarray, flux2: np.ndarray) -> np.ndarray:
    """
    Weak-form volume term of contravariant fluxes.

    Args:
        ops (BasisOperators): Node set operators.
        flux1 (np.ndarray): Contravariant flux along xi, (ne, N+1, N+1, ...).
        flux2 (np.ndarray): Contravariant flux along eta.

    Returns:
        np.ndarray: sum_k dvol[i, k] flux1[k, j] + sum_k dvol[j, k] flux2[i, k].
    """
    return contract_xi(ops.dvol, flux1) + contract_eta(ops.dvol, flux2)


def surface_integral(ops: BasisOperators, side_flux: np.ndarray) -> np.ndarray:
    """
    Lift outward surface fluxes into the element.

    Args:
        ops (BasisOperators): Node set operators.
        side_flux (np.ndarray): Outward flux times surface Jacobian per side,
            shape (ne, 4, N+1, ...).

    Returns:
        np.ndarray: Surface term (ne, N+1, N+1, ...).
    """
    n = ops.nodeset.size
    ndim = side_flux.ndim
    lift_i_minus = ops.lift_minus.reshape(_axis_shape(n, 1, ndim))
    lift_i_plus = ops.lift_plus.reshape(_axis_shape(n, 1, ndim))
    lift_j_minus = ops.lift_minus.reshape(_axis_shape(n, 2, ndim))
    lift_j_plus = ops.lift_plus.reshape(_axis_shape(n, 2, ndim))
    out = lift_i_minus * side_flux[:, SIDE_XI_MINUS][:, None, :]
    out = out + lift_i_plus * side_flux[:, SIDE_XI_PLUS][:, None, :]
    out = out + lift_j_minus * side_flux[:, SIDE_ETA_MINUS][:, :, None]
    out = out + lift_j_plus * side_flux[:, SIDE_ETA_PLUS][:, :, None]
    return out


def contravariant(ja: np.ndarray, flux1: np.ndarray, flux2: np.ndarray) -> np.ndarray:
    """Ja . (flux1, flux2) with constant metric vectors ja (ne, 2)."""
    shape = (ja.shape[0],) + (1,) * (flux1.ndim - 1)
    return ja[:, 0].reshape(shape) * flux1 + ja[:, 1].reshape(shape) * flux2
