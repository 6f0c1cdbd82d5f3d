"""One-dimensional nodal Lagrange machinery for the DG and mortar operators."""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from slidingdg.errors import ConfigurationError
from slidingdg.logger import get_logger

logger = get_logger(__name__)

MIN_DEGREE = 1
MAX_DEGREE = 15
NEWTON_TOLERANCE = 1e-15
NEWTON_MAX_ITERATIONS = 50


class NodeKind(str, Enum):
    LOBATTO = "lgl"
    GAUSS = "gauss"


@dataclass(frozen=True, eq=False)
class NodeSet:
    """
    Quadrature nodes on [-1, 1] doubling as interpolation points.

    Attributes:
        degree (int): Polynomial degree N, the set holds N+1 nodes.
        kind (NodeKind): Legendre-Gauss-Lobatto or Legendre-Gauss.
        nodes (np.ndarray): Ascending nodes, symmetric about zero.
        weights (np.ndarray): Positive quadrature weights summing to 2.
        bary (np.ndarray): Barycentric weights of the nodes.
    """

    degree: int
    kind: NodeKind
    nodes: np.ndarray
    weights: np.ndarray
    bary: np.ndarray

    @property
    def size(self) -> int:
        return self.degree + 1

    @property
    def is_lobatto(self) -> bool:
        return self.kind is NodeKind.LOBATTO


@dataclass(frozen=True, eq=False)
class BasisOperators:
    """
    Differentiation, mass and face-evaluation operators of a node set.

    Attributes:
        nodeset (NodeSet): Node set the operators belong to.
        D (np.ndarray): D[i, j] = l_j'(x_i).
        mass (np.ndarray): Collocated mass matrix, diag(weights).
        vface_minus (np.ndarray): l_j(-1) for every j.
        vface_plus (np.ndarray): l_j(+1) for every j.
        dvol (np.ndarray): Weak-form volume operator D[k, i] w_k / w_i,
            indexed [i, k].
        lift_minus (np.ndarray): l_i(-1) / w_i, surface lifting at xi = -1.
        lift_plus (np.ndarray): l_i(+1) / w_i, surface lifting at xi = +1.
    """

    nodeset: NodeSet
    D: np.ndarray
    mass: np.ndarray
    vface_minus: np.ndarray
    vface_plus: np.ndarray
    dvol: np.ndarray
    lift_minus: np.ndarray
    lift_plus: np.ndarray


def _legendre_with_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return P_n, P_{n-1} and P_n' at x by the three-term recursion."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    # endpoints are handled by the callers, the derivative formula divides by 1 - x^2
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = n * (p_prev - x * p) / (1.0 - x * x)
    return p, p_prev, dp


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _symmetrize(nodes: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if nodes.size % 2 == 1:
        nodes[nodes.size // 2] = 0.0
    return nodes, weights


def _lobatto_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Newton on x P_N - P_{N-1} = 0 from Chebyshev-Gauss-Lobatto guesses
    x = np.cos(np.pi * np.arange(n + 1) / n)
    p = np.zeros((n + 1, n + 1))
    for _ in range(NEWTON_MAX_ITERATIONS):
        x_old = x.copy()
        p[:, 0] = 1.0
        p[:, 1] = x
        for k in range(2, n + 1):
            p[:, k] = ((2 * k - 1) * x * p[:, k - 1] - (k - 1) * p[:, k - 2]) / k
        x = x_old - (x * p[:, n] - p[:, n - 1]) / ((n + 1) * p[:, n])
        if np.max(np.abs(x - x_old)) <= NEWTON_TOLERANCE:
            break
    else:
        logger.debug(f"LGL Newton iteration for N={n} stopped at the iteration cap")
    x = x[::-1].copy()
    x[0], x[-1] = -1.0, 1.0
    pn, _, _ = _legendre_with_derivative(n, x)
    weights = 2.0 / (n * (n + 1) * pn * pn)
    return _symmetrize(x, weights)


def _gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    # roots of P_{N+1}, Chebyshev-Gauss guesses
    m = n + 1
    x = np.cos(np.pi * (2 * np.arange(m) + 1) / (2 * m))
    for _ in range(NEWTON_MAX_ITERATIONS):
        p, _, dp = _legendre_with_derivative(m, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOLERANCE:
            break
    else:
        logger.debug(f"Gauss Newton iteration for N={n} stopped at the iteration cap")
    x = x[::-1].copy()
    _, _, dp = _legendre_with_derivative(m, x)
    weights = 2.0 / ((1.0 - x * x) * dp * dp)
    return _symmetrize(x, weights)


@lru_cache(maxsize=None)
def build_node_set(degree: int, kind: NodeKind | str = NodeKind.LOBATTO) -> NodeSet:
    """
    Build the N+1 quadrature/interpolation nodes of the requested kind.

    Args:
        degree (int): Polynomial degree N, 1 <= N <= 15.
        kind (NodeKind | str): "lgl" (default) or "gauss".

    Returns:
        NodeSet: Ascending nodes with their quadrature weights.
    """
    if not isinstance(degree, (int, np.integer)) or not MIN_DEGREE <= degree <= MAX_DEGREE:
        raise ConfigurationError(
            f"Polynomial degree must be in [{MIN_DEGREE}, {MAX_DEGREE}], got {degree}"
        )
    try:
        kind = NodeKind(kind)
    except ValueError as e:
        raise ConfigurationError(f"Unknown node kind: {kind}") from e
    degree = int(degree)

    if kind is NodeKind.LOBATTO:
        nodes, weights = _lobatto_nodes(degree)
    else:
        nodes, weights = _gauss_nodes(degree)
    for array in (nodes, weights):
        array.setflags(write=False)
    bary = _barycentric_weights(nodes)
    bary.setflags(write=False)
    return NodeSet(degree=degree, kind=kind, nodes=nodes, weights=weights, bary=bary)


def lagrange_matrix(nodeset: NodeSet, x: np.ndarray) -> np.ndarray:
    """
    Evaluate every cardinal polynomial at the points x.

    Args:
        nodeset (NodeSet): Interpolation nodes.
        x (np.ndarray): Evaluation points, any shape.

    Returns:
        np.ndarray: Array of shape x.shape + (N+1,) with l_j(x).
    """
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1)
    diff = flat[:, None] - nodeset.nodes[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = nodeset.bary[None, :] / diff
        values = terms / np.sum(terms, axis=1, keepdims=True)
    hit = np.any(exact, axis=1)
    values[hit] = exact[hit].astype(float)
    return values.reshape(x.shape + (nodeset.size,))


def lagrange_eval(nodeset: NodeSet, j: int, x: float) -> float:
    """
    Evaluate the j-th cardinal Lagrange polynomial at x (barycentric form).

    Args:
        nodeset (NodeSet): Interpolation nodes.
        j (int): Index of the cardinal polynomial.
        x (float): Point in [-1, 1].

    Returns:
        float: l_j(x).
    """
    return float(lagrange_matrix(nodeset, np.array([x]))[0, j])


def differentiation_matrix(nodeset: NodeSet) -> np.ndarray:
    nodes, bary = nodeset.nodes, nodeset.bary
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    d = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    # negative sum trick keeps the rows summing to zero
    np.fill_diagonal(d, -np.sum(d, axis=1))
    return d


def exact_mass_matrix(nodeset: NodeSet) -> np.ndarray:
    """Full mass matrix of int l_i l_j, integrated exactly with N+1 Gauss points."""
    gauss = build_node_set(nodeset.degree, NodeKind.GAUSS)
    values = lagrange_matrix(nodeset, gauss.nodes)
    return values.T @ (gauss.weights[:, None] * values)


@lru_cache(maxsize=None)
def _cached_operators(degree: int, kind: NodeKind) -> BasisOperators:
    nodeset = build_node_set(degree, kind)
    d = differentiation_matrix(nodeset)
    w = nodeset.weights
    vface = lagrange_matrix(nodeset, np.array([-1.0, 1.0]))
    vminus, vplus = vface[0], vface[1]
    dvol = (d.T * w[None, :]) / w[:, None]
    operators = BasisOperators(
        nodeset=nodeset,
        D=d,
        mass=np.diag(w),
        vface_minus=vminus,
        vface_plus=vplus,
        dvol=dvol,
        lift_minus=vminus / w,
        lift_plus=vplus / w,
    )
    for array in (d, operators.mass, vminus, vplus, dvol, operators.lift_minus, operators.lift_plus):
        array.setflags(write=False)
    return operators


def build_basis_operators(nodeset: NodeSet) -> BasisOperators:
    """
    Build the differentiation, mass and face operators of a node set.

    Args:
        nodeset (NodeSet): Node set returned by build_node_set.

    Returns:
        BasisOperators: Immutable operator bundle, shared between callers.
    """
    return _cached_operators(nodeset.degree, nodeset.kind)
