"""Structured multi-band quadrilateral mesh with conforming and sliding faces."""

from dataclasses import dataclass

import numpy as np

from slidingdg.basis import NodeSet
from slidingdg.errors import ConfigurationError
from slidingdg.logger import get_logger
from slidingdg.mesh.interface import SlidingInterface
from slidingdg.mesh.spec import BoundaryKind, MeshSpec
from slidingdg.physics import GridVelocity

logger = get_logger(__name__)

# local element sides: xi = -1, xi = +1, eta = -1, eta = +1
SIDE_XI_MINUS, SIDE_XI_PLUS, SIDE_ETA_MINUS, SIDE_ETA_PLUS = range(4)
N_SIDES = 4


@dataclass(frozen=True, eq=False)
class Subdomain:
    """A band of n1 x n2 affine elements translating rigidly with one grid velocity."""

    id: int
    motion: GridVelocity
    n1: int
    n2: int
    x_left: float
    width: float
    element_offset: int

    @property
    def moving(self) -> bool:
        return self.motion.vg2 != 0.0

    @property
    def n_elements(self) -> int:
        return self.n1 * self.n2

    def element(self, row: int, col: int) -> int:
        return self.element_offset + row * self.n1 + col


@dataclass(frozen=True, eq=False)
class ElementMetrics:
    """
    Constant metric terms of affine elements.

    Attributes:
        jac (np.ndarray): Jacobian determinant per element.
        ja1 (np.ndarray): Contravariant vector J grad(xi), shape (ne, 2).
        ja2 (np.ndarray): Contravariant vector J grad(eta), shape (ne, 2).
        normals (np.ndarray): Outward unit normals per side, (ne, 4, 2).
        surf (np.ndarray): Surface Jacobian per side, (ne, 4).
        h (np.ndarray): Smallest edge length per element.
    """

    jac: np.ndarray
    ja1: np.ndarray
    ja2: np.ndarray
    normals: np.ndarray
    surf: np.ndarray
    h: np.ndarray

    def subset(self, elements: np.ndarray) -> "ElementMetrics":
        return ElementMetrics(
            jac=self.jac[elements],
            ja1=self.ja1[elements],
            ja2=self.ja2[elements],
            normals=self.normals[elements],
            surf=self.surf[elements],
            h=self.h[elements],
        )


@dataclass(frozen=True, eq=False)
class ConformingFaces:
    """
    Faces shared node-to-node by two elements; the index is the global face id.

    minus is the left/bottom element, the normal points from minus to plus.
    """

    minus_elem: np.ndarray
    minus_side: np.ndarray
    plus_elem: np.ndarray
    plus_side: np.ndarray
    normal: np.ndarray
    surf: np.ndarray
    vg_normal: np.ndarray

    @property
    def size(self) -> int:
        return int(self.minus_elem.size)


@dataclass(frozen=True, eq=False)
class BoundaryFaces:
    elem: np.ndarray
    side: np.ndarray
    normal: np.ndarray
    surf: np.ndarray
    vg_normal: np.ndarray

    @property
    def size(self) -> int:
        return int(self.elem.size)


@dataclass(eq=False)
class Mesh:
    spec: MeshSpec
    subdomains: list[Subdomain]
    corners: np.ndarray
    band: np.ndarray
    row: np.ndarray
    col: np.ndarray
    velocity: np.ndarray
    metrics: ElementMetrics
    faces: ConformingFaces
    boundary: BoundaryFaces
    interfaces: list[SlidingInterface]

    @property
    def n_elements(self) -> int:
        return int(self.band.size)

    @property
    def period(self) -> tuple[float, float]:
        return (self.spec.width, self.spec.height)

    def node_coordinates(
        self, nodeset: NodeSet, t: float = 0.0, elements: np.ndarray | None = None
    ) -> np.ndarray:
        """
        Physical node coordinates at time t, shape (ne, N+1, N+1, 2).

        Moving elements are shifted by velocity * t without wrapping.

        Args:
            nodeset (NodeSet): Interpolation nodes of every element.
            t (float): Time level.
            elements (np.ndarray | None): Global element ids, all by default.

        Returns:
            np.ndarray: Coordinates indexed [element, i (xi), j (eta), dim].
        """
        if elements is None:
            elements = np.arange(self.n_elements)
        corners = self.corners[elements]
        center = 0.5 * (corners[:, 0] + corners[:, 2])
        a = 0.5 * (corners[:, 1] - corners[:, 0])
        b = 0.5 * (corners[:, 3] - corners[:, 0])
        xi = nodeset.nodes
        coords = (
            center[:, None, None, :]
            + xi[None, :, None, None] * a[:, None, None, :]
            + xi[None, None, :, None] * b[:, None, None, :]
        )
        return coords + t * self.velocity[elements][:, None, None, :]


def compute_metrics(corners: np.ndarray) -> ElementMetrics:
    """
    Metric terms of affine quadrilaterals given corners (ne, 4, 2).

    Corners are ordered lower-left, lower-right, upper-right, upper-left.
    """
    a = 0.5 * (corners[:, 1] - corners[:, 0])
    b = 0.5 * (corners[:, 3] - corners[:, 0])
    jac = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    if np.any(jac <= 0.0):
        bad = int(np.argmin(jac))
        raise ConfigurationError(f"Element {bad} has a nonpositive Jacobian {jac[bad]}")
    ja1 = np.stack([b[:, 1], -b[:, 0]], axis=1)
    ja2 = np.stack([-a[:, 1], a[:, 0]], axis=1)
    scaled = np.stack([-ja1, ja1, -ja2, ja2], axis=1)
    surf = np.linalg.norm(scaled, axis=2)
    normals = scaled / surf[:, :, None]
    h = np.minimum(2.0 * np.linalg.norm(a, axis=1), 2.0 * np.linalg.norm(b, axis=1))
    return ElementMetrics(jac=jac, ja1=ja1, ja2=ja2, normals=normals, surf=surf, h=h)


def _validate(spec: MeshSpec) -> None:
    rows = {band.rows for band in spec.bands}
    if len(rows) != 1:
        raise ConfigurationError(
            f"Mismatched interface spacing: bands have {sorted(rows)} elements along x2, "
            "sliding interfaces need equispaced faces of one common length"
        )
    for k, band in enumerate(spec.bands):
        if band.velocity[0] != 0.0:
            raise ConfigurationError(
                f"Band {k} has grid velocity {band.velocity}; motion must be tangential "
                "to the x1 = const interfaces (vg1 = 0)"
            )
    moving = any(band.velocity[1] != 0.0 for band in spec.bands)
    if moving and spec.x2_boundary is not BoundaryKind.PERIODIC:
        raise ConfigurationError("Moving subdomains require a periodic x2 direction")


def build_mesh(spec: MeshSpec) -> Mesh:
    """
    Build elements, conforming faces, boundary faces and sliding interfaces.

    Args:
        spec (MeshSpec): Band layout, boundaries and grid velocities.

    Returns:
        Mesh: Immutable geometry plus interfaces carrying their displacement.
    """
    _validate(spec)
    n_rows = spec.bands[0].rows
    hy = spec.height / n_rows

    subdomains: list[Subdomain] = []
    corners, band_of, row_of, col_of, velocity = [], [], [], [], []
    x_left = spec.x0
    offset = 0
    for k, band in enumerate(spec.bands):
        sub = Subdomain(
            id=k,
            motion=GridVelocity(vg1=band.velocity[0], vg2=band.velocity[1]),
            n1=band.cols,
            n2=band.rows,
            x_left=x_left,
            width=band.width,
            element_offset=offset,
        )
        subdomains.append(sub)
        hx = band.width / band.cols
        for r in range(band.rows):
            for c in range(band.cols):
                xa = x_left + c * hx
                xb = x_left + (c + 1) * hx if c + 1 < band.cols else x_left + band.width
                ya = spec.y0 + r * hy
                yb = spec.y0 + (r + 1) * hy if r + 1 < n_rows else spec.y0 + spec.height
                corners.append([[xa, ya], [xb, ya], [xb, yb], [xa, yb]])
                band_of.append(k)
                row_of.append(r)
                col_of.append(c)
                velocity.append(band.velocity)
        x_left += band.width
        offset += sub.n_elements

    corners = np.asarray(corners, dtype=float)
    velocity = np.asarray(velocity, dtype=float)
    metrics = compute_metrics(corners)

    face_rows: list[tuple[int, int, int, int]] = []
    boundary_rows: list[tuple[int, int]] = []
    interfaces: list[SlidingInterface] = []

    def couple_bands(left: Subdomain, right: Subdomain) -> None:
        left_elems = np.array([left.element(r, left.n1 - 1) for r in range(n_rows)])
        right_elems = np.array([right.element(r, 0) for r in range(n_rows)])
        if left.motion == right.motion:
            for a, b in zip(left_elems, right_elems):
                face_rows.append((int(a), SIDE_XI_PLUS, int(b), SIDE_XI_MINUS))
            return
        static_is_left = left.motion.vg2 == 0.0 or right.motion.vg2 != 0.0
        static, moving = (left, right) if static_is_left else (right, left)
        interfaces.append(
            SlidingInterface(
                id=len(interfaces),
                static_band=static.id,
                moving_band=moving.id,
                static_side=SIDE_XI_PLUS if static_is_left else SIDE_XI_MINUS,
                moving_side=SIDE_XI_MINUS if static_is_left else SIDE_XI_PLUS,
                static_elements=left_elems if static_is_left else right_elems,
                moving_elements=right_elems if static_is_left else left_elems,
                l_par=hy,
                velocity=moving.motion.vg2 - static.motion.vg2,
                x1=right.x_left if right.id > left.id else spec.x0,
            )
        )

    # --- faces along x1 ---
    for k, sub in enumerate(subdomains):
        for r in range(n_rows):
            for c in range(sub.n1 - 1):
                face_rows.append((sub.element(r, c), SIDE_XI_PLUS, sub.element(r, c + 1), SIDE_XI_MINUS))
        if k + 1 < len(subdomains):
            couple_bands(sub, subdomains[k + 1])
    if spec.x1_boundary is BoundaryKind.PERIODIC:
        couple_bands(subdomains[-1], subdomains[0])
    else:
        for r in range(n_rows):
            boundary_rows.append((subdomains[0].element(r, 0), SIDE_XI_MINUS))
            boundary_rows.append((subdomains[-1].element(r, subdomains[-1].n1 - 1), SIDE_XI_PLUS))

    # --- faces along x2 ---
    for sub in subdomains:
        for c in range(sub.n1):
            for r in range(n_rows - 1):
                face_rows.append((sub.element(r, c), SIDE_ETA_PLUS, sub.element(r + 1, c), SIDE_ETA_MINUS))
            if spec.x2_boundary is BoundaryKind.PERIODIC:
                face_rows.append((sub.element(n_rows - 1, c), SIDE_ETA_PLUS, sub.element(0, c), SIDE_ETA_MINUS))
            else:
                boundary_rows.append((sub.element(0, c), SIDE_ETA_MINUS))
                boundary_rows.append((sub.element(n_rows - 1, c), SIDE_ETA_PLUS))

    face_array = np.asarray(face_rows, dtype=np.int64).reshape(-1, 4)
    minus_elem, minus_side = face_array[:, 0], face_array[:, 1]
    normal = metrics.normals[minus_elem, minus_side]
    faces = ConformingFaces(
        minus_elem=minus_elem,
        minus_side=minus_side,
        plus_elem=face_array[:, 2],
        plus_side=face_array[:, 3],
        normal=normal,
        surf=metrics.surf[minus_elem, minus_side],
        vg_normal=np.sum(velocity[minus_elem] * normal, axis=1),
    )

    boundary_array = np.asarray(boundary_rows, dtype=np.int64).reshape(-1, 2)
    b_elem, b_side = boundary_array[:, 0], boundary_array[:, 1]
    b_normal = metrics.normals[b_elem, b_side]
    boundary = BoundaryFaces(
        elem=b_elem,
        side=b_side,
        normal=b_normal,
        surf=metrics.surf[b_elem, b_side],
        vg_normal=np.sum(velocity[b_elem] * b_normal, axis=1),
    )

    mesh = Mesh(
        spec=spec,
        subdomains=subdomains,
        corners=corners,
        band=np.asarray(band_of, dtype=np.int64),
        row=np.asarray(row_of, dtype=np.int64),
        col=np.asarray(col_of, dtype=np.int64),
        velocity=velocity,
        metrics=metrics,
        faces=faces,
        boundary=boundary,
        interfaces=interfaces,
    )
    logger.info(
        f"Mesh built: {mesh.n_elements} elements in {len(subdomains)} subdomains, "
        f"{faces.size} conforming faces, {boundary.size} boundary faces, "
        f"{len(interfaces)} sliding interfaces of {n_rows} faces"
    )
    return mesh
