"""Rank ownership of elements and the one-time exchange of interface rank maps."""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from slidingdg.errors import ConfigurationError, ProtocolError
from slidingdg.logger import get_logger
from slidingdg.mesh import Mesh
from slidingdg.parallel.transport import Endpoint

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class RankAssignment:
    """
    Element ownership for a given rank count.

    Attributes:
        n_ranks (int): Number of ranks.
        owner (np.ndarray): Owning rank per global element.
        groups (list[tuple[int, ...]]): Motion groups: subdomains sharing one
            grid velocity, in order of their first subdomain.
        group_ranks (list[list[int]]): Ranks serving each motion group.
    """

    n_ranks: int
    owner: np.ndarray
    groups: list[tuple[int, ...]]
    group_ranks: list[list[int]]

    def elements_of(self, rank: int) -> np.ndarray:
        return np.flatnonzero(self.owner == rank)


def motion_groups(mesh: Mesh) -> list[tuple[int, ...]]:
    """Subdomains grouped by grid velocity; no rank may own two groups."""
    groups: dict[tuple[float, float], list[int]] = {}
    for sub in mesh.subdomains:
        groups.setdefault((sub.motion.vg1, sub.motion.vg2), []).append(sub.id)
    return [tuple(ids) for ids in groups.values()]


def _split_ranks(loads: list[int], n_ranks: int) -> list[int]:
    # one rank per group, then each extra rank to the group with the highest load per rank
    counts = [1] * len(loads)
    for _ in range(n_ranks - len(loads)):
        best = max(range(len(loads)), key=lambda g: (loads[g] / counts[g], -g))
        counts[best] += 1
    return counts


def assign_ranks(mesh: Mesh, n_ranks: int) -> RankAssignment:
    """
    Distribute elements over ranks so no rank spans two motion groups.

    A single rank owns everything. Otherwise every motion group gets at least
    one rank, extra ranks go proportionally to element counts, and each rank
    owns a contiguous block of its group's elements in global (row-major) order.

    Args:
        mesh (Mesh): Mesh to partition.
        n_ranks (int): Number of ranks.

    Returns:
        RankAssignment: Ownership of every element.
    """
    groups = motion_groups(mesh)
    if n_ranks < 1:
        raise ConfigurationError(f"Rank count must be positive, got {n_ranks}")
    if n_ranks == 1:
        owner = np.zeros(mesh.n_elements, dtype=np.int64)
        return RankAssignment(n_ranks=1, owner=owner, groups=groups, group_ranks=[[0] for _ in groups])
    if n_ranks < len(groups):
        raise ConfigurationError(
            f"{n_ranks} ranks cannot serve {len(groups)} relatively moving subdomain groups; "
            "use one rank or at least one rank per group"
        )
    if n_ranks > mesh.n_elements:
        raise ConfigurationError(f"{n_ranks} ranks exceed the {mesh.n_elements} mesh elements")

    group_elements = [
        np.concatenate([np.flatnonzero(mesh.band == band) for band in group]) for group in groups
    ]
    counts = _split_ranks([elements.size for elements in group_elements], n_ranks)
    owner = np.full(mesh.n_elements, -1, dtype=np.int64)
    group_ranks: list[list[int]] = []
    next_rank = 0
    for elements, count in zip(group_elements, counts):
        if count > elements.size:
            raise ConfigurationError(
                f"{count} ranks requested for a subdomain group of {elements.size} elements"
            )
        ranks = list(range(next_rank, next_rank + count))
        for rank, block in zip(ranks, np.array_split(elements, count)):
            owner[block] = rank
        group_ranks.append(ranks)
        next_rank += count

    logger.info(
        f"Assigned {mesh.n_elements} elements to {n_ranks} ranks: "
        + ", ".join(f"group {g} -> ranks {r}" for g, r in zip(groups, group_ranks))
    )
    return RankAssignment(n_ranks=n_ranks, owner=owner, groups=groups, group_ranks=group_ranks)


class OwnedFace(NamedTuple):
    iface: int
    side: str
    i_par: int
    i_perp: int


@dataclass(frozen=True, eq=False)
class RankMaps:
    """
    Owning rank of every face on both sides of one interface.

    static[i_par, i_perp] and moving[i_moving, i_perp] hold ranks over one
    period of the parallel index; lookups reduce the index modulo the period.
    """

    iface: int
    static: np.ndarray
    moving: np.ndarray

    @property
    def n_faces(self) -> int:
        return int(self.static.shape[0])

    def _lookup(self, table: np.ndarray, index: int, i_perp: int, name: str) -> int:
        if not 0 <= i_perp < table.shape[1]:
            raise ProtocolError(f"Rank map {name} of interface {self.iface}: i_perp={i_perp} out of range")
        rank = int(table[index % table.shape[0], i_perp])
        if rank < 0:
            raise ProtocolError(
                f"Rank map {name} of interface {self.iface} has no owner for ({index}, {i_perp})"
            )
        return rank

    def static_rank(self, i_par: int, i_perp: int = 0) -> int:
        return self._lookup(self.static, i_par, i_perp, "static")

    def moving_rank(self, i_moving: int, i_perp: int = 0) -> int:
        return self._lookup(self.moving, i_moving, i_perp, "moving")

    def static_ranks(self) -> set[int]:
        return set(int(r) for r in np.unique(self.static) if r >= 0)

    def moving_ranks(self) -> set[int]:
        return set(int(r) for r in np.unique(self.moving) if r >= 0)


def exchange_rank_maps(
    endpoint: Endpoint,
    local_faces: Sequence[OwnedFace],
    extents: dict[int, tuple[int, int]],
) -> dict[int, RankMaps]:
    """
    Gather every rank's interface faces once and build the rank maps.

    This is the only collective of a run and happens during initialization.

    Args:
        endpoint (Endpoint): This rank's transport endpoint.
        local_faces (Sequence[OwnedFace]): Interface faces owned by this rank.
        extents (dict[int, tuple[int, int]]): (n_faces_par, n_perp) per interface.

    Returns:
        dict[int, RankMaps]: Complete maps per interface id.
    """
    if endpoint.size == 1:
        contributions = [list(local_faces)]
    else:
        contributions = endpoint.allgather([tuple(face) for face in local_faces])

    tables = {
        iface: {
            "static": np.full(extent, -1, dtype=np.int64),
            "moving": np.full(extent, -1, dtype=np.int64),
        }
        for iface, extent in extents.items()
    }
    for rank, faces in enumerate(contributions):
        for iface, side, i_par, i_perp in faces:
            table = tables[iface][side]
            if table[i_par, i_perp] >= 0:
                raise ProtocolError(
                    f"Interface {iface} {side} face ({i_par}, {i_perp}) claimed by ranks "
                    f"{table[i_par, i_perp]} and {rank}"
                )
            table[i_par, i_perp] = rank

    maps = {}
    for iface, table in tables.items():
        for side in ("static", "moving"):
            missing = np.argwhere(table[side] < 0)
            if missing.size:
                raise ProtocolError(
                    f"Interface {iface} {side} faces without owner: {missing.tolist()[:5]}"
                )
        maps[iface] = RankMaps(iface=iface, static=table["static"], moving=table["moving"])
    return maps
