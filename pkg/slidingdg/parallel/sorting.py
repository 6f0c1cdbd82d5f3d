"""Mortar index arrays: which partner each local mortar talks to, and in what order.

Every rank sorts its mortars by (interface, partner rank, i_par, i_perp, i_sub).
The key is universal, so the two ranks on either side of a mortar list the
mortars they share in the same order without telling each other anything.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from slidingdg.errors import ProtocolError
from slidingdg.logger import get_logger
from slidingdg.mortar import MortarSide, moving_index, static_index
from slidingdg.parallel.ranks import RankMaps

logger = get_logger(__name__)

MORTAR_DTYPE = np.dtype(
    [
        ("iface", np.int64),
        ("partner", np.int64),
        ("i_par", np.int64),
        ("i_perp", np.int64),
        ("i_sub", np.int64),
        ("i_face", np.int64),
    ]
)
SORT_KEYS = ["iface", "partner", "i_par", "i_perp", "i_sub"]


class LocalFace(NamedTuple):
    """
    An interface face owned by this rank.

    i_par is the static parallel index for static faces and the moving index
    for moving faces; i_face is the rank-local face number of the role.
    """

    i_par: int
    i_perp: int
    i_face: int


@dataclass(frozen=True, eq=False)
class MappingM:
    """
    Inverse of the last two columns of A: table[i_sub, i_face - face_offset] = i_mortar.
    """

    table: np.ndarray
    face_offset: int = 0

    def __call__(self, i_sub: int, i_face: int) -> int:
        return int(self.table[i_sub, i_face - self.face_offset])

    @property
    def n_faces(self) -> int:
        return int(self.table.shape[1])


def sort_index_array(entries: np.ndarray) -> np.ndarray:
    """Sort mortars by the universal key; keys are unique, stability is irrelevant."""
    order = np.argsort(entries, order=SORT_KEYS, kind="quicksort")
    return entries[order]


def build_mapping(index_array: np.ndarray) -> MappingM:
    """
    Derive m from a sorted index array.

    Args:
        index_array (np.ndarray): Sorted entries of MORTAR_DTYPE.

    Returns:
        MappingM: Position of every (i_sub, i_face) pair in the array.
    """
    if index_array.size == 0:
        return MappingM(table=np.zeros((2, 0), dtype=np.int64))
    offset = int(index_array["i_face"].min())
    n_faces = int(index_array["i_face"].max()) - offset + 1
    table = np.full((2, n_faces), -1, dtype=np.int64)
    for position, entry in enumerate(index_array):
        slot = (int(entry["i_sub"]), int(entry["i_face"]) - offset)
        if table[slot] >= 0:
            raise ProtocolError(f"Mortar (i_sub={slot[0]}, i_face={slot[1] + offset}) listed twice")
        table[slot] = position
    if np.any(table < 0):
        raise ProtocolError("Index array does not cover both mortars of every face")
    return MappingM(table=table, face_offset=offset)


def rebuild_index_arrays(
    faces: Sequence[LocalFace],
    maps: RankMaps,
    n_delta: int,
    role: MortarSide | str,
) -> tuple[np.ndarray, MappingM]:
    """
    Build the sorted index array A and the mapping m of one interface.

    Static faces look their partners up in the moving rank map through the
    moving index of each mortar, moving faces look theirs up in the static map
    through the static index. Called at initialization and whenever n_delta
    changes.

    Args:
        faces (Sequence[LocalFace]): Interface faces this rank owns in the role.
        maps (RankMaps): Rank maps of the interface.
        n_delta (int): Whole faces surpassed by the moving side.
        role (MortarSide | str): "static" (primary) or "moving" (replica).

    Returns:
        tuple[np.ndarray, MappingM]: A as a structured array, and m.
    """
    role = MortarSide(role)
    n_faces = maps.n_faces
    entries = np.empty(2 * len(faces), dtype=MORTAR_DTYPE)
    k = 0
    for face in faces:
        for i_sub in (0, 1):
            if role is MortarSide.STATIC:
                i_par = face.i_par
                partner = maps.moving_rank(moving_index(i_par, n_delta, i_sub, n_faces), face.i_perp)
            else:
                i_par = static_index(face.i_par, n_delta, i_sub, n_faces)
                partner = maps.static_rank(i_par, face.i_perp)
            entries[k] = (maps.iface, partner, i_par, face.i_perp, i_sub, face.i_face)
            k += 1
    index_array = sort_index_array(entries)
    return index_array, build_mapping(index_array)


def combine_index_arrays(parts: Sequence[np.ndarray]) -> np.ndarray:
    """
    Concatenate per-interface index arrays in interface order.

    The interface id is the outermost key, so the result is sorted as a whole.
    """
    if not parts:
        return np.empty(0, dtype=MORTAR_DTYPE)
    combined = np.concatenate(parts)
    if combined.size and np.any(np.diff(combined["iface"]) < 0):
        raise ProtocolError("Index arrays must be combined in ascending interface order")
    return combined
