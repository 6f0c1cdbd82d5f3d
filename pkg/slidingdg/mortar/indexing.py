"""Index algebra linking static faces, mortars and moving faces."""

from dataclasses import dataclass


def sub_index(xi_offset: float, s_delta: float, l_par: float) -> int:
    """
    Mortar sub-index of a point on a static face.

    Args:
        xi_offset (float): Distance from the face start along x2, in [0, l_par).
        s_delta (float): Surpassed face fraction.
        l_par (float): Face length.

    Returns:
        int: 0 below the hanging node, 1 from it on.
    """
    return 0 if xi_offset < s_delta * l_par else 1


def moving_index(i_par: int, n_delta: int, i_sub: int, n_faces: int) -> int:
    """
    Moving-side face index adjacent to static mortar (i_par, i_sub).

    Args:
        i_par (int): Static parallel face index.
        n_delta (int): Whole faces surpassed by the moving side.
        i_sub (int): Mortar sub-index, 0 or 1.
        n_faces (int): Faces along the interface (period of the indices).

    Returns:
        int: (i_par - n_delta + i_sub - 1) mod n_faces.
    """
    return (i_par - n_delta + i_sub - 1) % n_faces


def static_index(i_moving: int, n_delta: int, i_sub: int, n_faces: int) -> int:
    """Inverse of moving_index for a fixed i_sub."""
    return (i_moving + n_delta - i_sub + 1) % n_faces


@dataclass(frozen=True)
class MortarIndex:
    i_par: int
    i_perp: int
    i_sub: int

    def moving(self, n_delta: int, n_faces: int) -> int:
        return moving_index(self.i_par, n_delta, self.i_sub, n_faces)
