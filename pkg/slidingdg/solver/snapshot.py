"""Binary field snapshots.

Layout: one ASCII header line

    SLIDINGDG-SNAPSHOT 1 n_elem=<int> N=<int> nvar=4 t=<float>

followed by little-endian float64 states (n_elem, N+1, N+1, 4) and node
coordinates (n_elem, N+1, N+1, 2).
"""

import re
from pathlib import Path

import numpy as np

from slidingdg.errors import ConfigurationError
from slidingdg.physics.gas import NVAR

MAGIC = "SLIDINGDG-SNAPSHOT"
VERSION = 1
_HEADER = re.compile(
    rf"^{MAGIC} (?P<version>\d+) n_elem=(?P<n_elem>\d+) N=(?P<degree>\d+) nvar=(?P<nvar>\d+) t=(?P<t>\S+)$"
)
_DTYPE = np.dtype("<f8")


def write_snapshot(path: str | Path, u: np.ndarray, x: np.ndarray, t: float) -> Path:
    """
    Write states and coordinates of all elements.

    Args:
        path (str | Path): Target file, parent directories are created.
        u (np.ndarray): States (n_elem, N+1, N+1, 4).
        x (np.ndarray): Node coordinates (n_elem, N+1, N+1, 2).
        t (float): Time level.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n_elem, n = u.shape[0], u.shape[1]
    header = f"{MAGIC} {VERSION} n_elem={n_elem} N={n - 1} nvar={NVAR} t={float(t)!r}\n"
    with path.open("wb") as handle:
        handle.write(header.encode("ascii"))
        handle.write(np.ascontiguousarray(u, dtype=_DTYPE).tobytes())
        handle.write(np.ascontiguousarray(x, dtype=_DTYPE).tobytes())
    return path


def read_snapshot(path: str | Path) -> tuple[float, np.ndarray, np.ndarray]:
    """Read a snapshot back as (t, U, X)."""
    raw = Path(path).read_bytes()
    end = raw.find(b"\n")
    match = _HEADER.match(raw[:end].decode("ascii", errors="replace")) if end >= 0 else None
    if match is None or int(match["version"]) != VERSION:
        raise ConfigurationError(f"Not a version {VERSION} snapshot: {path}")
    n_elem, n = int(match["n_elem"]), int(match["degree"]) + 1
    nvar = int(match["nvar"])
    body = np.frombuffer(raw[end + 1 :], dtype=_DTYPE)
    n_u = n_elem * n * n * nvar
    if body.size != n_u + n_elem * n * n * 2:
        raise ConfigurationError(f"Snapshot {path} is truncated: {body.size} values")
    u = body[:n_u].reshape(n_elem, n, n, nvar).copy()
    x = body[n_u:].reshape(n_elem, n, n, 2).copy()
    return float(match["t"]), u, x
