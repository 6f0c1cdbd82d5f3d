from slidingdg.mesh import BandSpec, MeshSpec


def three_band_spec(cols: int = 2, rows: int = 6, size: float = 2.0, velocity: float = 1.0) -> MeshSpec:
    """Periodic square of three bands, the middle one sliding along x2."""
    width = size / 3.0
    return MeshSpec(
        height=size,
        bands=[
            BandSpec(width=width, cols=cols, rows=rows),
            BandSpec(width=width, cols=cols, rows=rows, velocity=(0.0, velocity)),
            BandSpec(width=width, cols=cols, rows=rows),
        ],
    )
