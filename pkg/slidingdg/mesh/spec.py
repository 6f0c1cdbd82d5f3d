from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator


class BoundaryKind(str, Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"


class BandSpec(BaseModel):
    """One vertical band of the mesh: a structured block moving rigidly along x2."""

    model_config = ConfigDict(frozen=True)

    width: float = Field(gt=0.0)
    cols: int = Field(ge=1)
    rows: int = Field(ge=1)
    velocity: tuple[float, float] = (0.0, 0.0)


class MeshSpec(BaseModel):
    """
    Bands laid out left to right along x1, sharing the x2 extent.

    Interfaces between bands lie on x1 = const lines; grid motion is along x2.
    """

    model_config = ConfigDict(frozen=True)

    x0: float = 0.0
    y0: float = 0.0
    height: float = Field(gt=0.0)
    bands: tuple[BandSpec, ...] = Field(min_length=1)
    x1_boundary: BoundaryKind = BoundaryKind.PERIODIC
    x2_boundary: BoundaryKind = BoundaryKind.PERIODIC
    interface_axis: Literal["x1"] = "x1"

    @field_validator("bands", mode="before")
    @classmethod
    def _as_tuple(cls, value):
        return tuple(value)

    @property
    def width(self) -> float:
        return sum(band.width for band in self.bands)

    @property
    def n_elements(self) -> int:
        return sum(band.cols * band.rows for band in self.bands)

    def refined(self, factor: int) -> "MeshSpec":
        """
        Copy of the spec with every band's element counts multiplied by factor.

        Args:
            factor (int): Refinement factor per direction.

        Returns:
            MeshSpec: Refined spec over the same geometry.
        """
        bands = tuple(
            band.model_copy(update={"cols": band.cols * factor, "rows": band.rows * factor})
            for band in self.bands
        )
        return self.model_copy(update={"bands": bands})
