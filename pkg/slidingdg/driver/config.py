"""Run configuration: INI files validated into pydantic models, plus environment defaults."""

import configparser
import os
from enum import Enum
from pathlib import Path
from typing import Annotated, Any

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from slidingdg.basis import NodeKind
from slidingdg.basis.polybasis import MAX_DEGREE, MIN_DEGREE
from slidingdg.errors import ConfigurationError
from slidingdg.mesh import BandSpec, MeshSpec
from slidingdg.physics import DensityWaveParams, FreestreamParams, GasModel, VortexParams

load_dotenv()

DEFAULT_OUTPUT_DIR = os.getenv("SLIDINGDG_OUTPUT_DIR", "results")


def max_workers() -> int | None:
    """Cap on ranks launched at once, from SLIDINGDG_MAX_WORKERS."""
    value = os.getenv("SLIDINGDG_MAX_WORKERS")
    if not value:
        return None
    try:
        cap = int(value)
    except ValueError as e:
        raise ConfigurationError(f"SLIDINGDG_MAX_WORKERS must be an integer, got {value}") from e
    if cap < 1:
        raise ConfigurationError(f"SLIDINGDG_MAX_WORKERS must be positive, got {cap}")
    return cap


class Backend(str, Enum):
    INPROC = "inproc"
    PROC = "proc"


class StudyMode(str, Enum):
    SINGLE = "single"
    CONVERGENCE = "convergence"
    SCALING = "scaling"


CaseParams = Annotated[
    VortexParams | DensityWaveParams | FreestreamParams, Field(discriminator="kind")
]


class RunConfig(BaseModel):
    """
    Everything needed to run one case.

    Either t_end or n_steps fixes the run length; either dt or cfl fixes the
    step size.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "run"
    case: CaseParams
    mesh: MeshSpec
    degree: int = Field(default=4, ge=MIN_DEGREE, le=MAX_DEGREE)
    node_kind: NodeKind = NodeKind.LOBATTO
    gas: GasModel = GasModel()
    cfl: float = Field(default=0.5, gt=0.0)
    dt: float | None = Field(default=None, gt=0.0)
    t_end: float | None = Field(default=None, gt=0.0)
    n_steps: int | None = Field(default=None, ge=1)
    n_ranks: int = Field(default=1, ge=1)
    backend: Backend = Backend.INPROC
    study: StudyMode = StudyMode.SINGLE
    output_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    write_snapshot: bool = True
    trace: bool = False
    levels: tuple[int, ...] = (1, 2, 4)
    degrees: tuple[int, ...] = ()
    rank_list: tuple[int, ...] = (1, 2, 3, 4)
    repeats: int = Field(default=5, ge=1)
    scale_steps: int = Field(default=100, ge=1)

    @field_validator("levels", "degrees", "rank_list", mode="before")
    @classmethod
    def _as_int_tuple(cls, value: Any) -> tuple[int, ...]:
        if isinstance(value, str):
            value = [v for v in value.replace(",", " ").split() if v]
        return tuple(int(v) for v in value)

    @field_validator("degrees")
    @classmethod
    def _supported_degrees(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        for degree in value:
            if not MIN_DEGREE <= degree <= MAX_DEGREE:
                raise ValueError(f"Degree {degree} outside [{MIN_DEGREE}, {MAX_DEGREE}]")
        return value

    @model_validator(mode="after")
    def _run_length(self) -> "RunConfig":
        if self.t_end is None and self.n_steps is None:
            raise ValueError("Either t_end or n_steps must be given")
        return self

    def with_overrides(self, **updates: Any) -> "RunConfig":
        """Validated copy with the non-None updates applied."""
        values = self.model_dump()
        values.update({key: value for key, value in updates.items() if value is not None})
        return validate_config(values)


def validate_config(values: dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid run configuration: {e}") from e


def _split_list(value: str) -> str | list[str]:
    if "," in value:
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _section(parser: configparser.ConfigParser, name: str) -> dict[str, Any]:
    if not parser.has_section(name):
        return {}
    return {key: _split_list(value) for key, value in parser.items(name)}


def load_config(path: str | Path) -> RunConfig:
    """
    Parse an INI run file.

    Sections: [run] (case, degree, node_kind, cfl, dt, t_end, n_steps, ranks,
    backend, study), [mesh] (x0, y0, height, x1_boundary, x2_boundary),
    [band.<k>] (width, cols, rows, velocity), [gas], [case] (parameters of the
    case), [output] (directory, snapshot, trace), [converge] (levels, degrees)
    and [scale] (ranks, repeats, steps).

    Args:
        path (str | Path): Configuration file.

    Returns:
        RunConfig: Validated configuration.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Configuration file not found: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read(path)
    except configparser.Error as e:
        raise ConfigurationError(f"Cannot parse {path}: {e}") from e

    run = _section(parser, "run")
    case_kind = run.pop("case", None)
    if case_kind is None:
        raise ConfigurationError(f"{path}: [run] needs a case")
    band_sections = sorted(
        (s for s in parser.sections() if s.startswith("band.")),
        key=lambda s: int(s.split(".", 1)[1]),
    )
    if not band_sections:
        raise ConfigurationError(f"{path}: at least one [band.<k>] section is required")
    try:
        bands = [BandSpec.model_validate(_section(parser, s)) for s in band_sections]
    except ValidationError as e:
        raise ConfigurationError(f"Invalid band in {path}: {e}") from e
    output = _section(parser, "output")
    converge = _section(parser, "converge")
    scale = _section(parser, "scale")

    values: dict[str, Any] = {
        "name": run.pop("name", path.stem),
        "case": {"kind": case_kind, **_section(parser, "case")},
        "mesh": {**_section(parser, "mesh"), "bands": bands},
        "gas": _section(parser, "gas"),
        **run,
    }
    if "ranks" in values:
        values["n_ranks"] = values.pop("ranks")
    if "directory" in output:
        values["output_dir"] = output["directory"]
    if "snapshot" in output:
        values["write_snapshot"] = output["snapshot"]
    if "trace" in output:
        values["trace"] = output["trace"]
    if "levels" in converge:
        values["levels"] = converge["levels"]
    if "degrees" in converge:
        values["degrees"] = converge["degrees"]
    if "ranks" in scale:
        values["rank_list"] = scale["ranks"]
    if "repeats" in scale:
        values["repeats"] = scale["repeats"]
    if "steps" in scale:
        values["scale_steps"] = scale["steps"]
    return validate_config(values)
