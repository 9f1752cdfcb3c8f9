"""Validated command-line request."""

from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, model_validator


class Verb(str, Enum):
    RUN = "run"
    GRID = "grid"
    BIAS_REPORT = "bias-report"
    PLOT = "plot"
    TABULATE = "tabulate"


class PlotKind(str, Enum):
    PARALLEL = "parallel"
    HISTGRID = "histgrid"
    HEATMAP_MEAN = "heatmap-mean"
    HEATMAP_STD = "heatmap-std"


class Command(BaseModel):
    """One verb with its inputs, output directory and overrides.

    Input paths are checked on construction, before any work starts.
    """

    verb: Verb
    manifest: Optional[Path] = None
    input: Optional[Path] = None
    out: Optional[Path] = None
    seed: Optional[int] = Field(None, ge=0, le=2**64 - 1)
    workers: int = Field(1, ge=1)
    alpha: float = Field(0.01, gt=0, lt=1)
    bins: int = Field(10, ge=1)
    plot: Optional[PlotKind] = None
    polylines: bool = False
    n_values: list[int] = Field(default_factory=lambda: [1, 5, 10, 30, 100])
    resolution: int = Field(1000, ge=2)

    @model_validator(mode="after")
    def check_inputs(self) -> "Command":
        if self.verb in (Verb.RUN, Verb.GRID):
            if self.manifest is None:
                raise ValueError(f"{self.verb.value} requires --manifest")
            if not self.manifest.is_file():
                raise ValueError(f"manifest not found: {self.manifest}")
        if self.verb in (Verb.BIAS_REPORT, Verb.PLOT):
            if self.input is None:
                raise ValueError(f"{self.verb.value} requires --input")
            if not self.input.exists():
                raise ValueError(f"input not found: {self.input}")
        if self.verb is Verb.PLOT and self.plot is None:
            raise ValueError("plot requires --plot")
        return self
