"""Analysis result models: histograms, F-CR surfaces, bias reports."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Histogram(BaseModel):
    """Equal-width histogram over [0, 1]."""
    model_config = ConfigDict(frozen=True)

    bin_edges: list[float]
    counts: list[int]

    @model_validator(mode="after")
    def check_shape(self) -> "Histogram":
        if len(self.bin_edges) != len(self.counts) + 1:
            raise ValueError("bin_edges must have exactly one more entry than counts")
        if any(b <= a for a, b in zip(self.bin_edges, self.bin_edges[1:])):
            raise ValueError("bin_edges must be strictly increasing")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        return self

    @property
    def bins(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


class GridSurface(BaseModel):
    """Mean and population std of correction percentages per (F, CR) cell.

    ``cell_mean[i][j]`` belongs to ``F_values[i]`` and ``CR_values[j]``.
    """

    group: str = ""
    F_values: list[float]
    CR_values: list[float]
    cell_mean: list[list[float]]
    cell_std: list[list[float]]

    @model_validator(mode="after")
    def check_cells(self) -> "GridSurface":
        shape = (len(self.F_values), len(self.CR_values))
        for name, cells in (("cell_mean", self.cell_mean), ("cell_std", self.cell_std)):
            if len(cells) != shape[0] or any(len(row) != shape[1] for row in cells):
                raise ValueError(f"{name} must be a {shape[0]}x{shape[1]} matrix")
        if any(not 0.0 <= v <= 1.0 for row in self.cell_mean for v in row):
            raise ValueError("cell means must lie in [0, 1]")
        return self

    def values(self, which: str) -> list[list[float]]:
        if which == "mean":
            return self.cell_mean
        if which == "std":
            return self.cell_std
        raise ValueError(f"unknown surface {which!r}, expected 'mean' or 'std'")


class DimensionTest(BaseModel):
    """KS uniformity result for one coordinate."""

    dimension: int
    D: float = Field(..., ge=0, le=1)
    p_value: float = Field(..., ge=0, le=1)
    rejected: bool
    histogram: Histogram


class BiasReport(BaseModel):
    """Per-dimension uniformity of the final best positions of a batch."""

    config_id: str
    runs: int
    alpha: float
    dimensions: list[DimensionTest]
    fraction_rejected: float = Field(..., ge=0, le=1)

    @property
    def mean_D(self) -> float:
        if not self.dimensions:
            return 0.0
        return sum(d.D for d in self.dimensions) / len(self.dimensions)


class InfeasibilityTable(BaseModel):
    """Probability that an offspring needs correction, over a p grid and several n.

    ``rows[k][i]`` is f(p_values[i], n_values[k]).
    """

    p_values: list[float]
    n_values: list[int]
    rows: list[list[float]]


class BatchSummary(BaseModel):
    """Headline numbers of a batch for tables."""

    config_id: str
    runs: int
    correction_mean: float
    correction_std: float
    fitness_min: float
    fitness_median: float
    fitness_max: float
    evaluations_mean: float
    fraction_rejected: Optional[float] = None
