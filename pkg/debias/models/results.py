"""Run and batch result models."""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from debias.models.experiment import DeConfig, U64_MAX


class RunRecord(BaseModel):
    """Outcome of one optimisation run on f0."""
    model_config = ConfigDict(frozen=True)

    config_id: str
    run_index: int = Field(0, ge=0)
    seed: int = Field(..., ge=0, le=U64_MAX)
    final_best_position: list[float]
    final_best_fitness: float
    offspring_generated: int = Field(..., ge=0)
    offspring_corrected: int = Field(..., ge=0)
    evaluations_used: int = Field(..., ge=0)

    @model_validator(mode="after")
    def check_counts(self) -> "RunRecord":
        if self.offspring_corrected > self.offspring_generated:
            raise ValueError(
                f"offspring_corrected={self.offspring_corrected} exceeds "
                f"offspring_generated={self.offspring_generated}"
            )
        return self

    @property
    def correction_percentage(self) -> float:
        """Share of generated offspring that needed a correction (0 when none)."""
        if self.offspring_generated == 0:
            return 0.0
        return self.offspring_corrected / self.offspring_generated


class BatchResult(BaseModel):
    """All runs of one configuration."""

    config: DeConfig
    base_seed: int = Field(..., ge=0, le=U64_MAX)
    records: list[RunRecord] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_records(self) -> "BatchResult":
        for k, record in enumerate(self.records):
            if record.run_index != k:
                raise ValueError(f"record {k} has run_index {record.run_index}")
            expected = (self.base_seed + k) & U64_MAX
            if record.seed != expected:
                raise ValueError(f"record {k} has seed {record.seed}, expected {expected}")
            if record.evaluations_used > self.config.budget:
                raise ValueError(f"record {k} exceeds the evaluation budget")
        return self

    @property
    def runs(self) -> int:
        return len(self.records)

    @property
    def correction_percentages(self) -> list[float]:
        return [record.correction_percentage for record in self.records]

    @property
    def positions(self) -> list[list[float]]:
        return [record.final_best_position for record in self.records]
