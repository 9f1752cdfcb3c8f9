"""Algorithm configuration and experiment manifest models."""

from enum import Enum
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

U64_MAX = 2**64 - 1


class Mutation(str, Enum):
    """DE mutation schemes, named base/number-of-differences."""
    RAND_1 = "rand/1"
    RAND_2 = "rand/2"
    BEST_1 = "best/1"
    CURRENT_TO_BEST_1 = "current-to-best/1"

    @property
    def min_population(self) -> int:
        """Smallest NP that leaves enough distinct donor indices."""
        return 6 if self is Mutation.RAND_2 else 4


class Crossover(str, Enum):
    """Crossover operators."""
    BIN = "bin"
    EXP = "exp"


class Correction(str, Enum):
    """Strategies for offspring leaving the [0, 1]^n domain."""
    PENALTY = "penalty"
    SATURATION = "saturation"
    TOROIDAL = "toroidal"
    DISMISS = "dismiss"


class DeConfig(BaseModel):
    """One DE configuration: operators, control parameters and budget."""
    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "mutation": "current-to-best/1",
                "crossover": "bin",
                "correction": "saturation",
                "F": 0.1,
                "CR": 0.2,
                "NP": 20,
                "n": 30,
                "budget": 300000,
            }
        },
    )

    mutation: Mutation
    crossover: Crossover
    correction: Correction
    F: float = Field(..., gt=0, le=2, description="Scale factor")
    CR: float = Field(..., ge=0, le=1, description="Crossover rate")
    NP: int = Field(..., description="Population size")
    n: int = Field(..., ge=1, description="Dimensionality")
    budget: int = Field(..., description="Maximum number of f0 evaluations")
    penalty_constant: float = Field(2.0, description="Fitness assigned to infeasible points")
    exp_cr: Optional[float] = Field(
        None, gt=0, le=1, description="Rate used by the exp crossover instead of CR"
    )
    max_offspring: Optional[int] = Field(None, ge=0, description="Optional cap on offspring generated")

    @field_validator("penalty_constant")
    @classmethod
    def penalty_outside_unit_interval(cls, v: float) -> float:
        if 0.0 <= v <= 1.0:
            raise ValueError(f"penalty constant must lie outside [0, 1], got {v}")
        return v

    @model_validator(mode="after")
    def check_sizes(self) -> "DeConfig":
        if self.NP < self.mutation.min_population:
            raise ValueError(
                f"NP={self.NP} too small for DE/{self.mutation.value}: "
                f"needs at least {self.mutation.min_population}"
            )
        if self.budget < self.NP:
            raise ValueError(
                f"budget below initialization cost: budget={self.budget} < NP={self.NP}"
            )
        return self

    @property
    def effective_cr(self) -> float:
        """Crossover rate actually handed to the crossover operator."""
        if self.crossover is Crossover.EXP and self.exp_cr is not None:
            return self.exp_cr
        return self.CR

    @property
    def scheme(self) -> str:
        return f"DE/{self.mutation.value}/{self.crossover.value}"

    @property
    def config_id(self) -> str:
        """Stable identifier, e.g. ``DE/rand/1/bin+penalty+NP20+F0.1+CR0.2``."""
        config_id = (
            f"{self.scheme}+{self.correction.value}"
            f"+NP{self.NP}+F{self.F:g}+CR{self.CR:g}"
        )
        if self.crossover is Crossover.EXP and self.exp_cr is not None:
            config_id += f"+CRexp{self.exp_cr:.4g}"
        return config_id

    @property
    def slug(self) -> str:
        """File-system safe form of the config id."""
        return self.config_id.replace("/", "_")


class ExperimentManifest(BaseModel):
    """Grid of configurations plus run count, seeding and output location."""
    model_config = ConfigDict(extra="forbid")

    schemes: list[tuple[Mutation, Crossover]] = Field(..., min_length=1)
    corrections: list[Correction] = Field(..., min_length=1)
    NP_values: list[int] = Field(..., min_length=1)
    F_values: list[float] = Field(..., min_length=1)
    CR_values: list[float] = Field(..., min_length=1)
    n: int = Field(..., ge=1)
    budget_per_dim: int = Field(..., ge=1)
    runs: int = Field(..., ge=1)
    base_seed: int = Field(..., ge=0, le=U64_MAX)
    output_dir: Path
    exp_cr_mode: Literal["raw", "equivalent"] = "raw"
    max_offspring_per_dim: Optional[int] = Field(
        None, ge=1, description="Cap on offspring generated per run, per dimension"
    )

    @property
    def budget(self) -> int:
        return self.budget_per_dim * self.n

    @property
    def max_offspring(self) -> Optional[int]:
        """Per-run offspring cap, or None when runs stop on the budget alone."""
        if self.max_offspring_per_dim is None:
            return None
        return self.max_offspring_per_dim * self.n

    @model_validator(mode="after")
    def check_budget(self) -> "ExperimentManifest":
        if self.budget < max(self.NP_values):
            raise ValueError(
                f"budget {self.budget} (= {self.budget_per_dim} x {self.n}) "
                f"below largest NP {max(self.NP_values)}"
            )
        return self
