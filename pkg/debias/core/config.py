"""Configuration management for debias-lab."""

import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Laboratory settings, overridable through ``DEBIAS_*`` environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="DEBIAS_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Output
    out: Path = Path("results")

    # Execution
    workers: Optional[int] = Field(default=None, validate_default=True)  # None -> CPU count

    # Analysis
    alpha: float = 0.01
    bins: int = 10  # 10 bins for every histogram

    # Problem
    penalty_constant: float = 2.0

    # Plots
    marker_radius: float = 2.0
    marker_opacity: float = 0.6
    chosen_f: float = 0.1
    chosen_cr: float = 0.2

    log_level: str = "INFO"

    @field_validator("workers", mode="after")
    @classmethod
    def default_workers(cls, v: Optional[int]) -> int:
        """Fall back to the number of available CPUs."""
        if v is None:
            return os.cpu_count() or 1
        if v < 1:
            raise ValueError("workers must be at least 1")
        return v

    @field_validator("alpha")
    @classmethod
    def check_alpha(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {v}")
        return v

    @field_validator("bins")
    @classmethod
    def check_bins(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"bins must be positive, got {v}")
        return v

    @field_validator("penalty_constant")
    @classmethod
    def check_penalty_constant(cls, v: float) -> float:
        """The penalty value must be distinguishable from any f0 value."""
        if 0.0 <= v <= 1.0:
            raise ValueError(f"penalty constant must lie outside [0, 1], got {v}")
        return v

    @field_validator("log_level")
    @classmethod
    def check_log_level(cls, v: str) -> str:
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            logger.warning(f"Unknown log level {v!r}, using INFO")
            return "INFO"
        return level
