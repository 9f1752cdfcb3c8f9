"""Cached accessors for settings and shared services."""

from functools import lru_cache

from debias.core.config import Settings
from debias.services.protocol import ExperimentRunner


@lru_cache()
def get_settings() -> Settings:
    """Get or create the settings singleton."""
    return Settings()


@lru_cache()
def get_experiment_runner(workers: int) -> ExperimentRunner:
    """Get or create the experiment runner for a worker count."""
    return ExperimentRunner(workers=workers, penalty_constant=get_settings().penalty_constant)
