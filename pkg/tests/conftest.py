"""Shared fixtures."""

from collections import deque

import numpy as np
import pytest

from debias.models.experiment import Correction, Crossover, DeConfig, Mutation
from debias.models.population import Population
from debias.models.results import BatchResult, RunRecord


class ScriptedStream:
    """Stream replaying fixed integer and double draws."""

    def __init__(self, ints=(), doubles=()):
        self.ints = deque(ints)
        self.doubles = deque(doubles)

    def next_int(self, bound: int) -> int:
        value = self.ints.popleft()
        assert 0 <= value < bound
        return value

    def next_double(self) -> float:
        return self.doubles.popleft()

    def next_doubles(self, count: int) -> np.ndarray:
        return np.array([self.doubles.popleft() for _ in range(count)])


@pytest.fixture
def scripted():
    return ScriptedStream


@pytest.fixture
def small_population():
    """Four members in two dimensions; member 2 is the best."""
    positions = np.array([
        [0.1, 0.1],
        [0.5, 0.5],
        [0.8, 0.2],
        [0.3, 0.6],
    ])
    fitness = np.array([0.9, 0.4, 0.1, 0.7])
    return Population(positions=positions, fitness=fitness)


@pytest.fixture
def make_config():
    def _make(
        mutation=Mutation.RAND_1,
        crossover=Crossover.BIN,
        correction=Correction.SATURATION,
        F=0.1,
        CR=0.2,
        NP=6,
        n=5,
        budget=300,
        **extra,
    ) -> DeConfig:
        return DeConfig(
            mutation=mutation,
            crossover=crossover,
            correction=correction,
            F=F,
            CR=CR,
            NP=NP,
            n=n,
            budget=budget,
            **extra,
        )

    return _make


@pytest.fixture
def manifest_document(tmp_path):
    """Minimal valid manifest as a dict, writing into tmp_path."""
    return {
        "schemes": [["rand/1", "bin"]],
        "corrections": ["saturation"],
        "NP_values": [6],
        "F_values": [0.1],
        "CR_values": [0.2],
        "n": 3,
        "budget_per_dim": 20,
        "runs": 5,
        "base_seed": 7,
        "output_dir": str(tmp_path / "out"),
    }


@pytest.fixture
def make_batch(make_config):
    """Synthetic batch with chosen correction counts and final positions."""

    def _make(corrected=None, positions=None, base_seed=100, **config_fields) -> BatchResult:
        if positions is None:
            positions = [[0.5] * config_fields.get("n", 5)] * len(corrected)
        if corrected is None:
            corrected = [0] * len(positions)
        config_fields["n"] = len(positions[0])
        config = make_config(**config_fields)
        records = [
            RunRecord(
                config_id=config.config_id,
                run_index=k,
                seed=base_seed + k,
                final_best_position=list(position),
                final_best_fitness=0.01 * k,
                offspring_generated=100,
                offspring_corrected=count,
                evaluations_used=config.budget,
            )
            for k, (count, position) in enumerate(zip(corrected, positions))
        ]
        return BatchResult(config=config, base_seed=base_seed, records=records)

    return _make
