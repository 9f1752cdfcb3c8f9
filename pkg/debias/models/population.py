"""Inner-loop population types backed by numpy arrays."""

from dataclasses import dataclass

import numpy as np


@dataclass
class Individual:
    """Position in R^n with the fitness assigned at its last evaluation."""

    position: np.ndarray
    fitness: float


@dataclass
class Population:
    """NP individuals stored row-wise.

    ``best_index`` is the lowest-fitness member, ties resolved to the lowest
    index; call ``refresh_best`` after changing fitness values.
    """

    positions: np.ndarray  # shape (NP, n)
    fitness: np.ndarray  # shape (NP,)
    best_index: int = 0

    def __post_init__(self) -> None:
        if self.positions.ndim != 2 or self.fitness.shape != (self.positions.shape[0],):
            raise ValueError("positions must be (NP, n) and fitness (NP,)")
        self.refresh_best()

    @classmethod
    def from_individuals(cls, members: list[Individual]) -> "Population":
        positions = np.array([m.position for m in members], dtype=np.float64)
        fitness = np.array([m.fitness for m in members], dtype=np.float64)
        return cls(positions=positions, fitness=fitness)

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    def member(self, index: int) -> Individual:
        return Individual(position=self.positions[index].copy(), fitness=float(self.fitness[index]))

    def refresh_best(self) -> int:
        # argmin returns the first occurrence
        self.best_index = int(np.argmin(self.fitness))
        return self.best_index

    def best(self) -> Individual:
        return self.member(self.best_index)

    def copy(self) -> "Population":
        return Population(positions=self.positions.copy(), fitness=self.fitness.copy())
