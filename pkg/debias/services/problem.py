"""The f0 test problem on [0, 1]^n and the constraint-handling strategies.

f0 returns a fresh Uniform(0, 1) draw on every call, whatever the point, so an
unbiased optimiser leaves its final best solutions uniformly spread. Offspring
leaving the hypercube are handled by one of four strategies:

* penalty: infeasible points get the constant fitness c (2.0) without an f0 call
* saturation: out-of-range coordinates are clipped onto the nearest bound
* toroidal: out-of-range coordinates wrap around, ``x - floor(x)``
* dismiss: the infeasible offspring is dropped and the parent survives

Only f0 calls consume evaluation budget; penalized and dismissed points are free.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from debias.core.exceptions import ConfigurationError
from debias.models.experiment import Correction
from debias.models.population import Individual
from debias.services.rng import RngStream

DEFAULT_PENALTY = 2.0

FitnessProvider = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class Domain:
    """The closed hypercube [0, 1]^n."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"dimensionality must be at least 1, got {self.n}")

    @property
    def lower(self) -> np.ndarray:
        return np.zeros(self.n)

    @property
    def upper(self) -> np.ndarray:
        return np.ones(self.n)

    def contains(self, x: np.ndarray) -> bool:
        return is_feasible(x)

    def uniform_point(self, stream: RngStream) -> np.ndarray:
        """Point drawn coordinate by coordinate from ``stream``."""
        return stream.next_doubles(self.n)


@dataclass
class CorrectionOutcome:
    """Result of applying a correction strategy to one offspring."""

    position: np.ndarray
    was_corrected: bool
    penalized: bool = False


def is_feasible(x: np.ndarray) -> bool:
    """True when every coordinate lies in [0, 1]."""
    return bool(np.all((x >= 0.0) & (x <= 1.0)))


def f0_evaluate(x: np.ndarray, stream: RngStream) -> float:
    """f0: one uniform draw, independent of ``x``."""
    return stream.next_double()


def apply_penalty(
    x: np.ndarray,
    raw_fitness_provider: FitnessProvider,
    penalty_constant: float = DEFAULT_PENALTY,
) -> float:
    """
    Penalty fitness: the raw fitness inside the domain, the constant outside.

    Infeasible points never reach ``raw_fitness_provider``, so they consume
    neither a random draw nor evaluation budget.
    """
    if is_feasible(x):
        return raw_fitness_provider(x)
    return penalty_constant


def penalize(x: np.ndarray) -> CorrectionOutcome:
    """Penalty leaves the position alone and only marks infeasible points."""
    infeasible = not is_feasible(x)
    return CorrectionOutcome(position=x, was_corrected=infeasible, penalized=infeasible)


def saturate(x: np.ndarray) -> CorrectionOutcome:
    """Clip every coordinate onto [0, 1]."""
    corrected = not is_feasible(x)
    position = np.clip(x, 0.0, 1.0) if corrected else x
    return CorrectionOutcome(position=position, was_corrected=corrected)


def toroidal(x: np.ndarray) -> CorrectionOutcome:
    """Wrap out-of-range coordinates into [0, 1); feasible coordinates are kept.

    Excursions of more than one domain width wrap by the same modulo rule.
    """
    outside = (x < 0.0) | (x > 1.0)
    if not outside.any():
        return CorrectionOutcome(position=x, was_corrected=False)
    position = np.where(outside, x - np.floor(x), x)
    return CorrectionOutcome(position=position, was_corrected=True)


def dismiss(
    offspring: np.ndarray,
    parent: Individual,
    evaluate: FitnessProvider,
) -> Individual:
    """
    Dismiss strategy.

    Args:
        offspring: Trial position
        parent: Feasible parent with cached fitness
        evaluate: f0 evaluation for feasible offspring

    Returns:
        The evaluated offspring when feasible (selection happens afterwards),
        otherwise ``parent`` itself, with no evaluation consumed
    """
    if is_feasible(offspring):
        return Individual(position=offspring, fitness=evaluate(offspring))
    return parent


REPAIRS: dict[Correction, Callable[[np.ndarray], CorrectionOutcome]] = {
    Correction.SATURATION: saturate,
    Correction.TOROIDAL: toroidal,
}


class F0Problem:
    """f0 bound to one run's stream, counting evaluations."""

    def __init__(self, n: int, stream: RngStream, penalty_constant: float = DEFAULT_PENALTY):
        self.domain = Domain(n=n)
        self.stream = stream
        self.penalty_constant = penalty_constant
        self.evaluations = 0

    def evaluate(self, x: np.ndarray) -> float:
        self.evaluations += 1
        return f0_evaluate(x, self.stream)

    def penalized_fitness(self, x: np.ndarray) -> float:
        return apply_penalty(x, self.evaluate, self.penalty_constant)

    def repair(self, x: np.ndarray, correction: Correction) -> CorrectionOutcome:
        """Apply a repairing strategy (saturation or toroidal)."""
        try:
            return REPAIRS[correction](x)
        except KeyError:
            raise ConfigurationError(f"{correction.value} does not repair positions") from None
