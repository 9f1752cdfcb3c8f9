"""Differential Evolution engine.

Mutations (x_best is the population best, frozen for the whole generation):

* rand/1:            x_r1 + F (x_r2 - x_r3)
* rand/2:            x_r1 + F (x_r2 - x_r3) + F (x_r4 - x_r5)
* best/1:            x_best + F (x_r1 - x_r2)
* current-to-best/1: x_i + F (x_best - x_i) + F (x_r1 - x_r2)

Donor indices are mutually distinct and never equal the target index (nor
the best index for the best-based schemes). Crossover is binomial (one
forced coordinate plus independent exchanges with probability CR) or
exponential (a cyclic burst that continues while draws stay below CR).
Selection is one-to-one spawning; the offspring wins ties.

Random draws per offspring, in order: donor indices, crossover draws, then
one f0 draw if the offspring is evaluated. With shared seeds this makes the
penalty and dismiss strategies produce identical runs.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from debias.core.exceptions import ConfigurationError, DomainError
from debias.models.experiment import Correction, Crossover, DeConfig, Mutation
from debias.models.population import Individual, Population
from debias.models.results import RunRecord
from debias.services.problem import F0Problem, dismiss, is_feasible
from debias.services.rng import RngStream

logger = logging.getLogger(__name__)


class Stream(Protocol):
    """Random source used by the operators."""

    def next_int(self, bound: int) -> int: ...

    def next_double(self) -> float: ...

    def next_doubles(self, count: int) -> np.ndarray: ...


def sample_distinct(
    stream: Stream,
    population_size: int,
    count: int,
    exclude: Sequence[int] = (),
) -> list[int]:
    """Draw ``count`` distinct indices in [0, population_size) avoiding ``exclude``."""
    forbidden = set(exclude)
    if population_size - len(forbidden) < count:
        raise ConfigurationError(
            f"cannot draw {count} distinct indices from NP={population_size} "
            f"excluding {sorted(forbidden)}"
        )
    chosen: list[int] = []
    while len(chosen) < count:
        index = stream.next_int(population_size)
        if index in forbidden:
            continue
        forbidden.add(index)
        chosen.append(index)
    return chosen


def mutate_rand_1(pop: Population, target_index: int, F: float, stream: Stream) -> np.ndarray:
    """x_r1 + F (x_r2 - x_r3) with three donors distinct from the target."""
    r1, r2, r3 = sample_distinct(stream, pop.size, 3, (target_index,))
    x = pop.positions
    return x[r1] + F * (x[r2] - x[r3])


def mutate_rand_2(pop: Population, target_index: int, F: float, stream: Stream) -> np.ndarray:
    """Two scaled difference vectors around x_r1; needs five donors."""
    r1, r2, r3, r4, r5 = sample_distinct(stream, pop.size, 5, (target_index,))
    x = pop.positions
    return x[r1] + F * (x[r2] - x[r3]) + F * (x[r4] - x[r5])


def mutate_best_1(pop: Population, target_index: int, F: float, stream: Stream) -> np.ndarray:
    """x_best + F (x_r1 - x_r2); donors avoid both the target and the best."""
    best = pop.best_index
    r1, r2 = sample_distinct(stream, pop.size, 2, (target_index, best))
    x = pop.positions
    return x[best] + F * (x[r1] - x[r2])


def mutate_current_to_best_1(
    pop: Population, target_index: int, F: float, stream: Stream
) -> np.ndarray:
    """
    Move the target towards the best, plus one difference vector.

    Args:
        pop: Population of the previous generation
        target_index: Index of the individual being varied
        F: Scale factor, used for both terms
        stream: Random source for the donor indices

    Returns:
        x_i + F (x_best - x_i) + F (x_r1 - x_r2)
    """
    best = pop.best_index
    r1, r2 = sample_distinct(stream, pop.size, 2, (target_index, best))
    x = pop.positions
    current = x[target_index]
    return current + F * (x[best] - current) + F * (x[r1] - x[r2])


def crossover_binomial(
    target: np.ndarray, mutant: np.ndarray, CR: float, stream: Stream
) -> np.ndarray:
    """Binomial crossover with one forced coordinate ``j_rand``.

    Draws ``j_rand`` first, then one uniform per coordinate (``j_rand``
    included, so consumption does not depend on where it falls).
    """
    n = target.shape[0]
    j_rand = stream.next_int(n)
    take = stream.next_doubles(n) < CR
    take[j_rand] = True
    return np.where(take, mutant, target)


def crossover_exponential(
    target: np.ndarray, mutant: np.ndarray, CR: float, stream: Stream
) -> np.ndarray:
    """Exponential crossover: a cyclic burst of mutant coordinates.

    The burst starts at a uniform index, always copies that coordinate and
    extends while successive draws are below CR, up to n coordinates.
    """
    n = target.shape[0]
    offspring = target.copy()
    j = stream.next_int(n)
    length = 0
    while True:
        offspring[j] = mutant[j]
        length += 1
        j = (j + 1) % n
        if length >= n or stream.next_double() >= CR:
            break
    return offspring


def equivalent_exponential_cr(CR_bin: float, n: int) -> float:
    """
    Exp crossover rate exchanging as many coordinates on average as bin with CR_bin.

    Returns:
        2 ** (-1 / (n * CR_bin))

    Raises:
        DomainError: If CR_bin <= 0 (undefined equivalence) or n < 1
    """
    if CR_bin <= 0:
        raise DomainError(f"undefined equivalence for CR_bin={CR_bin}")
    if n < 1:
        raise DomainError(f"dimensionality must be at least 1, got {n}")
    return 2.0 ** (-1.0 / (n * CR_bin))


def select_one_to_one(parent: Individual, offspring: Individual) -> Individual:
    """Offspring replaces its parent unless strictly worse."""
    return offspring if offspring.fitness <= parent.fitness else parent


MutationOperator = Callable[[Population, int, float, Stream], np.ndarray]
CrossoverOperator = Callable[[np.ndarray, np.ndarray, float, Stream], np.ndarray]

MUTATIONS: dict[Mutation, MutationOperator] = {
    Mutation.RAND_1: mutate_rand_1,
    Mutation.RAND_2: mutate_rand_2,
    Mutation.BEST_1: mutate_best_1,
    Mutation.CURRENT_TO_BEST_1: mutate_current_to_best_1,
}

CROSSOVERS: dict[Crossover, CrossoverOperator] = {
    Crossover.BIN: crossover_binomial,
    Crossover.EXP: crossover_exponential,
}


@dataclass
class RunState:
    """Final state of one run, including the whole population."""

    population: Population
    seed: int
    generations: int
    offspring_generated: int
    offspring_corrected: int
    evaluations_used: int


GenerationCallback = Callable[[int, Population], None]


class DifferentialEvolution:
    """Runs one DE configuration on f0."""

    def __init__(self, config: DeConfig):
        """
        Bind the engine to a configuration.

        Raises:
            ConfigurationError: If the budget does not cover initialization
        """
        if config.budget < config.NP:
            raise ConfigurationError(
                f"budget below initialization cost: budget={config.budget} < NP={config.NP}"
            )
        self.config = config
        self._mutate = MUTATIONS[config.mutation]
        self._crossover = CROSSOVERS[config.crossover]

    def initialize(self, problem: F0Problem) -> Population:
        """NP uniform points, each drawn then evaluated before the next one."""
        n, size = self.config.n, self.config.NP
        positions = np.empty((size, n))
        fitness = np.empty(size)
        for k in range(size):
            positions[k] = problem.domain.uniform_point(problem.stream)
            fitness[k] = problem.evaluate(positions[k])
        return Population(positions=positions, fitness=fitness)

    def evolve(self, seed: int, on_generation: Optional[GenerationCallback] = None) -> RunState:
        """
        Run until the evaluation budget is spent or ``max_offspring`` offspring exist.

        Generations are synchronous: donors and the best index come from the
        previous generation. A generation cut short by the budget is merged
        as it stands.

        Args:
            seed: 64-bit seed of the run's stream
            on_generation: Called with (generation, population) after each
                generation that produced offspring

        Returns:
            Final run state
        """
        config = self.config
        stream = RngStream(seed)
        problem = F0Problem(config.n, stream, penalty_constant=config.penalty_constant)
        pop = self.initialize(problem)

        F, CR = config.F, config.effective_cr
        correction = config.correction
        generated = corrected = generation = 0
        exhausted = False

        while not exhausted:
            offspring_pop = pop.copy()
            produced = 0
            for i in range(config.NP):
                if problem.evaluations >= config.budget or (
                    config.max_offspring is not None and generated >= config.max_offspring
                ):
                    exhausted = True
                    break

                target = pop.positions[i]
                mutant = self._mutate(pop, i, F, stream)
                trial = self._crossover(target, mutant, CR, stream)
                generated += 1
                produced += 1
                if not is_feasible(trial):
                    corrected += 1

                parent = Individual(position=target, fitness=float(pop.fitness[i]))
                if correction is Correction.DISMISS:
                    candidate = dismiss(trial, parent, problem.evaluate)
                elif correction is Correction.PENALTY:
                    candidate = Individual(position=trial, fitness=problem.penalized_fitness(trial))
                else:
                    repaired = problem.repair(trial, correction).position
                    candidate = Individual(position=repaired, fitness=problem.evaluate(repaired))

                survivor = select_one_to_one(parent, candidate)
                offspring_pop.positions[i] = survivor.position
                offspring_pop.fitness[i] = survivor.fitness

            pop = offspring_pop
            pop.refresh_best()
            if produced:
                generation += 1
                if on_generation is not None:
                    on_generation(generation, pop)

        logger.debug(
            f"{config.config_id} seed={seed}: {generation} generations, "
            f"{generated} offspring, {corrected} corrected, {problem.evaluations} evaluations"
        )
        return RunState(
            population=pop,
            seed=seed,
            generations=generation,
            offspring_generated=generated,
            offspring_corrected=corrected,
            evaluations_used=problem.evaluations,
        )

    def run(self, seed: int, run_index: int = 0) -> RunRecord:
        state = self.evolve(seed)
        best = state.population.best()
        return RunRecord(
            config_id=self.config.config_id,
            run_index=run_index,
            seed=seed,
            final_best_position=best.position.tolist(),
            final_best_fitness=best.fitness,
            offspring_generated=state.offspring_generated,
            offspring_corrected=state.offspring_corrected,
            evaluations_used=state.evaluations_used,
        )


def run_de(config: DeConfig, seed: int, run_index: int = 0) -> RunRecord:
    """Run one configuration from ``seed`` and summarise the outcome."""
    return DifferentialEvolution(config).run(seed, run_index=run_index)
