"""Experiment orchestration: manifests, run batches and their persistence.

Output layout, one directory per configuration::

    <output_dir>/<slug>/<slug>.positions.csv   runs x n final best positions
    <output_dir>/<slug>/<slug>.meta.json       config, seeds, per-run counters

where ``slug`` is the config id with ``/`` replaced by ``_``.
"""

import csv
import itertools
import json
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, Optional

from pydantic import ValidationError

from debias.core.exceptions import (
    ConfigurationError,
    ExperimentError,
    ManifestError,
    PersistenceError,
)
from debias.models.experiment import Crossover, DeConfig, ExperimentManifest, U64_MAX
from debias.models.results import BatchResult, RunRecord
from debias.services.de_core import equivalent_exponential_cr, run_de
from debias.services.problem import DEFAULT_PENALTY

logger = logging.getLogger(__name__)

POSITIONS_SUFFIX = ".positions.csv"
META_SUFFIX = ".meta.json"


def load_manifest(path: Path) -> ExperimentManifest:
    """
    Read and validate a JSON manifest.

    Raises:
        ManifestError: If the file is unreadable, not JSON, or invalid
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ManifestError(path, f"cannot read manifest: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise ManifestError(path, f"invalid JSON: {e}") from e
    try:
        return ExperimentManifest.model_validate(document)
    except ValidationError as e:
        raise ManifestError(path, f"invalid manifest: {e}") from e


def undersized_combinations(manifest: ExperimentManifest) -> list[tuple[str, int]]:
    """(scheme, NP) pairs of the manifest whose population is too small for the mutation."""
    return sorted({
        (f"DE/{mutation.value}/{crossover.value}", NP)
        for mutation, crossover in manifest.schemes
        for NP in manifest.NP_values
        if NP < mutation.min_population
    })


def expand_manifest(
    manifest: ExperimentManifest, penalty_constant: float = DEFAULT_PENALTY
) -> list[DeConfig]:
    """
    Cartesian product schemes x corrections x NP x F x CR, in that nesting order.

    Combinations whose NP is too small for the mutation (rand/2 needs 6) are
    left out with a warning. Every configuration carries the manifest's
    offspring cap and the given penalty constant.

    Raises:
        ConfigurationError: If the product is empty or a config is invalid
    """
    configs = []
    product = itertools.product(
        manifest.schemes,
        manifest.corrections,
        manifest.NP_values,
        manifest.F_values,
        manifest.CR_values,
    )
    for (mutation, crossover), correction, NP, F, CR in product:
        if NP < mutation.min_population:
            continue
        exp_cr = None
        if manifest.exp_cr_mode == "equivalent" and crossover is Crossover.EXP:
            exp_cr = equivalent_exponential_cr(CR, manifest.n)
        try:
            configs.append(
                DeConfig(
                    mutation=mutation,
                    crossover=crossover,
                    correction=correction,
                    F=F,
                    CR=CR,
                    NP=NP,
                    n=manifest.n,
                    budget=manifest.budget,
                    exp_cr=exp_cr,
                    penalty_constant=penalty_constant,
                    max_offspring=manifest.max_offspring,
                )
            )
        except ValidationError as e:
            raise ConfigurationError(
                f"invalid configuration DE/{mutation.value}/{crossover.value}"
                f"+{correction.value}+NP{NP}+F{F:g}+CR{CR:g}: {e}"
            ) from e
    for scheme, NP in undersized_combinations(manifest):
        logger.warning(f"Skipping {scheme} at NP={NP}: population too small for the mutation")
    if not configs:
        raise ConfigurationError("manifest expands to an empty set of configurations")
    return configs


def config_base_seed(base_seed: int, config_id: str) -> int:
    """Per-configuration base seed: a CRC-32 of the id mixed into the high bits."""
    return (base_seed ^ (zlib.crc32(config_id.encode("utf-8")) << 32)) & U64_MAX


def _run_one(config: DeConfig, seed: int, run_index: int) -> RunRecord:
    return run_de(config, seed, run_index=run_index)


def run_batch(
    config: DeConfig,
    runs: int,
    base_seed: int,
    executor: Optional[ProcessPoolExecutor] = None,
) -> BatchResult:
    """
    Execute ``runs`` independent runs with seeds base_seed + k.

    Args:
        config: Configuration to run
        runs: Number of runs (>= 1)
        base_seed: Seed of run 0
        executor: Optional process pool; runs execute serially without one

    Returns:
        Batch with records ordered by run index
    """
    if runs < 1:
        raise ConfigurationError(f"runs must be at least 1, got {runs}")
    seeds = [(base_seed + k) & U64_MAX for k in range(runs)]
    logger.info(f"Running {config.config_id}: {runs} runs from seed {base_seed}")
    if executor is None:
        records = [_run_one(config, seed, k) for k, seed in enumerate(seeds)]
    else:
        records = list(executor.map(_run_one, itertools.repeat(config), seeds, range(runs)))
    records.sort(key=lambda record: record.run_index)
    return BatchResult(config=config, base_seed=base_seed, records=records)


def _meta_document(result: BatchResult) -> dict:
    return {
        "config_id": result.config.config_id,
        "config": result.config.model_dump(mode="json"),
        "base_seed": result.base_seed,
        "runs": [
            {
                "run_index": record.run_index,
                "seed": record.seed,
                "final_best_fitness": record.final_best_fitness,
                "offspring_generated": record.offspring_generated,
                "offspring_corrected": record.offspring_corrected,
                "correction_percentage": record.correction_percentage,
                "evaluations_used": record.evaluations_used,
            }
            for record in result.records
        ],
    }


def persist_batch(result: BatchResult, output_dir: Path) -> list[Path]:
    """
    Write the positions CSV and metadata JSON of a batch.

    Returns:
        [positions path, metadata path]

    Raises:
        PersistenceError: On any I/O failure, naming the path
    """
    slug = result.config.slug
    config_dir = Path(output_dir) / slug
    positions_path = config_dir / f"{slug}{POSITIONS_SUFFIX}"
    meta_path = config_dir / f"{slug}{META_SUFFIX}"
    n = result.config.n

    try:
        config_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise PersistenceError(config_dir, f"cannot create directory: {e.strerror or e}") from e

    try:
        with positions_path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"dim_{d}" for d in range(n)])
            for position in result.positions:
                writer.writerow([f"{value:.17g}" for value in position])
    except OSError as e:
        raise PersistenceError(positions_path, f"cannot write positions: {e.strerror or e}") from e

    try:
        meta_path.write_text(json.dumps(_meta_document(result), indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise PersistenceError(meta_path, f"cannot write metadata: {e.strerror or e}") from e

    logger.debug(f"Persisted {result.config.config_id} to {config_dir}")
    return [positions_path, meta_path]


def read_positions(path: Path) -> list[list[float]]:
    """Rows of a positions CSV, header skipped."""
    try:
        with Path(path).open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise PersistenceError(path, f"cannot read positions: {e.strerror or e}") from e
    if not rows or not all(cell.startswith("dim_") for cell in rows[0]):
        raise PersistenceError(path, "missing dim_* header row")
    try:
        return [[float(cell) for cell in row] for row in rows[1:]]
    except ValueError as e:
        raise PersistenceError(path, f"non-numeric entry: {e}") from e


def load_batch(config_dir: Path) -> BatchResult:
    """
    Reload a persisted batch exactly.

    Raises:
        PersistenceError: If files are missing, corrupt or inconsistent
    """
    config_dir = Path(config_dir)
    meta_files = sorted(config_dir.glob(f"*{META_SUFFIX}"))
    if len(meta_files) != 1:
        raise PersistenceError(config_dir, f"expected one *{META_SUFFIX} file, found {len(meta_files)}")
    meta_path = meta_files[0]
    positions_path = meta_path.with_name(meta_path.name[: -len(META_SUFFIX)] + POSITIONS_SUFFIX)

    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except OSError as e:
        raise PersistenceError(meta_path, f"cannot read metadata: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise PersistenceError(meta_path, f"invalid JSON: {e}") from e

    positions = read_positions(positions_path)
    try:
        runs = meta["runs"]
        if len(runs) != len(positions):
            raise PersistenceError(
                positions_path, f"{len(positions)} position rows for {len(runs)} runs"
            )
        config = DeConfig.model_validate(meta["config"])
        records = [
            RunRecord(
                config_id=config.config_id,
                run_index=run["run_index"],
                seed=run["seed"],
                final_best_position=position,
                final_best_fitness=run["final_best_fitness"],
                offspring_generated=run["offspring_generated"],
                offspring_corrected=run["offspring_corrected"],
                evaluations_used=run["evaluations_used"],
            )
            for run, position in zip(runs, positions)
        ]
        return BatchResult(config=config, base_seed=meta["base_seed"], records=records)
    except (KeyError, TypeError, ValidationError) as e:
        raise PersistenceError(meta_path, f"inconsistent batch metadata: {e}") from e


def discover_batches(input_dir: Path) -> list[Path]:
    """Config directories under ``input_dir`` (recursively), sorted."""
    input_dir = Path(input_dir)
    if not input_dir.is_dir():
        raise PersistenceError(input_dir, "not a directory")
    return sorted({meta.parent for meta in input_dir.rglob(f"*{META_SUFFIX}")})


class ExperimentRunner:
    """Runs every configuration of a manifest and persists the batches."""

    def __init__(self, workers: int = 1, penalty_constant: float = DEFAULT_PENALTY):
        """
        Initialize the runner.

        Args:
            workers: Process count; 1 runs everything serially in-process
            penalty_constant: Fitness of infeasible offspring under the penalty strategy
        """
        if workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {workers}")
        self.workers = workers
        self.penalty_constant = penalty_constant
        logger.info(f"Experiment runner initialized with {workers} worker(s)")

    def run_configs(
        self,
        configs: Iterable[DeConfig],
        runs: int,
        base_seed: int,
        output_dir: Optional[Path] = None,
    ) -> list[BatchResult]:
        """
        Run (and optionally persist) a batch per configuration.

        Each configuration's batch base seed is ``config_base_seed(base_seed, id)``.
        """
        configs = list(configs)
        if runs < 1:
            raise ConfigurationError(f"runs must be at least 1, got {runs}")
        seeds = {config.config_id: config_base_seed(base_seed, config.config_id) for config in configs}
        results = []

        if self.workers == 1:
            for config in configs:
                try:
                    batch = run_batch(config, runs, seeds[config.config_id])
                except Exception as e:
                    raise ExperimentError(config.config_id, str(e)) from e
                self._finish(batch, output_dir)
                results.append(batch)
        else:
            # Every run of every configuration is queued at once; batches are
            # assembled and persisted in manifest order.
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                pending = [
                    (
                        config,
                        [
                            executor.submit(_run_one, config, (seeds[config.config_id] + k) & U64_MAX, k)
                            for k in range(runs)
                        ],
                    )
                    for config in configs
                ]
                for config, futures in pending:
                    try:
                        records = [future.result() for future in futures]
                    except Exception as e:
                        for _, others in pending:
                            for future in others:
                                future.cancel()
                        raise ExperimentError(config.config_id, str(e)) from e
                    batch = BatchResult(config=config, base_seed=seeds[config.config_id], records=records)
                    self._finish(batch, output_dir)
                    results.append(batch)

        logger.info(f"Completed {len(results)} configuration(s) x {runs} run(s)")
        return results

    @staticmethod
    def _finish(batch: BatchResult, output_dir: Optional[Path]) -> None:
        if output_dir is not None:
            persist_batch(batch, output_dir)
        logger.info(f"Finished {batch.config.config_id}")

    def run_manifest(
        self,
        manifest: ExperimentManifest,
        output_dir: Optional[Path] = None,
        persist: bool = True,
    ) -> list[BatchResult]:
        """Expand, run and persist a manifest (to ``output_dir`` or its own)."""
        configs = expand_manifest(manifest, penalty_constant=self.penalty_constant)
        target = (output_dir or manifest.output_dir) if persist else None
        return self.run_configs(configs, manifest.runs, manifest.base_seed, target)


def grid_group(config: DeConfig) -> str:
    """Id shared by the configurations of one F-CR grid (everything but F and CR)."""
    group = f"{config.scheme}+{config.correction.value}+NP{config.NP}"
    if config.exp_cr is not None:
        group += "+eqexp"
    return group


def group_batches(batches: Iterable[BatchResult]) -> dict[str, list[BatchResult]]:
    """Batches keyed by grid group, groups and members in input order."""
    groups: dict[str, list[BatchResult]] = {}
    for batch in batches:
        groups.setdefault(grid_group(batch.config), []).append(batch)
    return groups
