"""Numerical analysis of batches.

Covers the probability that an offspring needs correction, histograms of
correction percentages, F-CR grid surfaces, and per-dimension
Kolmogorov-Smirnov uniformity tests of final best positions.
"""

import logging
import math
from collections.abc import Sequence
from typing import Iterable

import numpy as np
from scipy.special import kolmogorov
from scipy.stats import kstest

from debias.core.exceptions import (
    DomainError,
    IncompleteGridError,
    InsufficientDataError,
)
from debias.models.analysis import (
    BatchSummary,
    BiasReport,
    DimensionTest,
    GridSurface,
    Histogram,
    InfeasibilityTable,
)
from debias.models.results import BatchResult

logger = logging.getLogger(__name__)

DEFAULT_BINS = 10
MIN_KS_SAMPLES = 5

GridCell = tuple[float, float]


def infeasibility_probability(p: float, n: int) -> float:
    """
    Probability that at least one of n coordinates leaves the domain.

    Args:
        p: Per-coordinate probability of leaving the domain
        n: Dimensionality

    Returns:
        1 - (1 - p)^n

    Raises:
        DomainError: If p is outside [0, 1] or n < 1
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    return 1.0 - (1.0 - p) ** n


def tabulate_infeasibility(n_values: Sequence[int], p_resolution: int) -> InfeasibilityTable:
    """f(p, n) over ``p_resolution`` evenly spaced p in [0, 1], one row per n."""
    if p_resolution < 2:
        raise DomainError(f"p_resolution must be at least 2, got {p_resolution}")
    if not n_values:
        raise DomainError("n_values must not be empty")
    p_grid = np.linspace(0.0, 1.0, p_resolution)
    rows = [[infeasibility_probability(float(p), n) for p in p_grid] for n in n_values]
    return InfeasibilityTable(p_values=p_grid.tolist(), n_values=list(n_values), rows=rows)


def build_histogram(values: Iterable[float], bins: int = DEFAULT_BINS) -> Histogram:
    """
    Equal-width histogram over [0, 1]; the last bin is closed so 1.0 is counted.

    Raises:
        DomainError: If a value lies outside [0, 1] or bins < 1
    """
    if bins < 1:
        raise DomainError(f"bins must be positive, got {bins}")
    data = np.asarray(list(values), dtype=np.float64)
    if data.size and (np.any(data < 0.0) or np.any(data > 1.0) or np.any(np.isnan(data))):
        bad = data[(data < 0.0) | (data > 1.0) | np.isnan(data)][0]
        raise DomainError(f"histogram value {bad} outside [0, 1]")
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(data, bins=edges)
    return Histogram(bin_edges=edges.tolist(), counts=counts.astype(int).tolist())


def _index_grid(batches: Iterable[BatchResult], what: str) -> tuple[list[float], list[float], dict]:
    """Map (F, CR) -> batch, checking each cell of the product appears once."""
    cells: dict[GridCell, BatchResult] = {}
    for batch in batches:
        key = (batch.config.F, batch.config.CR)
        if key in cells:
            raise DomainError(f"duplicate {what} cell (F={key[0]:g}, CR={key[1]:g})")
        cells[key] = batch
    if not cells:
        raise InsufficientDataError(f"no batches for {what}")
    F_values = sorted({f for f, _ in cells})
    CR_values = sorted({cr for _, cr in cells})
    missing = [(f, cr) for f in F_values for cr in CR_values if (f, cr) not in cells]
    if missing:
        raise IncompleteGridError(missing, what=what)
    return F_values, CR_values, cells


def aggregate_grid(batches: Iterable[BatchResult], group: str = "") -> GridSurface:
    """
    Mean and population std of correction percentages for every (F, CR) cell.

    Raises:
        IncompleteGridError: If the F x CR product has missing cells
    """
    F_values, CR_values, cells = _index_grid(batches, "grid")
    means, stds = [], []
    for f in F_values:
        mean_row, std_row = [], []
        for cr in CR_values:
            percentages = np.asarray(cells[(f, cr)].correction_percentages)
            mean_row.append(float(np.mean(percentages)))
            std_row.append(float(np.std(percentages)))  # ddof=0
        means.append(mean_row)
        stds.append(std_row)
    return GridSurface(
        group=group, F_values=F_values, CR_values=CR_values, cell_mean=means, cell_std=stds
    )


def correction_histograms(
    batches: Iterable[BatchResult], bins: int = DEFAULT_BINS
) -> dict[GridCell, Histogram]:
    """One histogram of per-run correction percentages per (F, CR) cell."""
    _, _, cells = _index_grid(batches, "histogram grid")
    return {
        key: build_histogram(batch.correction_percentages, bins=bins)
        for key, batch in sorted(cells.items())
    }


def ks_statistic(values: Sequence[float]) -> float:
    """sup |F_emp(x) - x| against Uniform(0, 1)."""
    return float(kstest(np.asarray(values, dtype=np.float64), "uniform").statistic)


def uniformity_test(values: Sequence[float]) -> tuple[float, float]:
    """
    One-sample Kolmogorov-Smirnov test against Uniform(0, 1).

    The p-value is the asymptotic Kolmogorov survival function evaluated at
    (sqrt(m) + 0.12 + 0.11 / sqrt(m)) * D, which stays accurate for small m.

    Returns:
        (D, p_value)

    Raises:
        InsufficientDataError: If fewer than 5 values are given
    """
    if len(values) < MIN_KS_SAMPLES:
        raise InsufficientDataError(
            f"uniformity test needs at least {MIN_KS_SAMPLES} values, got {len(values)}"
        )
    D = ks_statistic(values)
    root_m = math.sqrt(len(values))
    p_value = float(kolmogorov((root_m + 0.12 + 0.11 / root_m) * D))
    return D, min(max(p_value, 0.0), 1.0)


def bias_report(batch: BatchResult, alpha: float, bins: int = DEFAULT_BINS) -> BiasReport:
    """
    Test every coordinate of the final best positions for uniformity.

    Raises:
        InsufficientDataError: If the batch has fewer than 5 runs
        DomainError: If alpha is outside (0, 1)
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if batch.runs < MIN_KS_SAMPLES:
        raise InsufficientDataError(
            f"{batch.config.config_id}: bias report needs at least {MIN_KS_SAMPLES} runs, "
            f"got {batch.runs}"
        )
    positions = np.asarray(batch.positions, dtype=np.float64)
    dimensions = []
    for d in range(positions.shape[1]):
        column = positions[:, d]
        D, p_value = uniformity_test(column)
        dimensions.append(
            DimensionTest(
                dimension=d,
                D=D,
                p_value=p_value,
                rejected=p_value < alpha,
                histogram=build_histogram(column, bins=bins),
            )
        )
    rejected = sum(1 for test in dimensions if test.rejected)
    report = BiasReport(
        config_id=batch.config.config_id,
        runs=batch.runs,
        alpha=alpha,
        dimensions=dimensions,
        fraction_rejected=rejected / len(dimensions),
    )
    logger.debug(f"{report.config_id}: {rejected}/{len(dimensions)} dimensions rejected")
    return report


def rank_bias(reports: Iterable[BiasReport]) -> list[BiasReport]:
    """Most biased first: fraction rejected, then mean D, then config id."""
    return sorted(reports, key=lambda r: (-r.fraction_rejected, -r.mean_D, r.config_id))


def summarize_batch(batch: BatchResult) -> BatchSummary:
    percentages = np.asarray(batch.correction_percentages)
    fitness = np.asarray([record.final_best_fitness for record in batch.records])
    evaluations = np.asarray([record.evaluations_used for record in batch.records])
    return BatchSummary(
        config_id=batch.config.config_id,
        runs=batch.runs,
        correction_mean=float(np.mean(percentages)),
        correction_std=float(np.std(percentages)),
        fitness_min=float(np.min(fitness)),
        fitness_median=float(np.median(fitness)),
        fitness_max=float(np.max(fitness)),
        evaluations_mean=float(np.mean(evaluations)),
    )
