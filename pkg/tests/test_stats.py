"""Tests for infeasibility tables, histograms, grids and uniformity tests."""

import numpy as np
import pytest

from debias.core.exceptions import DomainError, IncompleteGridError, InsufficientDataError
from debias.services.rng import RngStream
from debias.services.stats import (
    aggregate_grid,
    bias_report,
    build_histogram,
    correction_histograms,
    infeasibility_probability,
    ks_statistic,
    rank_bias,
    summarize_batch,
    tabulate_infeasibility,
    uniformity_test,
)


def test_infeasibility_probability():
    """1 - (1 - p)^n at the corners and past the 0.99 threshold."""
    assert infeasibility_probability(0.045, 100) == pytest.approx(1 - 0.955**100, abs=1e-12)
    assert infeasibility_probability(0.0451, 100) > 0.99
    assert infeasibility_probability(0.3, 30) > 0.99999
    assert infeasibility_probability(0.0, 30) == 0.0
    assert infeasibility_probability(1.0, 30) == 1.0
    assert infeasibility_probability(0.5, 1) == 0.5
    with pytest.raises(DomainError):
        infeasibility_probability(1.2, 3)
    with pytest.raises(DomainError):
        infeasibility_probability(0.5, 0)


def test_tabulate_infeasibility():
    """Rows are monotone in p and dominate each other as n grows."""
    table = tabulate_infeasibility([1, 10, 30], 101)
    p = np.asarray(table.p_values)
    rows = np.asarray(table.rows)
    assert p[0] == 0.0 and p[-1] == 1.0
    assert rows[0] == pytest.approx(p)
    assert np.all(np.diff(rows, axis=1) >= 0)
    assert np.all(np.diff(rows, axis=0) >= 0)
    assert np.all(rows[2, 1:51] > rows[1, 1:51])
    with pytest.raises(DomainError):
        tabulate_infeasibility([1], 1)


def test_histogram_edges_and_conservation():
    """Ten equal bins; 1.0 lands in the last one."""
    hist = build_histogram([0.05] * 50)
    assert hist.counts == [50] + [0] * 9
    assert hist.bin_edges[0] == 0.0 and hist.bin_edges[-1] == 1.0
    assert build_histogram([1.0, 0.0]).counts == [1] + [0] * 8 + [1]
    assert build_histogram([]).counts == [0] * 10
    assert build_histogram([0.2, 0.7], bins=25).bins == 25


def test_histogram_of_uniform_draws():
    """Each bin holds 1000 +- 3 sigma of 10**4 uniform values."""
    hist = build_histogram(RngStream(6).next_doubles(10_000))
    assert hist.total == 10_000
    bound = 3 * np.sqrt(10_000 * 0.1 * 0.9)
    assert all(abs(count - 1000) <= bound for count in hist.counts)


def test_histogram_rejects_out_of_range():
    with pytest.raises(DomainError):
        build_histogram([0.5, 1.5])


def test_aggregate_grid(make_batch):
    """Population mean and std per cell."""
    batches = [
        make_batch(corrected=[0, 0, 0, 0], F=0.1, CR=0.2),
        make_batch(corrected=[0, 100, 0, 100], F=0.1, CR=0.9),
        make_batch(corrected=[30, 30, 30, 30], F=0.5, CR=0.2),
        make_batch(corrected=[10, 20, 30, 40], F=0.5, CR=0.9),
    ]
    surface = aggregate_grid(batches, group="g")
    assert surface.F_values == [0.1, 0.5]
    assert surface.CR_values == [0.2, 0.9]
    assert surface.cell_mean[0] == [0.0, 0.5]
    assert surface.cell_std[0] == [0.0, 0.5]
    assert surface.cell_mean[1][0] == pytest.approx(0.3)
    assert surface.cell_std[1][0] == pytest.approx(0.0)
    assert surface.cell_std[1][1] == pytest.approx(np.std([0.1, 0.2, 0.3, 0.4]))


def test_aggregate_grid_missing_cell(make_batch):
    """A missing cell is reported by its coordinates."""
    batches = [
        make_batch(corrected=[0], F=0.1, CR=0.2),
        make_batch(corrected=[0], F=0.1, CR=0.9),
        make_batch(corrected=[0], F=0.5, CR=0.2),
    ]
    with pytest.raises(IncompleteGridError, match=r"F=0.5, CR=0.9") as excinfo:
        aggregate_grid(batches)
    assert excinfo.value.missing == [(0.5, 0.9)]


def test_aggregate_grid_duplicate_cell(make_batch):
    batches = [make_batch(corrected=[0], F=0.1, CR=0.2), make_batch(corrected=[1], F=0.1, CR=0.2)]
    with pytest.raises(DomainError, match="duplicate"):
        aggregate_grid(batches)


def test_correction_histograms(make_batch):
    """One histogram per cell over the per-run percentages."""
    batches = [make_batch(corrected=[5, 15, 95], F=0.1, CR=cr) for cr in (0.2, 0.9)]
    histograms = correction_histograms(batches, bins=10)
    assert list(histograms) == [(0.1, 0.2), (0.1, 0.9)]
    assert histograms[(0.1, 0.2)].counts == [1, 1, 0, 0, 0, 0, 0, 0, 0, 1]


def test_ks_statistic():
    """Point mass, staircase and permutation invariance."""
    assert ks_statistic([0.5] * 50) == 0.5
    m = 20
    assert ks_statistic([k / m for k in range(1, m + 1)]) == pytest.approx(1 / m)
    values = RngStream(4).next_doubles(40)
    assert ks_statistic(values) == ks_statistic(values[::-1])


def test_ks_statistic_matches_empirical_cdf_gap():
    """D equals the largest gap between the empirical CDF steps and the diagonal."""
    data = np.sort(RngStream(13).next_doubles(60))
    ranks = np.arange(1, data.size + 1)
    expected = max(np.max(ranks / data.size - data), np.max(data - (ranks - 1) / data.size))
    assert ks_statistic(data) == pytest.approx(expected, abs=1e-15)


def test_uniformity_test_requires_five_values():
    with pytest.raises(InsufficientDataError):
        uniformity_test([0.1, 0.2, 0.3, 0.4])


def test_uniformity_test_null_calibration():
    """Rejection rate of uniform 50-samples at 0.05 stays near 0.05."""
    stream = RngStream(2019)
    rejections = sum(uniformity_test(stream.next_doubles(50))[1] < 0.05 for _ in range(1000))
    assert 0.03 <= rejections / 1000 <= 0.07


def test_uniformity_test_point_mass():
    """A point mass is far outside the uniform null."""
    m = 50
    _, p_value = uniformity_test([0.5] * m)
    assert p_value < 1e-6


def test_bias_report_centered_positions(make_batch):
    """Runs converged to the centre are rejected in every dimension."""
    batch = make_batch(positions=[[0.5] * 4] * 20)
    report = bias_report(batch, alpha=0.01)
    assert report.fraction_rejected == 1.0
    assert all(test.D == 0.5 for test in report.dimensions)
    assert report.dimensions[0].histogram.counts[5] == 20


def test_bias_report_uniform_positions(make_batch):
    """Uniform positions are rarely rejected."""
    stream = RngStream(77)
    positions = [stream.next_doubles(30).tolist() for _ in range(50)]
    report = bias_report(make_batch(positions=positions), alpha=0.01)
    assert len(report.dimensions) == 30
    assert report.fraction_rejected <= 0.11


def test_bias_report_errors(make_batch):
    """Too few runs or a bad alpha are rejected."""
    with pytest.raises(InsufficientDataError):
        bias_report(make_batch(positions=[[0.5, 0.5]] * 4), alpha=0.01)
    with pytest.raises(DomainError):
        bias_report(make_batch(positions=[[0.5, 0.5]] * 5), alpha=1.0)


def test_rank_bias(make_batch):
    """Most rejected first, then larger mean D."""
    stream = RngStream(5)
    uniform = make_batch(positions=[stream.next_doubles(3).tolist() for _ in range(20)], F=0.3)
    centred = make_batch(positions=[[0.5] * 3] * 20, F=0.7)
    ranked = rank_bias([bias_report(uniform, 0.01), bias_report(centred, 0.01)])
    assert ranked[0].config_id == centred.config.config_id


def test_summarize_batch(make_batch):
    batch = make_batch(corrected=[0, 50, 100])
    summary = summarize_batch(batch)
    assert summary.runs == 3
    assert summary.correction_mean == pytest.approx(0.5)
    assert summary.fitness_min == 0.0
    assert summary.fitness_median == pytest.approx(0.01)
    assert summary.evaluations_mean == batch.config.budget
