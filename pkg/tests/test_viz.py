"""Tests for the SVG figures."""

import pytest

from debias.core.exceptions import DomainError, IncompleteGridError
from debias.models.analysis import GridSurface
from debias.models.plotting import PlotSpec
from debias.services.rng import RngStream
from debias.services.stats import build_histogram
from debias.services.viz import (
    hex_color,
    heatmap,
    histogram_grid,
    parallel_coordinates,
    ramp_color,
    write_svg,
)

F_GRID = [0.05, 0.2, 0.4, 0.7, 0.9]
CR_GRID = [0.05, 0.4, 0.7, 0.9, 0.99]


def count(svg, css_class):
    return svg.count(f'class="{css_class}"')


def constant_surface(mean=0.0, std=0.0):
    return GridSurface(
        group="g",
        F_values=F_GRID,
        CR_values=CR_GRID,
        cell_mean=[[mean] * 5 for _ in F_GRID],
        cell_std=[[std] * 5 for _ in F_GRID],
    )


def cell_fills(svg):
    return {
        line.split('fill="')[1].split('"')[0]
        for line in svg.splitlines()
        if 'class="cell"' in line
    }


def test_parallel_marker_count():
    """One marker per run and dimension."""
    stream = RngStream(1)
    positions = [stream.next_doubles(7).tolist() for _ in range(12)]
    svg = parallel_coordinates(positions)
    assert count(svg, "marker") == 12 * 7
    assert count(svg, "axis") == 7
    assert count(svg, "trace") == 0
    assert count(parallel_coordinates([[0.3, 0.6]]), "marker") == 2


def test_parallel_polylines():
    svg = parallel_coordinates([[0.1, 0.2, 0.3]] * 4, polylines=True)
    assert count(svg, "trace") == 4


def test_parallel_centred_positions_share_one_height():
    """All markers of a centred batch sit at mid-axis."""
    spec = PlotSpec(width=400, height=300)
    svg = parallel_coordinates([[0.5] * 3] * 5, spec=spec)
    mid = spec.margin_top + spec.plot_height / 2
    heights = {
        line.split('cy="')[1].split('"')[0]
        for line in svg.splitlines()
        if 'class="marker"' in line
    }
    assert heights == {f"{mid:.2f}"}


def test_parallel_is_deterministic():
    positions = [[0.1, 0.9], [0.4, 0.6]]
    spec = PlotSpec(title="t", source="positions.csv")
    assert parallel_coordinates(positions, spec) == parallel_coordinates(positions, spec)
    assert "<!-- source: positions.csv -->" in parallel_coordinates(positions, spec)


def test_parallel_rejects_out_of_range():
    with pytest.raises(DomainError):
        parallel_coordinates([[0.5, 1.2]])
    with pytest.raises(DomainError):
        parallel_coordinates([])


def test_histogram_grid_empty_histograms():
    """Zero counts leave only the parameter markers."""
    histograms = {(f, cr): build_histogram([]) for f in F_GRID for cr in CR_GRID}
    svg = histogram_grid(histograms)
    assert count(svg, "panel") == 25
    assert count(svg, "param-marker") == 25
    assert count(svg, "bar") == 0


def test_histogram_grid_one_bar_per_panel():
    histograms = {(f, cr): build_histogram([0.35] * 50) for f in F_GRID for cr in CR_GRID}
    svg = histogram_grid(histograms)
    assert count(svg, "bar") == 25
    assert 'id="panel-F0.9-CR0.05"' in svg


def test_histogram_grid_incomplete():
    """A missing cell is an error naming it."""
    histograms = {(f, cr): build_histogram([]) for f in F_GRID for cr in CR_GRID}
    del histograms[(0.4, 0.7)]
    with pytest.raises(IncompleteGridError, match="F=0.4, CR=0.7"):
        histogram_grid(histograms)


def test_heatmap_all_blue_for_zero_mean():
    svg = heatmap(constant_surface(mean=0.0), "mean", resolution=10)
    assert cell_fills(svg) == {"#0000ff"}
    assert count(svg, "cell") == 100
    assert count(svg, "grid-point") == 25
    assert count(svg, "chosen") == 1


def test_heatmap_violet_at_std_limit():
    svg = heatmap(constant_surface(std=0.35), "std", resolution=8)
    assert cell_fills(svg) == {"#8f00ff"}
    [ring] = [line for line in svg.splitlines() if 'class="chosen"' in line]
    assert 'fill="none"' in ring and 'stroke="black"' in ring


def test_heatmap_constant_surface_is_flat():
    assert len(cell_fills(heatmap(constant_surface(mean=0.25), "mean", resolution=12))) == 1


def test_heatmap_chosen_point_outside_grid():
    assert count(heatmap(constant_surface(), "mean", chosen=(1.5, 0.2), resolution=4), "chosen") == 0


def test_heatmap_unknown_surface():
    with pytest.raises(DomainError):
        heatmap(constant_surface(), "median")


def test_ramp_endpoints_and_clamping():
    """Ramps run blue to green and yellow to violet, clamped at the ends."""
    assert ramp_color(0.0, "mean") == "#0000ff"
    assert ramp_color(1.0, "mean") == "#00ff00"
    assert ramp_color(3.0, "mean") == "#00ff00"
    assert ramp_color(0.0, "std") == "#ffff00"
    assert ramp_color(0.35, "std") == "#8f00ff"
    assert ramp_color(-1.0, "std") == "#ffff00"
    greens = [int(ramp_color(v / 10, "mean")[3:5], 16) for v in range(11)]
    assert greens == sorted(greens)
    assert hex_color((1, 2, 255)) == "#0102ff"
    with pytest.raises(DomainError):
        ramp_color(0.5, "rainbow")


def test_write_svg(tmp_path):
    path = write_svg(parallel_coordinates([[0.5]]), tmp_path / "deep" / "plot.svg")
    assert path.read_text(encoding="utf-8").startswith("<?xml")
