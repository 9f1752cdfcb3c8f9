"""SVG figures: parallel coordinates, F-CR histogram grids and heatmaps."""

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from debias.core.exceptions import DomainError, IncompleteGridError, PersistenceError
from debias.models.analysis import GridSurface, Histogram
from debias.models.plotting import PlotSpec
from debias.utils.svg import SvgDocument

logger = logging.getLogger(__name__)

RGB = tuple[int, int, int]

BLUE: RGB = (0, 0, 255)
GREEN: RGB = (0, 255, 0)
YELLOW: RGB = (255, 255, 0)
VIOLET: RGB = (143, 0, 255)

# ramp id -> (colour at 0, colour at vmax, vmax)
RAMPS: dict[str, tuple[RGB, RGB, float]] = {
    "mean": (BLUE, GREEN, 1.0),
    "std": (YELLOW, VIOLET, 0.35),
}

BAR_COLOR = "#d62728"
PARAM_COLOR = "#1f77b4"
MARKER_COLOR = "#1f3b73"
AXIS_COLOR = "#444444"
CHOSEN_COLOR = "black"


def hex_color(rgb: RGB) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def ramp_color(value: float, ramp: str) -> str:
    """Colour of ``value`` on a ramp, clamped to the ramp endpoints."""
    try:
        low, high, vmax = RAMPS[ramp]
    except KeyError:
        raise DomainError(f"unknown colour ramp {ramp!r}") from None
    t = min(max(value / vmax, 0.0), 1.0)
    return hex_color(tuple(round(a + (b - a) * t) for a, b in zip(low, high)))


def _header(doc: SvgDocument, spec: PlotSpec) -> None:
    if spec.source:
        doc.comment(f"source: {spec.source}")
    if spec.title:
        doc.text(spec.width / 2, spec.margin_top / 2 + 5, spec.title,
                 class_="title", text_anchor="middle", font_size=14)


def parallel_coordinates(
    positions: Sequence[Sequence[float]],
    spec: Optional[PlotSpec] = None,
    polylines: bool = False,
) -> str:
    """
    Final best positions in parallel coordinates.

    Each of the n dimensions gets a vertical axis spanning [0, 1]; each run
    puts one marker per axis (and optionally a polyline through them).

    Raises:
        DomainError: If the matrix is empty, ragged, or has entries outside [0, 1]
    """
    spec = spec or PlotSpec()
    matrix = np.asarray(positions, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise DomainError("positions must be a non-empty runs x n matrix")
    if np.any(matrix < 0.0) or np.any(matrix > 1.0) or np.any(np.isnan(matrix)):
        raise DomainError("positions must lie in [0, 1]")
    runs, n = matrix.shape

    doc = SvgDocument(spec.width, spec.height)
    _header(doc, spec)
    spacing = spec.plot_width / n
    axis_x = [spec.margin_left + (d + 0.5) * spacing for d in range(n)]
    top, bottom = spec.margin_top, spec.margin_top + spec.plot_height

    def y_of(value: float) -> float:
        return bottom - value * spec.plot_height

    doc.group_start(class_="axes", stroke=AXIS_COLOR, stroke_width=1)
    for d, x in enumerate(axis_x):
        doc.line(x, top, x, bottom, class_="axis")
    doc.group_end()
    for d, x in enumerate(axis_x):
        doc.text(x, bottom + 15, str(d), class_="axis-label", text_anchor="middle", font_size=10)
    doc.text(spec.margin_left - 8, bottom + 4, "0", class_="tick", text_anchor="end", font_size=10)
    doc.text(spec.margin_left - 8, top + 4, "1", class_="tick", text_anchor="end", font_size=10)

    if polylines:
        doc.group_start(class_="traces", fill="none", stroke=MARKER_COLOR, stroke_opacity=0.3)
        for row in matrix:
            doc.polyline([(x, y_of(v)) for x, v in zip(axis_x, row)], class_="trace")
        doc.group_end()

    doc.group_start(class_="markers", fill=MARKER_COLOR, fill_opacity=spec.marker_opacity)
    for row in matrix:
        for x, v in zip(axis_x, row):
            doc.circle(x, y_of(float(v)), spec.marker_radius, class_="marker")
    doc.group_end()
    logger.debug(f"Parallel coordinates: {runs} runs x {n} dimensions")
    return doc.render()


def _complete_grid(keys: Sequence[tuple[float, float]], what: str) -> tuple[list[float], list[float]]:
    F_values = sorted({f for f, _ in keys})
    CR_values = sorted({cr for _, cr in keys})
    present = set(keys)
    missing = [(f, cr) for f in F_values for cr in CR_values if (f, cr) not in present]
    if missing or not present:
        raise IncompleteGridError(missing, what=what)
    return F_values, CR_values


def histogram_grid(
    histograms: dict[tuple[float, float], Histogram],
    spec: Optional[PlotSpec] = None,
) -> str:
    """
    Histogram panels arranged on the F-CR plane (CR to the right, F upwards).

    Inside a panel the correction percentage runs upwards over [0, 1] and red
    bars extend rightwards by run count, on a scale shared by all panels. A
    blue marker sits at the panel's own (CR, F) coordinate, origin lower left.

    Raises:
        IncompleteGridError: If the F x CR product has missing cells
    """
    spec = spec or PlotSpec(width=760, height=760)
    F_values, CR_values = _complete_grid(list(histograms), "histogram grid")
    bin_counts = {h.bins for h in histograms.values()}
    if len(bin_counts) != 1:
        raise DomainError(f"histograms use different bin counts: {sorted(bin_counts)}")
    bins = bin_counts.pop()
    max_count = max([max(h.counts) for h in histograms.values()] + [1])
    param_scale_f = max(1.0, max(F_values))
    param_scale_cr = max(1.0, max(CR_values))

    doc = SvgDocument(spec.width, spec.height)
    _header(doc, spec)
    cols, rows = len(CR_values), len(F_values)
    cell_w, cell_h = spec.plot_width / cols, spec.plot_height / rows
    pad = 0.08
    panel_w, panel_h = cell_w * (1 - 2 * pad), cell_h * (1 - 2 * pad)

    for i, f in enumerate(F_values):
        row_from_top = rows - 1 - i
        for j, cr in enumerate(CR_values):
            x0 = spec.margin_left + j * cell_w + pad * cell_w
            y0 = spec.margin_top + row_from_top * cell_h + pad * cell_h
            hist = histograms[(f, cr)]
            doc.group_start(class_="panel", id=f"panel-F{f:g}-CR{cr:g}")
            doc.rect(x0, y0, panel_w, panel_h, class_="frame", fill="none", stroke=AXIS_COLOR)
            bar_h = panel_h / bins
            for b, count in enumerate(hist.counts):
                if count == 0:
                    continue
                doc.rect(
                    x0,
                    y0 + panel_h - (b + 1) * bar_h,
                    panel_w * count / max_count,
                    bar_h,
                    class_="bar",
                    fill=BAR_COLOR,
                )
            doc.circle(
                x0 + panel_w * cr / param_scale_cr,
                y0 + panel_h * (1 - f / param_scale_f),
                3.0,
                class_="param-marker",
                fill=PARAM_COLOR,
            )
            doc.group_end()

    bottom = spec.margin_top + spec.plot_height
    for j, cr in enumerate(CR_values):
        doc.text(spec.margin_left + (j + 0.5) * cell_w, bottom + 15, f"CR={cr:g}",
                 class_="axis-label", text_anchor="middle", font_size=10)
    for i, f in enumerate(F_values):
        doc.text(spec.margin_left - 6, spec.margin_top + (rows - 1 - i + 0.5) * cell_h, f"F={f:g}",
                 class_="axis-label", text_anchor="end", font_size=10)
    return doc.render()


def _interpolator(surface: GridSurface, which: str):
    """Bilinear interpolator over (F, CR); single-valued axes become constant."""
    values = np.asarray(surface.values(which), dtype=np.float64)
    F_axis = np.asarray(surface.F_values, dtype=np.float64)
    CR_axis = np.asarray(surface.CR_values, dtype=np.float64)
    if F_axis.size == 1:
        F_axis = np.array([F_axis[0], F_axis[0] + 1.0])
        values = np.vstack([values, values])
    if CR_axis.size == 1:
        CR_axis = np.array([CR_axis[0], CR_axis[0] + 1.0])
        values = np.hstack([values, values])
    interpolate = RegularGridInterpolator((F_axis, CR_axis), values, method="linear",
                                          bounds_error=False, fill_value=None)
    return interpolate


def heatmap(
    surface: GridSurface,
    which: str,
    spec: Optional[PlotSpec] = None,
    chosen: Optional[tuple[float, float]] = (0.1, 0.2),
    resolution: int = 40,
) -> str:
    """
    Bilinearly shaded F-CR surface of correction-percentage mean or std.

    Measured cells are marked with dots and the chosen (F, CR) pair with a
    circle. Mean uses blue (0) to green (1); std uses yellow (0) to violet
    (0.35); values beyond the ramp clamp to its end colour.

    Args:
        surface: Aggregated grid
        which: ``"mean"`` or ``"std"``
        spec: Canvas layout
        chosen: (F, CR) to circle, or None
        resolution: Shaded cells per axis
    """
    if which not in RAMPS:
        raise DomainError(f"unknown surface {which!r}, expected 'mean' or 'std'")
    spec = spec or PlotSpec(width=560, height=520, margin_left=60, margin_bottom=50)
    spec = spec.model_copy(update={"ramp": which})
    interpolate = _interpolator(surface, which)
    F_lo, F_hi = surface.F_values[0], surface.F_values[-1]
    CR_lo, CR_hi = surface.CR_values[0], surface.CR_values[-1]
    F_span = (F_hi - F_lo) or 1.0
    CR_span = (CR_hi - CR_lo) or 1.0

    left, top = spec.margin_left, spec.margin_top
    bottom = top + spec.plot_height

    def x_of(cr: float) -> float:
        return left + (cr - CR_lo) / CR_span * spec.plot_width

    def y_of(f: float) -> float:
        return bottom - (f - F_lo) / F_span * spec.plot_height

    doc = SvgDocument(spec.width, spec.height)
    _header(doc, spec)
    cell_w, cell_h = spec.plot_width / resolution, spec.plot_height / resolution
    centers_cr = CR_lo + (np.arange(resolution) + 0.5) / resolution * CR_span
    centers_f = F_lo + (np.arange(resolution) + 0.5) / resolution * F_span
    grid_f, grid_cr = np.meshgrid(centers_f, centers_cr, indexing="ij")
    shaded = interpolate(np.column_stack([grid_f.ravel(), grid_cr.ravel()])).reshape(grid_f.shape)

    doc.group_start(class_="shading", shape_rendering="crispEdges")
    for i in range(resolution):
        for j in range(resolution):
            doc.rect(
                left + j * cell_w,
                bottom - (i + 1) * cell_h,
                cell_w,
                cell_h,
                class_="cell",
                fill=ramp_color(float(shaded[i, j]), which),
            )
    doc.group_end()

    doc.group_start(class_="measured", fill="black")
    for f in surface.F_values:
        for cr in surface.CR_values:
            doc.circle(x_of(cr), y_of(f), 2.0, class_="grid-point")
    doc.group_end()

    if chosen is not None:
        f, cr = chosen
        if F_lo <= f <= F_hi and CR_lo <= cr <= CR_hi:
            doc.circle(x_of(cr), y_of(f), 6.0, class_="chosen", fill="none",
                       stroke=CHOSEN_COLOR, stroke_width=1.5)

    for cr in surface.CR_values:
        doc.text(x_of(cr), bottom + 15, f"{cr:g}", class_="axis-label", text_anchor="middle", font_size=10)
    for f in surface.F_values:
        doc.text(left - 6, y_of(f) + 4, f"{f:g}", class_="axis-label", text_anchor="end", font_size=10)
    doc.text(left + spec.plot_width / 2, bottom + 35, "CR", class_="axis-title", text_anchor="middle")
    doc.text(left - 40, top + spec.plot_height / 2, "F", class_="axis-title", text_anchor="middle")
    return doc.render()


def write_svg(document: str, path: Path) -> Path:
    """Write an SVG document, creating parent directories."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document, encoding="utf-8")
    except OSError as e:
        raise PersistenceError(path, f"cannot write SVG: {e.strerror or e}") from e
    logger.info(f"Wrote {path}")
    return path
