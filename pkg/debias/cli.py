"""
Command line for the structural bias laboratory.

Usage:
  debias run --manifest <path> [--out <dir>] [--seed <u64>] [--workers <k>]
  debias grid --manifest <path> [--out <dir>] [--seed <u64>] [--workers <k>]
  debias bias-report --input <dir> [--out <dir>] [--alpha <real>] [--bins <k>]
  debias plot --input <path> --plot <parallel|histgrid|heatmap-mean|heatmap-std> [--out <dir>]
  debias tabulate [--n 1,5,10,30,100] [--resolution 1000] [--out <dir>]

The output directory defaults to the manifest's output_dir for run/grid and
to DEBIAS_OUT (default ``results``) otherwise.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from debias.core.dependencies import get_experiment_runner, get_settings
from debias.core.exceptions import DebiasError, DomainError, PersistenceError, UsageError
from debias.models.command import Command, PlotKind, Verb
from debias.models.plotting import PlotSpec
from debias.models.results import BatchResult
from debias.services import protocol, stats, viz
from debias.utils.cli_helpers import (
    EXIT_FAILURE,
    EXIT_OK,
    exit_status_for,
    format_table,
    parse_int_list,
)

logger = logging.getLogger(__name__)


def _summary_rows(batches: list[BatchResult]) -> list[list[str]]:
    rows = []
    for batch in batches:
        summary = stats.summarize_batch(batch)
        rows.append([
            summary.config_id,
            str(summary.runs),
            f"{100 * summary.correction_mean:.2f}",
            f"{100 * summary.correction_std:.2f}",
            f"{summary.fitness_min:.3e}",
            f"{summary.fitness_median:.3e}",
            f"{summary.fitness_max:.3e}",
        ])
    return rows


def _run_manifest(command: Command) -> tuple[list[BatchResult], Path, list[tuple[str, int]]]:
    manifest = protocol.load_manifest(command.manifest)
    if command.seed is not None:
        manifest = manifest.model_copy(update={"base_seed": command.seed})
    out = command.out if command.out is not None else manifest.output_dir
    runner = get_experiment_runner(command.workers)
    batches = runner.run_manifest(manifest, output_dir=out)
    return batches, out, protocol.undersized_combinations(manifest)


def cmd_run(command: Command) -> int:
    """Run every configuration of a manifest and print a summary table."""
    batches, out, skipped = _run_manifest(command)
    print(format_table(
        ["config", "runs", "corr% mean", "corr% std", "best min", "best median", "best max"],
        _summary_rows(batches),
    ))
    print(f"\n{len(batches)} configuration(s) written to {out}")
    if skipped:
        pairs = ", ".join(f"{scheme} at NP={NP}" for scheme, NP in skipped)
        print(f"Skipped (population too small for the mutation): {pairs}")
    return EXIT_OK


def cmd_grid(command: Command) -> int:
    """Run a manifest, then aggregate each F-CR grid into a surface file."""
    batches, out, _ = _run_manifest(command)
    surfaces_dir = Path(out) / "surfaces"
    surfaces_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for group, members in protocol.group_batches(batches).items():
        surface = stats.aggregate_grid(members, group=group)
        path = surfaces_dir / f"{group.replace('/', '_')}.surface.json"
        path.write_text(surface.model_dump_json(indent=2) + "\n", encoding="utf-8")
        rows.append([group, f"{len(surface.F_values)}x{len(surface.CR_values)}", str(path)])
    print(format_table(["group", "grid", "surface"], rows))
    return EXIT_OK


def _load_all(input_dir: Path) -> tuple[list[BatchResult], int]:
    """Load every batch under ``input_dir``; corrupt ones are reported and counted."""
    config_dirs = protocol.discover_batches(input_dir)
    if not config_dirs:
        raise UsageError(f"no persisted batches under {input_dir}")
    batches, failures = [], 0
    for config_dir in config_dirs:
        try:
            batches.append(protocol.load_batch(config_dir))
        except PersistenceError as e:
            failures += 1
            logger.warning(f"Skipping corrupt batch: {e}")
            print(f"corrupt batch: {e}", file=sys.stderr)
    return batches, failures


def cmd_bias_report(command: Command) -> int:
    """Write a bias report per batch and a ranking by fraction of rejected dimensions."""
    batches, failures = _load_all(command.input)
    out = Path(command.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for batch in batches:
        try:
            report = stats.bias_report(batch, command.alpha, bins=command.bins)
        except DebiasError as e:
            failures += 1
            print(f"cannot analyse {batch.config.config_id}: {e}", file=sys.stderr)
            continue
        (out / f"{batch.config.slug}.bias.json").write_text(
            report.model_dump_json(indent=2) + "\n", encoding="utf-8"
        )
        reports.append(report)

    ranked = stats.rank_bias(reports)
    with (out / "bias_ranking.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "config_id", "fraction_rejected", "mean_D"])
        for rank, report in enumerate(ranked, start=1):
            writer.writerow([rank, report.config_id, f"{report.fraction_rejected:.6f}", f"{report.mean_D:.6f}"])
    print(format_table(
        ["rank", "config", "rejected", "mean D"],
        [[str(k), r.config_id, f"{r.fraction_rejected:.3f}", f"{r.mean_D:.4f}"]
         for k, r in enumerate(ranked, start=1)],
    ))
    return EXIT_FAILURE if failures else EXIT_OK


def _plot_spec(title: str, source: str, **overrides) -> PlotSpec:
    settings = get_settings()
    return PlotSpec(
        title=title,
        source=source,
        marker_radius=settings.marker_radius,
        marker_opacity=settings.marker_opacity,
        **overrides,
    )


def cmd_plot(command: Command) -> int:
    """Render SVG figures from persisted batches."""
    out = Path(command.out)
    if command.plot is PlotKind.PARALLEL:
        source = command.input
        if source.is_dir():
            candidates = sorted(source.glob(f"*{protocol.POSITIONS_SUFFIX}"))
            if len(candidates) != 1:
                raise UsageError(f"expected one positions file in {source}, found {len(candidates)}")
            source = candidates[0]
        positions = protocol.read_positions(source)
        if not positions:
            raise DomainError(f"{source}: no position rows to plot")
        stem = source.name.removesuffix(protocol.POSITIONS_SUFFIX)
        document = viz.parallel_coordinates(
            positions,
            spec=_plot_spec(stem, str(source), width=max(400, 30 * len(positions[0]) + 70)),
            polylines=command.polylines,
        )
        viz.write_svg(document, out / f"{stem}.parallel.svg")
        return EXIT_OK

    batches, failures = _load_all(command.input)
    settings = get_settings()
    for group, members in protocol.group_batches(batches).items():
        slug = group.replace("/", "_")
        if command.plot is PlotKind.HISTGRID:
            histograms = stats.correction_histograms(members, bins=command.bins)
            document = viz.histogram_grid(
                histograms, spec=_plot_spec(group, str(command.input), width=760, height=760)
            )
            viz.write_svg(document, out / f"{slug}.histgrid.svg")
        else:
            which = "mean" if command.plot is PlotKind.HEATMAP_MEAN else "std"
            surface = stats.aggregate_grid(members, group=group)
            document = viz.heatmap(
                surface,
                which,
                spec=_plot_spec(f"{group} ({which})", str(command.input),
                                width=560, height=520, margin_left=60, margin_bottom=50),
                chosen=(settings.chosen_f, settings.chosen_cr),
            )
            viz.write_svg(document, out / f"{slug}.{command.plot.value}.svg")
    return EXIT_FAILURE if failures else EXIT_OK


def cmd_tabulate(command: Command) -> int:
    """Tabulate the probability of needing a correction as CSV."""
    table = stats.tabulate_infeasibility(command.n_values, command.resolution)
    out = Path(command.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "infeasibility.csv"
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p"] + [f"n={n}" for n in table.n_values])
        for i, p in enumerate(table.p_values):
            writer.writerow([f"{p:.17g}"] + [f"{row[i]:.17g}" for row in table.rows])
    print(f"Wrote {path}")
    return EXIT_OK


COMMANDS = {
    Verb.RUN: cmd_run,
    Verb.GRID: cmd_grid,
    Verb.BIAS_REPORT: cmd_bias_report,
    Verb.PLOT: cmd_plot,
    Verb.TABULATE: cmd_tabulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="debias",
        description="Structural bias laboratory for Differential Evolution",
    )
    parser.add_argument("--log-level", default=None, help="Logging level (default from DEBIAS_LOG_LEVEL)")
    verbs = parser.add_subparsers(dest="verb", required=True)

    for verb, help_text in (
        (Verb.RUN, "run every configuration of a manifest"),
        (Verb.GRID, "run an F-CR grid manifest and aggregate surfaces"),
    ):
        sub = verbs.add_parser(verb.value, help=help_text)
        sub.add_argument("--manifest", type=Path, required=True)
        sub.add_argument("--out", type=Path, default=None)
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--workers", type=int, default=None)

    sub = verbs.add_parser(Verb.BIAS_REPORT.value, help="uniformity tests of persisted batches")
    sub.add_argument("--input", type=Path, required=True)
    sub.add_argument("--out", type=Path, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--bins", type=int, default=None)

    sub = verbs.add_parser(Verb.PLOT.value, help="render SVG figures")
    sub.add_argument("--input", type=Path, required=True)
    sub.add_argument("--plot", required=True, choices=[kind.value for kind in PlotKind])
    sub.add_argument("--out", type=Path, default=None)
    sub.add_argument("--bins", type=int, default=None)
    sub.add_argument("--polylines", action="store_true", help="connect each run's markers")

    sub = verbs.add_parser(Verb.TABULATE.value, help="tabulate 1-(1-p)^n")
    sub.add_argument("--n", dest="n_values", default="1,5,10,30,100")
    sub.add_argument("--resolution", type=int, default=1000)
    sub.add_argument("--out", type=Path, default=None)
    return parser


def _or_default(value, default):
    return default if value is None else value


def build_command(args: argparse.Namespace) -> Command:
    """Merge parsed flags with settings into a validated Command."""
    settings = get_settings()
    verb = Verb(args.verb)
    out = getattr(args, "out", None)
    if out is None and verb not in (Verb.RUN, Verb.GRID):
        out = settings.out
    fields = {
        "verb": verb,
        "manifest": getattr(args, "manifest", None),
        "input": getattr(args, "input", None),
        "out": out,
        "seed": getattr(args, "seed", None),
        "workers": _or_default(getattr(args, "workers", None), settings.workers),
        "alpha": _or_default(getattr(args, "alpha", None), settings.alpha),
        "bins": _or_default(getattr(args, "bins", None), settings.bins),
        "plot": getattr(args, "plot", None),
        "polylines": getattr(args, "polylines", False),
    }
    if verb is Verb.TABULATE:
        fields["n_values"] = parse_int_list(args.n_values, "--n")
        fields["resolution"] = args.resolution
    try:
        return Command(**fields)
    except ValidationError as e:
        raise UsageError(str(e)) from e


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        command = build_command(args)
        return COMMANDS[command.verb](command)
    except Exception as e:
        return exit_status_for(e)


if __name__ == "__main__":
    sys.exit(main())
