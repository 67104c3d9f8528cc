"""Command-line entry point: ``isakit run`` and ``isakit validate``."""

from __future__ import annotations

import dataclasses
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import click

from isakit import ingest, pipeline, report
from isakit.datamodel import IsaOptions, validate_metadata
from isakit.errors import InputError, IoFailure, MissingProducer, PipelineError, StageFailed

log = logging.getLogger("isakit")

_LEVELS = {"debug": logging.DEBUG, "info": logging.INFO, "warn": logging.WARNING,
           "warning": logging.WARNING, "error": logging.ERROR}


def _configure_logging(verbose: bool) -> None:
    if verbose:
        level = logging.INFO
    else:
        level = _LEVELS.get(os.environ.get("ISA_LOG", "warn").strip().lower(), logging.WARNING)
    root = logging.getLogger("isakit")
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False


def example_metadata_path() -> Path:
    return Path(str(resources.files("isakit") / "examples" / "metadata.csv"))


def _fail(msg: str, code: int) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _summary_table(model) -> str:
    if model.pythia is None:
        return ""
    s = model.pythia.summary
    rows = [report._selector_cells(r, "algorithm") for r in s.algorithms]
    rows.append(report._selector_cells(s.oracle, "oracle"))
    rows.append(report._selector_cells(s.selector, "selector"))
    table = [list(report.SELECTOR_COLUMNS)] + [[c or "-" for c in r] for r in rows]
    widths = [max(len(r[k]) for r in table) for k in range(len(table[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table)


@click.group()
def main() -> None:
    """Instance space analysis of algorithm-performance metadata."""


@main.command()
@click.option("--metadata", "metadata_path", required=True, type=click.Path(dir_okay=False))
@click.option("--options", "options_path", type=click.Path(dir_okay=False), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None)
@click.option("--stages", default=None, help="Comma-separated subset of stages.")
@click.option("--seed", type=int, default=None, help="Overrides every per-stage seed.")
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--verbose", is_flag=True, default=False)
def run(metadata_path, options_path, out_dir, stages, seed, workers, verbose) -> None:
    """Build the instance space and write tables and plots."""
    _configure_logging(verbose)
    try:
        metadata = ingest.from_csv_file(metadata_path)
        options = ingest.from_json_file(options_path) if options_path else IsaOptions()
        if seed is not None:
            options = options.with_seed(seed)
        if workers is not None:
            options = dataclasses.replace(
                options, parallel=dataclasses.replace(options.parallel, enabled=workers > 1,
                                                      n_workers=workers)
            )
        specs = pipeline.stages_from_names(stages.split(",")) if stages else pipeline.ALL_STAGES
        order = pipeline.build_order(specs)
    except (InputError, IoFailure, MissingProducer, PipelineError, ValueError) as exc:
        _fail(str(exc), 1)
    if verbose:
        click.echo("stage order: " + " -> ".join(order))

    try:
        model = pipeline.run(metadata, options, specs)
    except StageFailed as exc:
        _fail(f"stage {exc.stage} failed: {type(exc.cause).__name__}: {exc.cause}", 2)

    out = Path(out_dir if out_dir is not None else options.outputs.out_dir)
    try:
        paths = report.write_report(
            model, out, plots=options.outputs.emit_plots, tables=options.outputs.emit_csv
        )
    except IoFailure as exc:
        _fail(str(exc), 1)
    summary = _summary_table(model)
    if summary:
        click.echo(summary)
    if verbose:
        for p in paths:
            click.echo(f"wrote {p}")


@main.command()
@click.option("--metadata", "metadata_path", required=True, type=click.Path(dir_okay=False))
def validate(metadata_path) -> None:
    """Parse and check a metadata file without running the pipeline."""
    _configure_logging(False)
    try:
        m = ingest.from_csv_file(metadata_path)
    except (InputError, IoFailure) as exc:
        _fail(str(exc), 1)
    problems = validate_metadata(m)
    if problems:
        for p in problems:
            click.echo(f"invalid: {p}", err=True)
        sys.exit(1)
    click.echo(f"ok: {m.n_instances} instances, {m.n_features} features, "
               f"{m.n_algorithms} algorithms")


if __name__ == "__main__":
    main()
