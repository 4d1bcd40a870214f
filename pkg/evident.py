# evident.py - batch command line for innovation assessment
#
#   python evident.py assess --survey data/sample_survey.csv
#   python evident.py combine data/sample_bodies.json
#   python evident.py novelty --manifest data/sample_corpus/manifest.jsonl --pattern data/sample_corpus/pattern.json
#   python evident.py trend series.csv --kind all
#   python evident.py index --grid data/sample_grid.csv --weights data/sample_weights.json --lf-d 5 --lf 10
#
# Exit codes: 0 success, 2 input error, 3 computation error.

import functools
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import click

from assessment_pipeline import combination_summary, run_assessment
from config import OutputFormat, PipelineConfig, load_config, resolve_scale_path
from corpus_db import import_manifest, index_from_db
from ds_combine import combine_all, load_bodies
from errors import ComputationError, EvidentError, InvalidInput
from evidence_core import load_survey
from innovation_index import (
    DemandInput,
    Scalarization,
    component_indices,
    demand,
    grid_from_survey,
    integral_index,
    integral_index_interval,
    load_grid,
    load_weights,
)
from interval_scale import load_scale
from logger_config import log_index_result, log_novelty_result, log_trend_fit, pipeline_logger as logger, setup_logging
from novelty import (
    SliceMode,
    build_index,
    group_mean,
    load_pattern,
    novelty_factor,
    novelty_series,
    parse_year_range,
)
from report_models import IndexReport, NoveltyReport, NoveltyRow, TrendRow
from reports import (
    render_assessment,
    render_combination,
    render_index,
    render_novelty,
    render_scale,
    render_trends,
)
from trend import Series, TrendKind, TrendModel, fit, fit_all, load_series


EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
TREND_CHOICES = [k.value for k in TrendKind] + ["all"]


@dataclass
class AppContext:
    config: PipelineConfig
    output: Optional[Path]
    output_format: OutputFormat


def handle_errors(fn):
    """Map EvidentError to its exit code; anything unexpected exits 3."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EvidentError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(e.exit_code) from None
        except (click.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except Exception as e:
            logger.error(f"Unexpected error: {e}", exc_info=True)
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(ComputationError.exit_code) from None
    return wrapper


def write_output(app: AppContext, text: str) -> None:
    """Report goes to --output when given, otherwise to stdout."""
    if app.output is None:
        click.echo(text, nl=False)
        return
    app.output.parent.mkdir(parents=True, exist_ok=True)
    with app.output.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info(f"Wrote {app.output_format.value} report to {app.output}")


def trend_row(model: TrendModel, label: str = "") -> TrendRow:
    return TrendRow(
        kind=model.kind.value,
        label=label,
        degree=model.degree,
        coefficients=list(model.coefficients),
        sse=model.sse,
        r2=model.r2,
    )


def fit_trends(series: Series, kind: str, degree: int) -> List[TrendModel]:
    if kind == "all":
        return fit_all(series, degree)
    return [fit(series, kind, degree)]


@click.group()
@click.option("--config", "config_path", type=EXISTING_FILE, default=None, help="YAML pipeline config.")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the report here instead of stdout.")
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), default=None,
              help="Report format (default from config, else csv).")
@click.option("--log-level", default="WARNING", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.option("--log-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Also write evident.log and events.jsonl here.")
@click.pass_context
@handle_errors
def cli(ctx, config_path, output, output_format, log_level, log_dir):
    """Evidence-based assessment of innovation from expert appraisals and text corpora."""
    setup_logging(log_level, log_dir)
    config = load_config(config_path)
    chosen = OutputFormat(output_format) if output_format else config.output_format
    ctx.obj = AppContext(config=config, output=output, output_format=chosen)


@cli.command()
@click.option("--survey", type=EXISTING_FILE, default=None, help="Survey CSV (default from config).")
@click.option("--scale", "scale_path", type=EXISTING_FILE, default=None, help="Estimation scale JSON.")
@click.option("--weights", type=EXISTING_FILE, default=None, help="Weights JSON; adds the integral index.")
@click.option("--scalarization", type=click.Choice([s.value for s in Scalarization]), default=None)
@click.option("--workers", type=click.IntRange(1, 64), default=None, help="Threads for per-cell work.")
@click.pass_obj
@handle_errors
def assess(app: AppContext, survey, scale_path, weights, scalarization, workers):
    """Integral assessment table of a survey."""
    updates = {}
    if scalarization:
        updates["scalarization"] = Scalarization(scalarization)
    if workers:
        updates["workers"] = workers
    config = app.config.model_copy(update=updates)
    config.check_paths()

    survey = survey or config.survey_path
    if survey is None:
        raise InvalidInput("no survey given (use --survey or survey_path in the config)")
    weights = weights or config.weights_path

    scale = load_scale(resolve_scale_path(scale_path, config))
    records = load_survey(survey, scale.name)
    table = run_assessment(records, scale, config, load_weights(weights) if weights else None)
    write_output(app, render_assessment(table, app.output_format.value))


@cli.command()
@click.argument("bodies_file", type=EXISTING_FILE)
@click.pass_obj
@handle_errors
def combine(app: AppContext, bodies_file):
    """Combine the evidence bodies of a JSON file in file order."""
    bodies = load_bodies(bodies_file, app.config.tolerance)
    report = combine_all(bodies, app.config.tolerance, app.config.conflict_threshold)
    write_output(app, render_combination(combination_summary(report), app.output_format.value))


@cli.command()
@click.option("--manifest", type=EXISTING_FILE, default=None, help="Corpus manifest (JSON lines).")
@click.option("--db", "db_path", type=EXISTING_FILE, default=None, help="Corpus store built by corpus-import.")
@click.option("--pattern", "pattern_paths", type=EXISTING_FILE, multiple=True, required=True,
              help="Retrieval pattern JSON; repeat for a group of objects.")
@click.option("--year", type=int, default=None, help="Evaluate one year slice.")
@click.option("--series", "year_range", default=None, help="Inclusive year range, e.g. 2008..2017.")
@click.option("--mode", type=click.Choice([m.value for m in SliceMode]), default=None)
@click.option("--fit", "fit_kind", type=click.Choice(TREND_CHOICES), default=None,
              help="Fit a trend to each series.")
@click.option("--degree", type=click.IntRange(1, 5), default=None)
@click.pass_obj
@handle_errors
def novelty(app: AppContext, manifest, db_path, pattern_paths, year, year_range, mode, fit_kind, degree):
    """Novelty factor of one or more objects, for one slice or a year series."""
    if (manifest is None) == (db_path is None):
        raise InvalidInput("give exactly one of --manifest or --db")
    if year is not None and year_range:
        raise InvalidInput("--year and --series are mutually exclusive")
    if fit_kind and not year_range:
        raise InvalidInput("--fit needs --series")

    mode = SliceMode(mode) if mode else app.config.slicing
    degree = degree or app.config.polynomial_degree
    index = index_from_db(db_path) if db_path else build_index(manifest, app.config.workers)
    patterns = [load_pattern(p) for p in pattern_paths]

    rows: List[NoveltyRow] = []
    trends: List[TrendRow] = []
    mean = None

    if year_range:
        years = parse_year_range(year_range)
        for pattern in patterns:
            entries = novelty_series(index, pattern, years, mode)
            for entry in entries:
                result = entry.result
                rows.append(NoveltyRow(
                    label=pattern.label,
                    year=entry.year,
                    gap=entry.is_gap,
                    raw=None if result is None else result.raw,
                    clamped=None if result is None else result.clamped,
                    marker_count=entry.marker_count,
                    per_query_counts=[] if result is None else list(result.per_query_counts),
                ))
            if fit_kind:
                points = [(e.year, e.result.clamped) for e in entries if not e.is_gap]
                for model in fit_trends(Series.from_years(points), fit_kind, degree):
                    log_trend_fit(logger, model, label=pattern.label)
                    trends.append(trend_row(model, pattern.label))
    else:
        results = [novelty_factor(index, pattern, year, mode) for pattern in patterns]
        for result in results:
            log_novelty_result(logger, result)
            rows.append(NoveltyRow(
                label=result.label,
                year=result.slice,
                raw=result.raw,
                clamped=result.clamped,
                marker_count=result.marker_count,
                per_query_counts=list(result.per_query_counts),
            ))
        if len(results) > 1:
            mean = group_mean(results)

    write_output(app, render_novelty(NoveltyReport(rows=rows, group_mean=mean, trends=trends), app.output_format.value))


@cli.command()
@click.argument("series_file", type=EXISTING_FILE)
@click.option("--kind", type=click.Choice(TREND_CHOICES), default="all", show_default=True)
@click.option("--degree", type=click.IntRange(1, 5), default=None, help="Polynomial degree.")
@click.option("--years", is_flag=True, help="x holds calendar years; shift them so the first is 1.")
@click.pass_obj
@handle_errors
def trend(app: AppContext, series_file, kind, degree, years):
    """Fit trend models to an x,y (or year,y) series."""
    models = fit_trends(load_series(series_file, years), kind, degree or app.config.polynomial_degree)
    for model in models:
        log_trend_fit(logger, model)
    write_output(app, render_trends([trend_row(m) for m in models], app.output_format.value))


@cli.command()
@click.option("--grid", type=EXISTING_FILE, default=None, help="Value grid CSV.")
@click.option("--survey", type=EXISTING_FILE, default=None, help="Build the grid from a survey instead.")
@click.option("--scale", "scale_path", type=EXISTING_FILE, default=None, help="Scale for --survey.")
@click.option("--weights", type=EXISTING_FILE, default=None, help="Weights JSON (default from config).")
@click.option("--scalarization", type=click.Choice([s.value for s in Scalarization]), default=None)
@click.option("--component", "components", multiple=True, help="Restrict to these components.")
@click.option("--lf-d", "lf_d", type=click.IntRange(min=0), default=None, help="Labour functions in demand.")
@click.option("--lf", type=click.IntRange(min=0), default=None, help="Total labour functions.")
@click.option("--pr", type=click.IntRange(min=0), default=None, help="Problems found in the object.")
@click.pass_obj
@handle_errors
def index(app: AppContext, grid, survey, scale_path, weights, scalarization, components, lf_d, lf, pr):
    """Integral innovation index, demand indicator and problem count."""
    if (grid is None) == (survey is None):
        raise InvalidInput("give exactly one of --grid or --survey")
    if (lf_d is None) != (lf is None):
        raise InvalidInput("--lf-d and --lf go together")

    config = app.config
    weights = weights or config.weights_path
    if weights is None:
        raise InvalidInput("no weights given (use --weights or weights_path in the config)")
    mode = Scalarization(scalarization) if scalarization else config.scalarization

    if grid is not None:
        value_grid = load_grid(grid)
    else:
        scale = load_scale(resolve_scale_path(scale_path, config))
        value_grid = grid_from_survey(load_survey(survey, scale.name), scale, config.tolerance)
    weight_spec = load_weights(weights)
    subset = list(components) or None

    interval = integral_index_interval(value_grid, weight_spec, subset) if value_grid.interval_mode else None
    report = IndexReport(
        index=integral_index(value_grid, weight_spec, mode, subset),
        scalarization=mode.value,
        index_lo=None if interval is None else interval.lo,
        index_hi=None if interval is None else interval.hi,
        component_indices=component_indices(value_grid, weight_spec, mode),
        demand=None if lf is None else demand(DemandInput(lf_d, lf, pr or 0)),
        lf_d=lf_d,
        lf=lf,
        pr=pr,
    )
    log_index_result(logger, report)
    write_output(app, render_index(report, app.output_format.value))


@cli.command("scale-validate")
@click.argument("scale_file", type=EXISTING_FILE, required=False)
@click.pass_obj
@handle_errors
def scale_validate(app: AppContext, scale_file):
    """Check an estimation scale and print its terms."""
    scale = load_scale(resolve_scale_path(scale_file, app.config))
    logger.info(f"Scale '{scale.name}' is valid with {len(scale)} terms")
    write_output(app, render_scale(scale, app.output_format.value))


@cli.command("corpus-import")
@click.argument("manifest", type=EXISTING_FILE)
@click.option("--db", "db_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_obj
@handle_errors
def corpus_import(app: AppContext, manifest, db_path):
    """Copy a manifest's documents into a corpus store."""
    count = import_manifest(manifest, db_path)
    click.echo(f"Imported {count} documents into {db_path}", err=True)


def main():
    cli(prog_name="evident")


if __name__ == "__main__":
    main()
