"""Command line: layout, metrics, compare-focus, and fixtures subcommands."""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click

from . import fixtures as fixture_lib
from .errors import PipelineError
from .ingest import (
    infer_schema,
    load_config,
    load_schema,
    parse_attributes,
    parse_events,
    read_table,
)
from .layout import generate_layout
from .metrics import compute_report
from .model import AttributeTable, ChartConfig, FOCUS_STRAIGHT, FOCUS_VERTICAL
from .render import export_scene, export_svg, realize_geometry
from .report import quality_table, write_quality_csv, write_quality_figure


def _parse_pairs(values: tuple[str, ...], flag: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for item in values:
        if "=" not in item:
            raise click.UsageError(f"{flag} expects TIMESTAMP=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def _load_inputs(events, attributes, schema, config, ego, focus, stack, stretch, annotate, seed):
    event_header, event_rows = read_table(events)
    attribute_header, attribute_rows = read_table(attributes) if attributes else ([], [])
    if schema:
        schema_obj = load_schema(schema)
    else:
        schema_obj = infer_schema(event_header, attribute_header)
    records = parse_events(event_rows, schema_obj)
    if attributes:
        table = parse_attributes(attribute_rows, schema_obj)
    else:
        table = AttributeTable.empty()
    if config:
        chart = load_config(config)
    elif ego:
        chart = ChartConfig(ego=ego)
    else:
        raise click.UsageError("an ego is required: pass --ego or a --config file")
    if ego:
        chart = replace(chart, ego=ego)
    if focus:
        chart = replace(chart, focus=focus)
    if stack:
        chart = replace(chart, stack_by_identity=True)
    if stretch:
        factors = {}
        for key, value in _parse_pairs(stretch, "--stretch").items():
            try:
                factors[key] = float(value)
            except ValueError:
                raise click.UsageError(f"--stretch factor {value!r} is not a number")
        chart = replace(chart, time_stretch={**chart.time_stretch, **factors})
    if annotate:
        notes = _parse_pairs(annotate, "--annotate")
        chart = replace(chart, annotations={**chart.annotations, **notes})
    if seed is not None:
        chart = replace(chart, seed=seed)
    return records, table, chart


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError as error:
        click.echo(f"error in {name} stage: {error}", err=True)
        sys.exit(1)


_INPUT_OPTIONS = [
    click.option("--events", required=True, type=click.Path(exists=True, dir_okay=False), help="Events table (CSV or JSON records)."),
    click.option("--attributes", type=click.Path(exists=True, dir_okay=False), help="Entity attributes table."),
    click.option("--schema", type=click.Path(exists=True, dir_okay=False), help="Role-to-column schema file (key=value lines or JSON)."),
    click.option("--config", type=click.Path(exists=True, dir_okay=False), help="Chart config JSON."),
    click.option("--ego", help="Ego entity id (overrides the config)."),
    click.option("--focus", type=click.Choice([FOCUS_VERTICAL, FOCUS_STRAIGHT]), help="Optimization focus."),
    click.option("--stack", is_flag=True, help="Stack entities by line identity."),
    click.option("--stretch", multiple=True, metavar="T=FACTOR", help="Stretch the interval ending at timestamp T (repeatable)."),
    click.option("--annotate", multiple=True, metavar="T=TEXT", help="Annotate timestamp T (repeatable)."),
    click.option("--seed", type=int, default=None, help="Seed for the node-link affinity layout."),
]


def _with_input_options(command):
    for option in reversed(_INPUT_OPTIONS):
        command = option(command)
    return command


@click.group()
def main() -> None:
    """Layout engine and renderer for egocentric network storylines."""


@main.command("layout")
@_with_input_options
@click.option("--out-svg", type=click.Path(dir_okay=False), default="layout.svg", show_default=True)
@click.option("--out-scene", type=click.Path(dir_okay=False), default="scene.json", show_default=True)
def layout_command(events, attributes, schema, config, ego, focus, stack, stretch, annotate, seed, out_svg, out_scene):
    """Compute a layout and write the SVG chart plus the scene document."""
    records, table, chart = _stage(
        "ingest", _load_inputs, events, attributes, schema, config, ego, focus, stack, stretch, annotate, seed
    )
    layout = _stage("layout", generate_layout, records, table, chart)
    scene = _stage("render", realize_geometry, layout, table, chart)
    Path(out_svg).write_text(_stage("render", export_svg, scene), encoding="utf-8")
    Path(out_scene).write_text(_stage("render", export_scene, scene), encoding="utf-8")
    click.echo(f"wrote {out_svg} and {out_scene}")


@main.command("metrics")
@_with_input_options
@click.option("--out-csv", type=click.Path(dir_okay=False), help="Also write the report as CSV.")
@click.option("--out-plot", type=click.Path(dir_okay=False), help="Also render the report as a figure.")
def metrics_command(events, attributes, schema, config, ego, focus, stack, stretch, annotate, seed, out_csv, out_plot):
    """Print the quality report for the configured focus."""
    records, table, chart = _stage(
        "ingest", _load_inputs, events, attributes, schema, config, ego, focus, stack, stretch, annotate, seed
    )
    layout = _stage("layout", generate_layout, records, table, chart)
    report = _stage("metrics", compute_report, layout)
    reports = {chart.focus: report}
    click.echo(quality_table(reports))
    if out_csv:
        write_quality_csv(reports, out_csv)
        click.echo(f"wrote {out_csv}")
    if out_plot:
        write_quality_figure(reports, out_plot)
        click.echo(f"wrote {out_plot}")


@main.command("compare-focus")
@_with_input_options
@click.option("--out-csv", type=click.Path(dir_okay=False), help="Also write both reports as CSV.")
@click.option("--out-plot", type=click.Path(dir_okay=False), help="Also render both reports as a figure.")
def compare_focus_command(events, attributes, schema, config, ego, focus, stack, stretch, annotate, seed, out_csv, out_plot):
    """Run both optimization focuses and print their reports side by side."""
    records, table, chart = _stage(
        "ingest", _load_inputs, events, attributes, schema, config, ego, focus, stack, stretch, annotate, seed
    )
    reports = {}
    for choice in (FOCUS_VERTICAL, FOCUS_STRAIGHT):
        layout = _stage("layout", generate_layout, records, table, replace(chart, focus=choice))
        reports[choice] = _stage("metrics", compute_report, layout)
    click.echo(quality_table(reports))
    if out_csv:
        write_quality_csv(reports, out_csv)
        click.echo(f"wrote {out_csv}")
    if out_plot:
        write_quality_figure(reports, out_plot)
        click.echo(f"wrote {out_plot}")


@main.command("fixtures")
@click.option("--out-dir", type=click.Path(file_okay=False), default="fixtures-out", show_default=True)
@click.option("--seed", type=int, default=7, show_default=True, help="Seed for the synthetic instance.")
@click.option("--entities", type=int, default=12, show_default=True)
@click.option("--timestamps", type=int, default=6, show_default=True)
def fixtures_command(out_dir, seed, entities, timestamps):
    """Write the built-in demo, the discussion corpus, and a synthetic instance."""
    written = []
    written += fixture_lib.write_demo_fixture(out_dir)
    written += fixture_lib.write_discussion_fixture(out_dir)
    written += fixture_lib.write_synthetic_fixture(out_dir, seed, entities, timestamps)
    for path in written:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
