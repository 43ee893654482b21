"""Command-line interface.

Exit codes: 0 on success, 1 for data errors, 2 for usage errors.
"""

from __future__ import annotations

import functools
import json
import logging
import os
import sys

import click

from . import ingest, report
from .errors import ProxattrError
from .interaction import DEFAULT_AGGREGATOR, Aggregator
from .pipeline import run_pipeline
from .segmentation import common_origin, segment_locations, segment_sensors

_LOGGER = logging.getLogger("proxattr")

AGGREGATORS = [a.value for a in Aggregator]


def _data_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ProxattrError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


class OriginType(click.ParamType):
    name = "auto|ms"

    def convert(self, value, param, ctx):
        if value is None or value == "auto":
            return None
        try:
            v = int(value)
        except ValueError:
            self.fail(f"{value!r} is neither 'auto' nor an integer of ms", param, ctx)
        if v < 0:
            self.fail("origin must be non-negative", param, ctx)
        return v


def _input_options(fn):
    fn = click.option("--replay", type=click.Path(dir_okay=False, allow_dash=True),
                      help="NDJSON records (sensor and location); '-' for stdin.")(fn)
    fn = click.option("--sensors", "sensors_path", type=click.Path(exists=True, dir_okay=False),
                      help="Sensor CSV (sensor_id,epoch_ms,value).")(fn)
    fn = click.option("--locations", "locations_path", type=click.Path(exists=True, dir_okay=False),
                      help="Location CSV (user_id,epoch_ms,x,y).")(fn)
    return fn


def _load_inputs(locations_path, sensors_path, replay):
    if not (locations_path or sensors_path or replay):
        raise click.UsageError("give --locations/--sensors and/or --replay")
    sensors, locations = [], []
    if locations_path:
        locations += ingest.parse_location_csv(locations_path)
    if sensors_path:
        sensors += ingest.parse_sensor_csv(sensors_path)
    if replay:
        with click.open_file(replay, encoding="utf-8") as fh:
            stream = ingest.replay_ndjson(fh)
            s, l = ingest.split_records(stream)
        if stream.skipped:
            click.echo(f"replay: skipped {stream.skipped} line(s)", err=True)
        sensors += s
        locations += l
    _LOGGER.info("loaded %d sensor and %d location samples", len(sensors), len(locations))
    return sensors, locations


@click.group()
@click.version_option(package_name="proxattr")
def main():
    """Attribute binary-sensor activations to tracked inhabitants."""
    level = os.environ.get("PROXATTR_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


@main.command("segment")
@_input_options
@click.option("--delta", type=click.IntRange(min=1), default=ingest.DEFAULT_DELTA_MS, show_default=True,
              help="Time-step in ms.")
@click.option("--origin", type=OriginType(), default="auto", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Directory for segmented CSVs.")
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Render segmented.png next to the CSVs (needs --out).")
@_data_errors
def cmd_segment(locations_path, sensors_path, replay, delta, origin, out_dir, figures):
    """Segment raw streams into time-steps and print raw/segmented counts."""
    sensors, locations = _load_inputs(locations_path, sensors_path, replay)
    seg_s, seg_l = {}, {}
    if sensors or locations:
        if origin is None:
            origin = common_origin([sensors, locations], delta)
        seg_s = segment_sensors(sensors, delta, origin)
        seg_l = segment_locations(locations, delta, origin)
    if out_dir:
        ingest.ensure_dir(out_dir)
        report.write_segmented_sensors(seg_s, os.path.join(out_dir, "segmented_sensors.csv"))
        report.write_segmented_locations(seg_l, os.path.join(out_dir, "segmented_locations.csv"))
        if figures:
            from .plotting import plot_segmented

            plot_segmented(seg_s, seg_l, os.path.join(out_dir, "segmented.png"))
    rows = report.segment_summary(sensors, locations, seg_s, seg_l)
    click.echo(report.render_summary(rows), nl=False)


@main.command("attribute")
@_input_options
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Interaction-area JSON config.")
@click.option("--delta", type=click.IntRange(min=1), default=None,
              help="Time-step in ms [default: config delta_ms].")
@click.option("--origin", type=OriginType(), default="auto", show_default=True)
@click.option("--aggregator", type=click.Choice(AGGREGATORS), default=DEFAULT_AGGREGATOR.value,
              show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              help="Directory for timeline.csv, counts.csv and figures.")
@click.option("--format", "fmt", type=click.Choice(sorted(report.RENDERERS)), default="table",
              show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@_data_errors
def cmd_attribute(locations_path, sensors_path, replay, config_path, delta, origin, aggregator, out_dir,
                  fmt, figures):
    """Attribute activated time-steps to users and print the count table."""
    config = ingest.load_area_config(config_path)
    sensors, locations = _load_inputs(locations_path, sensors_path, replay)
    delta = delta or config.delta_ms
    result = run_pipeline(sensors, locations, config.sensors, delta, origin, Aggregator(aggregator))
    rows = report.timeline_rows(result.records)
    table = report.count_table(rows, users=result.users)
    if out_dir:
        ingest.ensure_dir(out_dir)
        report.write_timeline(rows, result.users, os.path.join(out_dir, "timeline.csv"))
        with open(os.path.join(out_dir, "counts.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(report.render_csv(table))
        if figures:
            from .plotting import plot_counts, plot_timeline

            plot_timeline(rows, result.users, os.path.join(out_dir, "timeline.png"))
            plot_counts(table, os.path.join(out_dir, "counts.png"))
    _LOGGER.info("aggregator %s: %d attributed steps", aggregator, len(result.records))
    click.echo(report.RENDERERS[fmt](table), nl=False)


@main.command("report")
@click.argument("records_csv", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--format", "fmt", type=click.Choice(sorted(report.RENDERERS)), default="table",
              show_default=True)
@click.option("--figures", "figures_dir", type=click.Path(file_okay=False),
              help="Also write counts.png and timeline.png into this directory.")
@_data_errors
def cmd_report(records_csv, fmt, figures_dir):
    """Render the count table and per-user summary of a timeline export."""
    users, rows = report.read_timeline(records_csv)
    table = report.count_table(rows, users=users)
    if figures_dir:
        from .plotting import plot_counts, plot_timeline

        ingest.ensure_dir(figures_dir)
        plot_counts(table, os.path.join(figures_dir, "counts.png"))
        plot_timeline(rows, users, os.path.join(figures_dir, "timeline.png"))
    click.echo(report.RENDERERS[fmt](table), nl=False)


@main.command("simulate")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--users", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--sensors", type=click.IntRange(min=0), default=4, show_default=True)
@click.option("--duration", type=click.IntRange(min=1), default=600_000, show_default=True,
              help="Scenario length in ms.")
@click.option("--noise", type=click.FloatRange(min=0), default=0.0, show_default=True,
              help="Radius (m) of uniform noise added to reported positions.")
@click.option("--separation", type=click.FloatRange(min=0), default=1.5, show_default=True,
              help="Empty floor (m) between users' zones.")
@click.option("--roam", type=click.FloatRange(0, 1), default=0.0, show_default=True,
              help="Probability a waypoint is drawn from the whole room.")
@click.option("--untracked", type=click.IntRange(min=0), default=0, show_default=True,
              help="Actors that trigger sensors but report no location.")
@click.option("--delta", type=click.IntRange(min=1), default=ingest.DEFAULT_DELTA_MS, show_default=True)
@click.option("--aggregator", type=click.Choice(AGGREGATORS), default=DEFAULT_AGGREGATOR.value,
              show_default=True)
@click.option("--score/--no-score", default=False, help="Attribute the scenario and score it.")
@click.option("--strict", is_flag=True, help="Exclude windows with several actors from scoring.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Write scenario files here.")
@_data_errors
def cmd_simulate(seed, users, sensors, duration, noise, separation, roam, untracked, delta, aggregator,
                 score, strict, out_dir):
    """Generate a synthetic scenario; optionally score the attribution against truth."""
    from . import simulate

    sc = simulate.generate_scenario(seed, users, sensors, duration, noise, separation, roam=roam,
                                    n_untracked=untracked)
    out = {
        "seed": seed,
        "users": list(sc.users),
        "sensors": [m.sensor_id for m in sc.layout],
        "location_samples": len(sc.locations),
        "sensor_samples": len(sc.sensors),
    }
    if out_dir:
        out["files"] = simulate.write_scenario(sc, out_dir, delta)
    if score:
        result = simulate.attribute_scenario(sc, delta, Aggregator(aggregator))
        rep = simulate.score(result.records, sc.truth, strict=strict)
        out["accuracy"] = rep.accuracy
        out["score"] = rep.to_dict()
    click.echo(json.dumps(out, indent=2))


def _value_map(text):
    if not text:
        return None
    mapping = {}
    for pair in text.split(","):
        key, _, val = pair.partition("=")
        mapping[key.strip()] = float(val) if val.strip() else None
    return mapping


@main.command("import")
@click.argument("src", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option("--kind", type=click.Choice(["location", "sensor"]), required=True)
@click.option("--time-column", required=True)
@click.option("--time-format", type=click.Choice(["epoch_ms", "epoch_s", "iso"]), default="epoch_ms",
              show_default=True)
@click.option("--id-column", help="Column holding the user/sensor id.")
@click.option("--id", "fixed_id", help="Id for every row when the file holds a single stream.")
@click.option("--x-column", default="x", show_default=True)
@click.option("--y-column", default="y", show_default=True)
@click.option("--value-column", default="value", show_default=True)
@click.option("--value-map", help="State translations, e.g. 'on=1,off=0,unavailable=' (empty drops the row).")
@click.option("--delimiter", default=",", show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True,
              help="Multiply coordinates by this factor (0.001 converts mm to m).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, allow_dash=True), default="-")
@_data_errors
def cmd_import(src, kind, time_column, time_format, id_column, fixed_id, x_column, y_column, value_column,
               value_map, delimiter, scale, out_path):
    """Convert a foreign CSV export into the canonical location or sensor CSV."""
    if (id_column is None) == (fixed_id is None):
        raise click.UsageError("give exactly one of --id-column or --id")
    try:
        vmap = _value_map(value_map)
    except ValueError:
        raise click.BadParameter("expected state=number pairs", param_hint="--value-map") from None
    records = ingest.import_csv(src, kind, time_column, time_format, id_column, fixed_id, x_column,
                                y_column, value_column, vmap, delimiter, scale)
    records.sort(key=lambda r: (r.t, getattr(r, "user_id", getattr(r, "sensor_id", ""))))
    writer = ingest.write_location_csv if kind == "location" else ingest.write_sensor_csv
    with click.open_file(out_path, "w", encoding="utf-8") as fh:
        writer(records, fh)
    click.echo(f"imported {len(records)} {kind} samples", err=True)


if __name__ == "__main__":
    main()
