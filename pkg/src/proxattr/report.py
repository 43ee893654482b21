"""Count tables, timeline exports and their renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence

from .discrimination import AttributionRecord
from .errors import MalformedRow
from .ingest import _open_text, format_float, format_value
from .model import OTHERS
from .segmentation import SegmentedLocationStream, SegmentedSensorStream

TIMELINE_FIXED = ("step_start_ms", "sensor_id", "policy", "raw_activation")
TIMELINE_TAIL = ("owner", "tie")


@dataclass
class TimelineRow:
    step_start_ms: int
    sensor_id: str
    policy: str
    raw_activation: float
    degrees: Dict[str, float]
    owner: str
    tie: bool = False


def timeline_rows(records: Iterable[AttributionRecord]) -> List[TimelineRow]:
    return [
        TimelineRow(r.start_ms, r.sensor_id, r.policy.value, r.activation, dict(r.attributed), r.exclusive_owner, r.tie)
        for r in records
    ]


def write_timeline(rows: Sequence[TimelineRow], users: Sequence[str], dst) -> None:
    """Long-form export, one row per attributed activation.

    ``degree_<user>`` holds the degree after the sensor's policy is applied.
    """
    users = sorted(users)
    with _open_text(dst, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(TIMELINE_FIXED) + [f"degree_{u}" for u in users] + list(TIMELINE_TAIL))
        for r in rows:
            w.writerow(
                [r.step_start_ms, r.sensor_id, r.policy, format_value(r.raw_activation)]
                + [format_float(r.degrees.get(u, 0.0)) for u in users]
                + [r.owner, int(r.tie)]
            )


def read_timeline(src):
    """Parse a timeline export. Returns ``(users, rows)``."""
    with _open_text(src) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return [], []
        n_fixed, n_tail = len(TIMELINE_FIXED), len(TIMELINE_TAIL)
        if (
            len(header) < n_fixed + n_tail
            or tuple(header[:n_fixed]) != TIMELINE_FIXED
            or tuple(header[-n_tail:]) != TIMELINE_TAIL
            or not all(h.startswith("degree_") for h in header[n_fixed:-n_tail])
        ):
            raise MalformedRow(f"unexpected timeline header {','.join(header)!r}", 1)
        users = [h[len("degree_"):] for h in header[n_fixed:-n_tail]]
        rows = []
        for row in reader:
            if not row:
                continue
            n = reader.line_num
            if len(row) != len(header):
                raise MalformedRow(f"expected {len(header)} fields, got {len(row)}", n)
            try:
                degrees = {u: float(v) for u, v in zip(users, row[n_fixed:-n_tail])}
                rows.append(
                    TimelineRow(int(row[0]), row[1], row[2], float(row[3]), degrees, row[-2], row[-1] == "1")
                )
            except ValueError as exc:
                raise MalformedRow(str(exc), n) from None
        return users, rows


@dataclass
class CountTable:
    sensors: List[str]
    users: List[str]
    counts: Dict[str, Dict[str, int]] = field(default_factory=dict)

    @property
    def rows(self) -> List[str]:
        return list(self.users) + [OTHERS]

    def cell(self, row: str, sensor: str) -> int:
        return self.counts.get(row, {}).get(sensor, 0)

    def total(self, sensor: str) -> int:
        return sum(self.cell(r, sensor) for r in self.rows)

    def per_user(self) -> Dict[str, dict]:
        summary = {}
        for u in self.users:
            row = {s: self.cell(u, s) for s in self.sensors}
            top = max(self.sensors, key=lambda s: (row[s], -self.sensors.index(s)), default=None)
            if top is not None and row[top] == 0:
                top = None
            summary[u] = {
                "total": sum(row.values()),
                "top_sensor": top,
                "top_count": row[top] if top else 0,
                "shares": {s: (row[s] / self.total(s) if self.total(s) else 0.0) for s in self.sensors},
            }
        return summary

    def to_dict(self) -> dict:
        return {
            "sensors": list(self.sensors),
            "rows": self.rows,
            "counts": {r: {s: self.cell(r, s) for s in self.sensors} for r in self.rows},
            "totals": {s: self.total(s) for s in self.sensors},
            "per_user": self.per_user(),
        }


def count_table(owners: Iterable, users: Sequence[str] = ()) -> CountTable:
    """Tally ``(sensor_id, owner)`` pairs (or records/timeline rows) into a table."""
    counts: Dict[str, Dict[str, int]] = {}
    sensors, seen_users = set(), set(users)
    for item in owners:
        if isinstance(item, AttributionRecord):
            sensor, owner = item.sensor_id, item.exclusive_owner
        elif isinstance(item, TimelineRow):
            sensor, owner = item.sensor_id, item.owner
        else:
            sensor, owner = item
        sensors.add(sensor)
        if owner != OTHERS:
            seen_users.add(owner)
        row = counts.setdefault(owner, {})
        row[sensor] = row.get(sensor, 0) + 1
    return CountTable(sorted(sensors), sorted(seen_users), counts)


def render_table(table: CountTable) -> str:
    header = ["inhabitant"] + table.sensors
    body = [[r] + [str(table.cell(r, s)) for s in table.sensors] for r in table.rows]
    body.append(["Total"] + [str(table.total(s)) for s in table.sensors])
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))) for row in [header] + body]
    summary = table.per_user()
    for u in table.users:
        s = summary[u]
        if s["top_sensor"] is None:
            lines.append(f"{u}: no attributed activations")
        else:
            shares = ", ".join(f"{k} {v:.0%}" for k, v in s["shares"].items())
            lines.append(f"{u}: top sensor {s['top_sensor']} ({s['top_count']}); shares {shares}")
    return "\n".join(lines) + "\n"


def render_csv(table: CountTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["inhabitant"] + table.sensors)
    for r in table.rows:
        w.writerow([r] + [table.cell(r, s) for s in table.sensors])
    w.writerow(["Total"] + [table.total(s) for s in table.sensors])
    return buf.getvalue()


def render_json(table: CountTable) -> str:
    return json.dumps(table.to_dict(), indent=2, sort_keys=False) + "\n"


RENDERERS = {"table": render_table, "csv": render_csv, "json": render_json}


def report_schema() -> dict:
    from importlib import resources

    return json.loads(resources.files("proxattr").joinpath("schemas/report.schema.json").read_text("utf-8"))


# -- segmentation outputs ----------------------------------------------------


def write_segmented_sensors(streams: Dict[str, SegmentedSensorStream], dst) -> None:
    with _open_text(dst, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sensor_id", "step", "step_start_ms", "value"])
        for sid in sorted(streams):
            s = streams[sid]
            for k in sorted(s.steps):
                w.writerow([sid, k, s.start_ms(k), format_value(s.steps[k])])


def write_segmented_locations(streams: Dict[str, SegmentedLocationStream], dst) -> None:
    with _open_text(dst, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "step", "step_start_ms", "x_min", "y_min", "x_max", "y_max"])
        for uid in sorted(streams):
            s = streams[uid]
            for k in sorted(s.steps):
                b = s.steps[k]
                w.writerow([uid, k, s.start_ms(k)] + [format_float(v) for v in b.as_list()])


def segment_summary(raw_sensors, raw_locations, sensors, locations) -> List[tuple]:
    """Rows ``(kind, id, raw, segmented)``; sensors count activated steps only."""
    raw_s: Dict[str, int] = {}
    for s in raw_sensors:
        raw_s[s.sensor_id] = raw_s.get(s.sensor_id, 0) + 1
    raw_l: Dict[str, int] = {}
    for s in raw_locations:
        raw_l[s.user_id] = raw_l.get(s.user_id, 0) + 1
    rows = [("sensor", sid, raw_s[sid], sensors[sid].activation_count) for sid in sorted(sensors)]
    rows += [("location", uid, raw_l[uid], len(locations[uid].steps)) for uid in sorted(locations)]
    return rows


def render_summary(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "id", "raw", "segmented"])
    w.writerows(rows)
    return buf.getvalue()
