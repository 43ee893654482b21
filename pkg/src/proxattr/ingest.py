"""File formats: location/sensor CSV, NDJSON replay and the area config.

Location CSV header is ``user_id,epoch_ms,x,y``; sensor CSV header is
``sensor_id,epoch_ms,value``. Both are UTF-8 with LF line endings. Writers
emit a canonical form: integers for timestamps, ``repr`` floats for
coordinates, and ``0``/``1`` for binary sensor values.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from typing import Iterable, Iterator, List, Optional, Tuple

import jsonschema

from .errors import (
    BadTimestamp,
    DegreeOutOfRange,
    InvalidBox,
    MalformedRow,
    NonFiniteCoordinate,
    ParseError,
    SchemaError,
    ValueOutOfRange,
)
from .model import BBox, InteractionArea, LocationSample, Policy, RawRecord, SensorModel, SensorSample

logger = logging.getLogger(__name__)

LOCATION_HEADER = ("user_id", "epoch_ms", "x", "y")
SENSOR_HEADER = ("sensor_id", "epoch_ms", "value")
TRUTH_HEADER = ("sensor_id", "epoch_ms", "actor")
DEFAULT_DELTA_MS = 15000

_BOOLEAN_WORDS = {"on": 1.0, "off": 0.0, "true": 1.0, "false": 0.0, "open": 1.0, "closed": 0.0}


@contextlib.contextmanager
def _open_text(src, mode="r"):
    if hasattr(src, "read" if mode == "r" else "write"):
        yield src
    elif str(src) == "-":
        yield sys.stdin if mode == "r" else sys.stdout
    else:
        with open(src, mode, encoding="utf-8", newline="") as fh:
            yield fh


def format_float(x: float) -> str:
    return repr(float(x))


def format_value(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def parse_timestamp(text: str, line_no=None) -> int:
    try:
        t = int(text.strip())
    except ValueError:
        raise BadTimestamp(f"timestamp {text!r} is not an integer of ms", line_no) from None
    if t < 0:
        raise BadTimestamp(f"timestamp {t} is negative", line_no)
    return t


def parse_coordinate(text: str, line_no=None) -> float:
    try:
        x = float(text)
    except ValueError:
        raise MalformedRow(f"coordinate {text!r} is not a number", line_no) from None
    if not math.isfinite(x):
        raise NonFiniteCoordinate(f"coordinate {text!r} is not finite", line_no)
    return x


def parse_value(text: str, line_no=None) -> float:
    word = text.strip().lower()
    if word in _BOOLEAN_WORDS:
        return _BOOLEAN_WORDS[word]
    try:
        v = float(word)
    except ValueError:
        raise MalformedRow(f"sensor value {text!r} is not a number", line_no) from None
    if not 0.0 <= v <= 1.0:
        raise ValueOutOfRange(f"sensor value {text!r} outside [0, 1]", line_no)
    return v


def _rows(fh, header):
    reader = csv.reader(fh)
    first = next(reader, None)
    if first is None:
        return
    if tuple(c.strip() for c in first) != header:
        raise MalformedRow(f"expected header {','.join(header)!r}, got {','.join(first)!r}", 1)
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(f"expected {len(header)} fields, got {len(row)}", reader.line_num)
        yield reader.line_num, row


def parse_location_csv(src) -> List[LocationSample]:
    with _open_text(src) as fh:
        return [
            LocationSample(
                row[0],
                parse_coordinate(row[2], n),
                parse_coordinate(row[3], n),
                parse_timestamp(row[1], n),
            )
            for n, row in _rows(fh, LOCATION_HEADER)
        ]


def parse_sensor_csv(src) -> List[SensorSample]:
    with _open_text(src) as fh:
        return [
            SensorSample(row[0], parse_value(row[2], n), parse_timestamp(row[1], n))
            for n, row in _rows(fh, SENSOR_HEADER)
        ]


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_location_csv(samples: Iterable[LocationSample], dst) -> None:
    with _open_text(dst, "w") as fh:
        w = _writer(fh)
        w.writerow(LOCATION_HEADER)
        for s in samples:
            w.writerow([s.user_id, s.t, format_float(s.x), format_float(s.y)])


def write_sensor_csv(samples: Iterable[SensorSample], dst) -> None:
    with _open_text(dst, "w") as fh:
        w = _writer(fh)
        w.writerow(SENSOR_HEADER)
        for s in samples:
            w.writerow([s.sensor_id, s.t, format_value(s.value)])


def write_truth_csv(truth, dst) -> None:
    with _open_text(dst, "w") as fh:
        w = _writer(fh)
        w.writerow(TRUTH_HEADER)
        for e in truth:
            w.writerow([e.sensor_id, e.t, e.actor])


def parse_truth_csv(src):
    from .simulate import TruthEvent

    with _open_text(src) as fh:
        return [
            TruthEvent(row[0], parse_timestamp(row[1], n), row[2])
            for n, row in _rows(fh, TRUTH_HEADER)
        ]


# -- NDJSON replay -----------------------------------------------------------


def record_to_json(rec: RawRecord) -> str:
    if isinstance(rec, SensorSample):
        obj = {"kind": "sensor", "sensor_id": rec.sensor_id, "epoch_ms": rec.t, "value": rec.value}
    else:
        obj = {"kind": "location", "user_id": rec.user_id, "epoch_ms": rec.t, "x": rec.x, "y": rec.y}
    return json.dumps(obj, separators=(",", ":"))


def emit_ndjson(records: Iterable[RawRecord]) -> Iterator[str]:
    for rec in records:
        yield record_to_json(rec) + "\n"


def _json_number(obj, key, line_no):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MalformedRow(f"field {key!r} must be a number", line_no)
    return v


def record_from_json(line: str, line_no=None) -> RawRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRow(f"invalid JSON: {exc.msg}", line_no) from None
    if not isinstance(obj, dict):
        raise MalformedRow("expected a JSON object", line_no)
    t = obj.get("epoch_ms")
    if isinstance(t, bool) or not isinstance(t, int) or t < 0:
        raise BadTimestamp(f"epoch_ms {t!r} is not a non-negative integer", line_no)
    kind = obj.get("kind")
    if kind == "sensor":
        v = float(_json_number(obj, "value", line_no))
        if not 0.0 <= v <= 1.0:
            raise ValueOutOfRange(f"sensor value {v!r} outside [0, 1]", line_no)
        if not isinstance(obj.get("sensor_id"), str):
            raise MalformedRow("sensor_id must be a string", line_no)
        return SensorSample(obj["sensor_id"], v, t)
    if kind == "location":
        x = float(_json_number(obj, "x", line_no))
        y = float(_json_number(obj, "y", line_no))
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NonFiniteCoordinate("coordinates must be finite", line_no)
        if not isinstance(obj.get("user_id"), str):
            raise MalformedRow("user_id must be a string", line_no)
        return LocationSample(obj["user_id"], x, y, t)
    raise MalformedRow(f"unknown kind {kind!r}", line_no)


class Replay:
    """Iterate raw records from NDJSON lines in arrival order.

    Blank and malformed lines are skipped; ``skipped`` counts them and
    ``errors`` keeps the reasons.
    """

    def __init__(self, lines: Iterable[str]):
        self._lines = lines
        self.skipped = 0
        self.errors: List[ParseError] = []

    def __iter__(self) -> Iterator[RawRecord]:
        for n, line in enumerate(self._lines, start=1):
            if not line.strip():
                self.skipped += 1
                continue
            try:
                yield record_from_json(line, n)
            except ParseError as exc:
                self.skipped += 1
                self.errors.append(exc)
                logger.warning("skipping replay %s", exc)


def replay_ndjson(lines: Iterable[str]) -> Replay:
    return Replay(lines)


def split_records(records: Iterable[RawRecord]) -> Tuple[List[SensorSample], List[LocationSample]]:
    sensors, locations = [], []
    for r in records:
        (sensors if isinstance(r, SensorSample) else locations).append(r)
    return sensors, locations


# -- area configuration ------------------------------------------------------


@dataclass(frozen=True)
class AreaConfig:
    sensors: Tuple[SensorModel, ...]
    delta_ms: int = DEFAULT_DELTA_MS
    version: int = 1

    def model(self, sensor_id: str) -> SensorModel:
        for m in self.sensors:
            if m.sensor_id == sensor_id:
                return m
        raise KeyError(sensor_id)


def area_config_schema() -> dict:
    text = resources.files("proxattr").joinpath("schemas/area_config.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_area_config(doc) -> AreaConfig:
    validator = jsonschema.Draft202012Validator(area_config_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    for err in errors:
        path = list(err.absolute_path)
        if path and path[-1] == "degree" and err.validator in ("minimum", "maximum"):
            raise DegreeOutOfRange(f"degree {err.instance!r} outside [0, 1]", path)
    if errors:
        err = errors[0]
        raise SchemaError(err.message, list(err.absolute_path))

    ids = [s["sensor_id"] for s in doc["sensors"]]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise SchemaError(f"duplicate sensor ids {dupes}", ["sensors"])

    models = []
    for i, s in enumerate(doc["sensors"]):
        areas = []
        for j, a in enumerate(s["areas"]):
            x0, y0, x1, y1 = a["box"]
            if x0 > x1 or y0 > y1:
                raise InvalidBox(f"box {a['box']} has min > max", ["sensors", i, "areas", j, "box"])
            areas.append(InteractionArea(BBox(x0, y0, x1, y1), float(a["degree"]), a.get("label", "")))
        models.append(SensorModel(s["sensor_id"], tuple(areas), Policy(s["policy"])))
    return AreaConfig(tuple(models), doc.get("delta_ms", DEFAULT_DELTA_MS), doc["version"])


def load_area_config(path) -> AreaConfig:
    with _open_text(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    return validate_area_config(doc)


def area_config_to_dict(config: AreaConfig) -> dict:
    return {
        "version": config.version,
        "delta_ms": config.delta_ms,
        "sensors": [
            {
                "sensor_id": m.sensor_id,
                "policy": m.policy.value,
                "areas": [
                    {"label": a.label, "box": a.box.as_list(), "degree": a.degree} for a in m.areas
                ],
            }
            for m in config.sensors
        ],
    }


def write_area_config(config: AreaConfig, dst) -> None:
    with _open_text(dst, "w") as fh:
        json.dump(area_config_to_dict(config), fh, indent=2)
        fh.write("\n")


# -- foreign CSV import ------------------------------------------------------


def _parse_time(text, time_format, line_no):
    text = text.strip()
    try:
        if time_format == "epoch_ms":
            return int(float(text)) if "." in text else int(text)
        if time_format == "epoch_s":
            return int(round(float(text) * 1000))
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise BadTimestamp(f"cannot parse time {text!r} as {time_format}", line_no) from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(round(dt.timestamp() * 1000))


def import_csv(
    src,
    kind: str,
    time_column: str,
    time_format: str = "epoch_ms",
    id_column: Optional[str] = None,
    fixed_id: Optional[str] = None,
    x_column: str = "x",
    y_column: str = "y",
    value_column: str = "value",
    value_map: Optional[dict] = None,
    delimiter: str = ",",
    scale: float = 1.0,
) -> List[RawRecord]:
    """Convert an arbitrary delimited export into location or sensor samples.

    Either ``id_column`` names the column carrying the user/sensor id, or
    ``fixed_id`` is used for every row (one file per stream). ``value_map``
    translates state strings such as ``on``/``off`` to activations; rows whose
    state is mapped to ``None`` are dropped. Coordinates are multiplied by
    ``scale`` (0.001 for exports in millimetres).
    """
    if (id_column is None) == (fixed_id is None):
        raise ValueError("give exactly one of id_column or fixed_id")
    out: List[RawRecord] = []
    with _open_text(src) as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        for row in reader:
            n = reader.line_num
            try:
                ident = fixed_id if fixed_id is not None else row[id_column]
                t = _parse_time(row[time_column], time_format, n)
                if kind == "location":
                    x = parse_coordinate(row[x_column], n) * scale
                    y = parse_coordinate(row[y_column], n) * scale
                    out.append(LocationSample(ident, x, y, t))
                else:
                    raw = row[value_column]
                    if value_map is not None and raw.strip() in value_map:
                        value = value_map[raw.strip()]
                        if value is None:
                            continue
                    else:
                        value = parse_value(raw, n)
                    out.append(SensorSample(ident, float(value), t))
            except KeyError as exc:
                raise MalformedRow(f"missing column {exc.args[0]!r}", n) from None
            except TypeError:
                raise MalformedRow("row is shorter than the header", n) from None
    if any(r.t < 0 for r in out):
        raise BadTimestamp("imported timestamps must be non-negative")
    return out


def canonical_csv(records: Iterable[RawRecord], kind: str) -> str:
    buf = io.StringIO()
    (write_location_csv if kind == "location" else write_sensor_csv)(records, buf)
    return buf.getvalue()


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return str(path)
