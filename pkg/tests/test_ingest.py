import io
import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxattr import ingest
from proxattr.errors import (
    BadTimestamp,
    DegreeOutOfRange,
    InvalidBox,
    MalformedRow,
    NonFiniteCoordinate,
    SchemaError,
    ValueOutOfRange,
)
from proxattr.model import BBox, LocationSample, Policy, SensorSample

from .strategies import location_samples, sensor_samples

DOCS = Path(__file__).resolve().parents[1] / "docs"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_parse_location_row(tmp_path):
    p = write(tmp_path, "loc.csv", "user_id,epoch_ms,x,y\nA,1000,1.5,2.0\n")
    assert ingest.parse_location_csv(p) == [LocationSample("A", 1.5, 2.0, 1000)]


@pytest.mark.parametrize(
    "row, exc",
    [
        ("A,1000,NaN,2.0", NonFiniteCoordinate),
        ("A,1000,inf,2.0", NonFiniteCoordinate),
        ("A,1000,abc,2.0", MalformedRow),
        ("A,10.5,1,2", BadTimestamp),
        ("A,-3,1,2", BadTimestamp),
        ("A,1000,1", MalformedRow),
    ],
)
def test_location_errors_carry_line(tmp_path, row, exc):
    p = write(tmp_path, "loc.csv", f"user_id,epoch_ms,x,y\n{row}\n")
    with pytest.raises(exc) as info:
        ingest.parse_location_csv(p)
    assert info.value.line_no == 2


def test_wrong_header(tmp_path):
    with pytest.raises(MalformedRow):
        ingest.parse_location_csv(write(tmp_path, "loc.csv", "user,t,x,y\n"))


def test_empty_file(tmp_path):
    assert ingest.parse_sensor_csv(write(tmp_path, "s.csv", "")) == []
    assert ingest.parse_sensor_csv(write(tmp_path, "s.csv", "sensor_id,epoch_ms,value\n")) == []


def test_parse_sensor_row(tmp_path):
    p = write(tmp_path, "s.csv", "sensor_id,epoch_ms,value\nfridge,2000,1\nfridge,2500,off\n")
    assert ingest.parse_sensor_csv(p) == [SensorSample("fridge", 1.0, 2000), SensorSample("fridge", 0.0, 2500)]


def test_sensor_value_out_of_range(tmp_path):
    with pytest.raises(ValueOutOfRange) as info:
        ingest.parse_sensor_csv(write(tmp_path, "s.csv", "sensor_id,epoch_ms,value\nfridge,2000,2\n"))
    assert info.value.line_no == 2


CONFIG = {
    "version": 1,
    "delta_ms": 15000,
    "sensors": [
        {
            "sensor_id": "cutlery",
            "policy": "exclusive",
            "areas": [
                {"label": "cutlery", "box": [1.0, 0.0, 2.0, 0.8], "degree": 1},
                {"label": "other", "box": [0, 0, 6, 4], "degree": 0},
            ],
        }
    ],
}


def test_load_config(tmp_path):
    cfg = ingest.load_area_config(write(tmp_path, "a.json", json.dumps(CONFIG)))
    (m,) = cfg.sensors
    assert m.policy is Policy.EXCLUSIVE and cfg.delta_ms == 15000
    assert [a.degree for a in m.areas] == [1.0, 0.0]
    assert m.areas[0].box == BBox(1.0, 0.0, 2.0, 0.8)


def _mutated(path, value):
    doc = json.loads(json.dumps(CONFIG))
    target = doc
    for key in path[:-1]:
        target = target[key]
    target[path[-1]] = value
    return doc


@pytest.mark.parametrize(
    "path, value, exc",
    [
        (["sensors", 0, "areas", 0, "degree"], 1.5, DegreeOutOfRange),
        (["sensors", 0, "areas", 0, "degree"], -0.1, DegreeOutOfRange),
        (["sensors", 0, "areas", 0, "box"], [3, 0, 2, 1], InvalidBox),
        (["sensors", 0, "areas", 0, "box"], [0, 2, 1, 1], InvalidBox),
        (["sensors", 0, "policy"], "shared", SchemaError),
        (["sensors", 0, "colour"], "red", SchemaError),
        (["version"], 2, SchemaError),
        (["sensors", 0, "areas"], [], SchemaError),
    ],
)
def test_config_rejections(path, value, exc):
    with pytest.raises(exc) as info:
        ingest.validate_area_config(_mutated(path, value))
    assert list(info.value.path)[:2] == ["sensors", 0] or path == ["version"]


def test_config_roundtrip(tmp_path):
    cfg = ingest.validate_area_config(CONFIG)
    out = tmp_path / "a.json"
    ingest.write_area_config(cfg, out)
    assert ingest.load_area_config(out) == cfg


def test_docs_schema_matches_package():
    assert json.loads((DOCS / "area_config.schema.json").read_text()) == ingest.area_config_schema()


def test_replay_records_and_skips():
    lines = [
        '{"kind":"sensor","sensor_id":"fridge","epoch_ms":1,"value":1}\n',
        "\n",
        '{"kind":"location","user_id":"A","epoch_ms":2,"x":0.5,"y":1}\n',
        "not json\n",
        '{"kind":"sensor","sensor_id":"fridge","epoch_ms":3,"value":4}\n',
        '{"kind":"door","epoch_ms":3}\n',
    ]
    replay = ingest.replay_ndjson(lines)
    assert list(replay) == [SensorSample("fridge", 1.0, 1), LocationSample("A", 0.5, 1.0, 2)]
    assert replay.skipped == 4
    assert [e.line_no for e in replay.errors] == [4, 5, 6]


@given(st.lists(st.one_of(sensor_samples, location_samples)))
def test_ndjson_roundtrip(records):
    assert list(ingest.replay_ndjson(ingest.emit_ndjson(records))) == records


@given(st.lists(location_samples))
def test_location_csv_roundtrip(samples):
    text = ingest.canonical_csv(samples, "location")
    assert ingest.parse_location_csv(io.StringIO(text)) == samples
    again = ingest.canonical_csv(ingest.parse_location_csv(io.StringIO(text)), "location")
    assert again == text


def test_import_foreign_csv(tmp_path):
    src = write(
        tmp_path,
        "ha.csv",
        "entity_id;state;last_changed\n"
        "binary_sensor.fridge;on;2023-01-01T10:00:00Z\n"
        "binary_sensor.fridge;unavailable;2023-01-01T10:00:05Z\n"
        "binary_sensor.fridge;off;2023-01-01T10:00:07.250+00:00\n",
    )
    recs = ingest.import_csv(
        src, "sensor", "last_changed", "iso", id_column="entity_id", value_column="state",
        value_map={"on": 1.0, "off": 0.0, "unavailable": None}, delimiter=";",
    )
    assert recs == [
        SensorSample("binary_sensor.fridge", 1.0, 1672567200000),
        SensorSample("binary_sensor.fridge", 0.0, 1672567207250),
    ]


def test_import_locations_epoch_seconds(tmp_path):
    src = write(tmp_path, "tag.csv", "ts,posx,posy\n1672567200.5,1200,800\n")
    recs = ingest.import_csv(src, "location", "ts", "epoch_s", fixed_id="A", x_column="posx", y_column="posy")
    assert recs == [LocationSample("A", 1200.0, 800.0, 1672567200500)]
