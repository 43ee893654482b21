import json

import jsonschema
import pytest

from proxattr import report
from proxattr.model import OTHERS

# counts published for the case study: rows A, B, others; columns sensors
TABLE2 = {
    "A": {"cutlery": 27, "dishwasher": 9, "fridge": 38, "microwave": 0},
    "B": {"cutlery": 30, "dishwasher": 1, "fridge": 68, "microwave": 3},
    OTHERS: {"cutlery": 41, "dishwasher": 14, "fridge": 30, "microwave": 8},
}


def table2_rows():
    rows, t = [], 0
    for owner, counts in TABLE2.items():
        for sensor, n in counts.items():
            for _ in range(n):
                degrees = {"A": 0.0, "B": 0.0}
                if owner != OTHERS:
                    degrees[owner] = 0.5
                rows.append(report.TimelineRow(t, sensor, "multiple", 1.0, degrees, owner))
                t += 15_000
    return rows


@pytest.fixture
def timeline_csv(tmp_path):
    path = tmp_path / "timeline.csv"
    report.write_timeline(table2_rows(), ["A", "B"], path)
    return path


def test_timeline_roundtrip(timeline_csv):
    users, rows = report.read_timeline(timeline_csv)
    assert users == ["A", "B"]
    assert rows == table2_rows()


def test_table2_counts_and_summary(timeline_csv):
    users, rows = report.read_timeline(timeline_csv)
    table = report.count_table(rows, users)
    assert [table.total(s) for s in table.sensors] == [98, 24, 136, 11]
    summary = table.per_user()
    assert summary["A"]["top_sensor"] == "fridge" and summary["A"]["top_count"] == 38
    assert summary["A"]["shares"]["dishwasher"] == 9 / 24
    assert summary["B"]["top_sensor"] == "fridge" and summary["B"]["top_count"] == 68


def test_renderers(timeline_csv):
    users, rows = report.read_timeline(timeline_csv)
    table = report.count_table(rows, users)
    csv_text = report.render_csv(table)
    assert csv_text.splitlines()[-1] == "Total,98,24,136,11"
    assert csv_text.splitlines()[1] == "A,27,9,38,0"
    text = report.render_table(table)
    assert "A: top sensor fridge (38)" in text
    doc = json.loads(report.render_json(table))
    jsonschema.validate(doc, report.report_schema())
    assert doc["counts"][OTHERS] == TABLE2[OTHERS]


def test_empty_table():
    table = report.count_table([])
    assert table.sensors == [] and table.rows == [OTHERS]
    jsonschema.validate(json.loads(report.render_json(table)), report.report_schema())


def test_user_without_activations_stays_in_table():
    table = report.count_table([("fridge", OTHERS)], users=["A"])
    assert table.rows == ["A", OTHERS]
    assert table.per_user()["A"]["top_sensor"] is None
