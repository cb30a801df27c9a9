import csv
import io
import json
import math
from fractions import Fraction

import pytest

from capacity_planner.report_generator import Report, ReportGenerator


@pytest.fixture
def report():
    report = Report("stat", "Statistical over-subscription")
    report.add("c_stat", 57_436_013.6, "bit/s", "57.44 Mbit/s")
    report.add("ratio", Fraction(12, 5), "ratio", "2.4:1")
    report.add("between", math.inf, "segment", "inf")
    return report


@pytest.fixture
def records_report():
    report = Report("fabric", "Fabric over-subscription audit")
    report.add("groups", 2, "count")
    report.add_records([
        {"node": "a1", "ratio": 12.0, "verdict": "ok", "strict": True},
        {"node": "d1", "ratio": 5.0, "verdict": "violation", "strict": False},
    ])
    return report


class TestReport:

    def test_display_defaults_to_value(self, records_report):
        (groups,) = records_report.figures
        assert groups.display == "2"

    def test_figures_keep_insertion_order(self, report):
        assert [figure.name for figure in report.figures] == ["c_stat", "ratio", "between"]


class TestReportGenerator:

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            ReportGenerator("xml")

    def test_table(self, report):
        text = ReportGenerator("table").generate(report)
        lines = text.splitlines()
        assert lines[0] == "Statistical over-subscription"
        assert lines[1] == "=" * len(lines[0])
        assert "57.44 Mbit/s" in text
        assert "2.4:1" in text

    def test_table_with_records(self, records_report):
        text = ReportGenerator("table").generate(records_report)
        assert "violation" in text
        assert "d1" in text

    def test_json_schema(self, report):
        document = json.loads(ReportGenerator("json").generate(report))
        assert document["command"] == "stat"
        assert document["records"] == []
        assert [figure["name"] for figure in document["figures"]] == ["c_stat", "ratio", "between"]
        c_stat, ratio, between = document["figures"]
        assert c_stat == {"name": "c_stat", "value": 57_436_013.6, "unit": "bit/s", "display": "57.44 Mbit/s"}
        assert ratio["value"] == 2.4
        assert between["value"] is None

    def test_json_is_byte_identical(self, report):
        generator = ReportGenerator("json")
        assert generator.generate(report) == generator.generate(report)

    def test_csv_figures(self, report):
        rows = list(csv.DictReader(io.StringIO(ReportGenerator("csv").generate(report))))
        assert rows[0] == {"name": "c_stat", "value": "57436013.6", "unit": "bit/s", "display": "57.44 Mbit/s"}
        assert rows[2]["value"] == ""

    def test_csv_rows_match_json_records(self, records_report):
        rows = list(csv.DictReader(io.StringIO(ReportGenerator("csv").generate(records_report))))
        records = json.loads(ReportGenerator("json").generate(records_report))["records"]
        assert len(rows) == len(records)
        for row, record in zip(rows, records):
            assert row["node"] == record["node"]
            assert float(row["ratio"]) == record["ratio"]
            assert row["strict"] == json.dumps(record["strict"])
