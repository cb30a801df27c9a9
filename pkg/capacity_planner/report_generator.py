"""
Report generation module for the capacity planner.

This module provides functionality for rendering command results as human
tables, JSON or CSV. A Report holds named figures (each with its unrounded
value, unit and display string) and optional tabular records such as audit
groups or loss events.
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import tabulate

OUTPUT_FORMATS = ("table", "json", "csv")


@dataclass(frozen=True)
class Figure:
    name: str
    value: Any
    unit: str
    display: str


class Report:
    """
    Figures and records produced by one command.
    """

    def __init__(self, command, title):
        """
        Initialize an empty report.

        Args:
            command (str): Subcommand name, recorded in JSON output
            title (str): Heading of the table output
        """
        self.command = command
        self.title = title
        self.figures = []
        self.records = []

    def add(self, name, value, unit, display=None):
        """Append a figure; display defaults to str(value)."""
        self.figures.append(Figure(name, value, unit, display if display is not None else str(value)))
        return self

    def add_records(self, records):
        self.records.extend(records)
        return self


def _jsonable(value):
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ReportGenerator:
    """
    Renders reports in one of the supported output formats.
    """

    def __init__(self, output_format="table"):
        """
        Initialize the ReportGenerator.

        Args:
            output_format (str): One of "table", "json", "csv"
        """
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {output_format!r}")
        self.output_format = output_format

    def generate(self, report):
        """
        Render a report.

        Args:
            report (Report): The report

        Returns:
            str: Rendered text, newline terminated
        """
        if self.output_format == "json":
            return self._create_json(report)
        if self.output_format == "csv":
            return self._create_csv(report)
        return self._create_table(report)

    def _create_table(self, report):
        """Create the human readable table output."""
        parts = [report.title, "=" * len(report.title)]
        if report.figures:
            rows = [(figure.name, figure.display) for figure in report.figures]
            parts.append(tabulate.tabulate(rows, headers=["figure", "value"], tablefmt="simple"))
        if report.records:
            columns = list(report.records[0])
            rows = [[self._display_cell(record[column]) for column in columns] for record in report.records]
            parts.append("")
            parts.append(tabulate.tabulate(rows, headers=columns, tablefmt="simple", disable_numparse=True))
        return "\n".join(parts) + "\n"

    def _display_cell(self, value):
        if isinstance(value, float):
            return format(value, ".6g")
        if value is None:
            return ""
        return str(value)

    def _create_json(self, report):
        """Create the JSON output; key order and float formatting are fixed."""
        document = {
            "command": report.command,
            "figures": [
                {
                    "name": figure.name,
                    "value": _jsonable(figure.value),
                    "unit": figure.unit,
                    "display": figure.display,
                }
                for figure in report.figures
            ],
            "records": [
                {key: _jsonable(value) for key, value in record.items()}
                for record in report.records
            ],
        }
        return json.dumps(document, indent=2, allow_nan=False) + "\n"

    def _create_csv(self, report):
        """Create the CSV output: the records, or the figures when there are none."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if report.records:
            columns = list(report.records[0])
            writer.writerow(columns)
            for record in report.records:
                writer.writerow([self._csv_cell(record[column]) for column in columns])
        else:
            writer.writerow(["name", "value", "unit", "display"])
            for figure in report.figures:
                writer.writerow([figure.name, self._csv_cell(figure.value), figure.unit, figure.display])
        return buffer.getvalue()

    def _csv_cell(self, value):
        value = _jsonable(value)
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return repr(value)
        return str(value)
