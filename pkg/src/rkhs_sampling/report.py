"""CSV and JSON serialisation of Monte Carlo reports.

CSV floats use 17 significant digits; JSON floats use Python's shortest
round-trip repr, so ``json.loads`` reproduces every value exactly.
Non-finite certificates are written as ``inf`` (CSV) / ``Infinity`` (JSON).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict

from .experiment import CSV_COLUMNS, AggregateReport, TrialRecord


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def trials_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def report_json(report: AggregateReport, include_timing: bool = False) -> str:
    trials = []
    for rec in report.records:
        d = asdict(rec)
        if not include_timing:
            d.pop("wall_clock")
        trials.append(d)
    payload = {
        "config": report.config,
        "aggregate": report.summary(include_timing=include_timing),
        "trials": trials,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit_report(report: AggregateReport, fmt: str, path, include_timing: bool = False) -> None:
    if fmt == "csv":
        text = trials_csv(report.records)
    elif fmt == "json":
        text = report_json(report, include_timing=include_timing)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def parse_trials_csv(text: str) -> list[dict]:
    """Inverse of :func:`trials_csv` for the numeric/boolean columns."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for key, raw in row.items():
            if raw == "":
                parsed[key] = None
            elif raw in ("true", "false"):
                parsed[key] = raw == "true"
            elif key in ("trial_index", "seed", "n", "k", "rank"):
                parsed[key] = int(raw)
            else:
                parsed[key] = float(raw)
        rows.append(parsed)
    return rows
