"""Result serialization: CSV, JSON, and a human-readable table."""
from __future__ import annotations

import json
from typing import Sequence

from .config import ResultRow

CSV_COLUMNS = (
    "policy", "arrival_prob", "seed", "arrived", "departed",
    "loss", "dropped", "missed", "delay", "mql", "throughput",
)
_FLOAT_COLUMNS = {"arrival_prob", "delay", "mql", "throughput"}


def _cell(row: ResultRow, column: str) -> str:
    value = getattr(row, column)
    if column in _FLOAT_COLUMNS:
        return f"{value:.5f}"
    return str(value)


def emit_csv(rows: Sequence[ResultRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(_cell(row, col) for col in CSV_COLUMNS) for row in rows)
    return "\n".join(lines) + "\n"


def emit_json(rows: Sequence[ResultRow]) -> str:
    # full-precision floats so parsing the output reproduces the rows exactly
    payload = [{col: getattr(row, col) for col in CSV_COLUMNS} for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def emit_table(rows: Sequence[ResultRow]) -> str:
    arrivals = sorted({row.arrival_prob for row in rows})
    seeds = {row.seed for row in rows}
    if len(arrivals) == 1 and len(seeds) == 1:
        return _policy_column_table(rows)
    widths = [
        max(len(col), max((len(_cell(r, col)) for r in rows), default=0))
        for col in CSV_COLUMNS
    ]
    lines = ["  ".join(col.ljust(w) for col, w in zip(CSV_COLUMNS, widths)).rstrip()]
    for row in rows:
        lines.append(
            "  ".join(_cell(row, col).rjust(w) for col, w in zip(CSV_COLUMNS, widths)).rstrip()
        )
    return "\n".join(lines) + "\n"


def _policy_column_table(rows: Sequence[ResultRow]) -> str:
    # single regime: one column per policy, one line per metric
    metrics = ("arrived", "departed", "loss", "dropped", "missed", "delay", "mql", "throughput")
    header = f"arrival_prob={rows[0].arrival_prob:.5f} seed={rows[0].seed}"
    names = [row.policy for row in rows]
    width = max(12, *(len(n) for n in names))
    lines = [header, "metric".ljust(12) + "".join(n.rjust(width + 2) for n in names)]
    for metric in metrics:
        cells = "".join(_cell(row, metric).rjust(width + 2) for row in rows)
        lines.append(metric.ljust(12) + cells)
    return "\n".join(lines) + "\n"


def emit(rows: Sequence[ResultRow], output_format: str) -> str:
    """Serialize rows; pure, so identical rows give identical bytes."""
    if not rows:
        raise ValueError("no rows to emit")
    if output_format == "csv":
        return emit_csv(rows)
    if output_format == "json":
        return emit_json(rows)
    if output_format == "table":
        return emit_table(rows)
    raise ValueError(f"unknown output format {output_format!r}")


def parse_json(text: str) -> list[ResultRow]:
    """Inverse of emit_json."""
    return [ResultRow(**entry) for entry in json.loads(text)]
