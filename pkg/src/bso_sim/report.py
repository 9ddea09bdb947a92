"""Deterministic CSV / JSON tables.

CSV layout: one ``#`` comment line with units, one header row of
snake_case column names, then rows with every value written as ``%.16e``
(17 significant digits).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class Table:
    columns: dict[str, np.ndarray]
    units: str
    summary: dict = field(default_factory=dict)


def _fmt(value) -> str:
    return format(float(value), ".16e")


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def write_csv(path: Path, table: Table) -> Path:
    names = list(table.columns)
    data = [np.atleast_1d(np.asarray(table.columns[n], dtype=float)) for n in names]
    with open(path, "w", newline="") as fh:
        fh.write(f"# {table.units}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_fmt(v) for v in row])
    return path


def write_json_summary(path: Path, summary: dict) -> Path:
    path.write_text(json.dumps({k: _plain(v) for k, v in summary.items()}, indent=2, sort_keys=True) + "\n")
    return path


def write_json(path: Path, table: Table, experiment: str) -> Path:
    doc = {
        "experiment": experiment,
        "units": table.units,
        "columns": list(table.columns),
        "data": {k: np.asarray(v, dtype=float).tolist() for k, v in table.columns.items()},
        "summary": {k: _plain(v) for k, v in table.summary.items()},
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a table written by :func:`write_csv` into ``{column: array}``."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    header, body = rows[0], rows[1:]
    values = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: values[:, i] for i, name in enumerate(header)}
