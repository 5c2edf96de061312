"""Deterministic CSV output shared by the CLI and analysis helpers.

Floats are written with %.17g (shortest exact round trip is not needed;
17 significant digits always round-trips float64), newlines are always
plain \\n, and columns follow the shipped schema file, so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

from .errors import SchemaError


def fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return "%.17g" % value
    return str(value)


def write_csv(path, columns, rows) -> None:
    """rows: iterable of dicts (missing keys -> empty) or sequences."""
    lines = [",".join(columns)]
    for row in rows:
        if isinstance(row, dict):
            cells = [fmt_cell(row.get(col)) for col in columns]
        else:
            cells = [fmt_cell(v) for v in row]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Return (columns, list of dicts with float conversion where possible)."""
    text = Path(path).read_text()
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise SchemaError(f"{path}: empty CSV")
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        row = {}
        for col, cell in zip(columns, cells):
            if cell == "":
                row[col] = math.nan
            else:
                try:
                    row[col] = float(cell)
                except ValueError:
                    row[col] = cell
        rows.append(row)
    return columns, rows


def load_schema() -> dict:
    with resources.files("rbmcascade.resources").joinpath("csv_schema.json").open() as fh:
        return json.load(fh)


def schema_columns(kind: str) -> list[str]:
    schema = load_schema()
    if kind not in schema:
        raise SchemaError(f"no schema for table kind {kind!r}")
    return schema[kind]["columns"]
