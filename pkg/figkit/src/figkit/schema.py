"""CSV loading with schema validation against the shipped column contract."""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path


class SchemaError(ValueError):
    """Input does not conform to the documented CSV schema."""


def load_schema() -> dict:
    with resources.files("figkit.resources").joinpath("csv_schema.json").open() as fh:
        return json.load(fh)


def required_columns(kind: str) -> list[str]:
    schema = load_schema()
    if kind not in schema:
        raise SchemaError(f"unknown table kind {kind!r}")
    return schema[kind]["columns"]


def load_table(path, kind: str) -> dict:
    """Read a CSV and return {column: list}, failing fast on missing columns."""
    text = Path(path).read_text()
    lines = [ln for ln in text.split("\n") if ln]
    required = required_columns(kind)
    header = lines[0].split(",") if lines else []
    missing = [col for col in required if col not in header]
    if missing:
        raise SchemaError(f"{path}: missing required column(s) "
                          f"{', '.join(repr(c) for c in missing)} "
                          f"for panel input {kind!r}")
    idx = {col: header.index(col) for col in header}
    table: dict = {col: [] for col in header}
    for ln in lines[1:]:
        cells = ln.split(",")
        for col, j in idx.items():
            cell = cells[j] if j < len(cells) else ""
            if cell == "":
                table[col].append(math.nan)
            else:
                try:
                    table[col].append(float(cell))
                except ValueError:
                    table[col].append(cell)
    return table
