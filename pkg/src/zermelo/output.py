"""Deterministic CSV/JSON emission.

Every number is written with 17 significant digits so that repeated runs
with identical configs are byte-identical and values round-trip exactly.
JSON is emitted by hand for the same reason: the formatting of floats never
depends on library internals.
"""

from __future__ import annotations

import math
from pathlib import Path

__all__ = ["format_number", "to_json", "write_csv", "write_text"]


def format_number(value) -> str:
    if value is None:
        return "NA"
    value = float(value)
    if math.isnan(value):
        return "NA"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def _json_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, int):
        return str(value)
    num = float(value)
    if math.isnan(num) or math.isinf(num):
        return f'"{format_number(num)}"'
    return format_number(num)


def to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{key}": {to_json(val, indent + 1)}' for key, val in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(val, indent + 1)}" for val in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _json_scalar(obj)


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def write_csv(path, header: list[str], rows) -> None:
    """Write rows of floats/strings; floats through :func:`format_number`."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            cells.append(cell if isinstance(cell, str) else format_number(cell))
        lines.append(",".join(cells))
    write_text(path, "\n".join(lines) + "\n")
