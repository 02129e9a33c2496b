"""Deterministic text encodings shared by reports and the CLI.

Floats are written with 17 significant digits, which round-trips every
IEEE double. JSON has no literal for infinities or NaN, so those become the
strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

__all__ = ["fmt_float", "to_json", "to_csv", "parse_float"]


def fmt_float(v: float) -> str:
    """
    >>> fmt_float(0.1)
    '0.10000000000000001'
    >>> fmt_float(2.0), fmt_float(float("inf"))
    ('2', 'inf')
    """
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def parse_float(text: str) -> float:
    return float(text)


def _json_value(v: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_float(v) if math.isfinite(v) else json.dumps(fmt_float(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, Mapping):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(val, indent, level + 1)}" for k, val in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = [pad + _json_value(val, indent, level + 1) for val in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(v).__name__}")


def to_json(obj: Any, indent: int = 2) -> str:
    """Encode ``obj`` with insertion-ordered keys and 17-digit floats."""
    return _json_value(obj, indent, 0) + "\n"


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(c) for c in row])
    return buf.getvalue()
