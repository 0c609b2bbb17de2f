"""Serializable experiment reports (JSON, CSV and plain text)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .tree import format_path


def jsonable(obj):
    """Convert payload values: fractions become ``"p/q"`` strings, vertex refs dotted strings.

    Exact quantities that happen to be integers are wrapped with :func:`exact`
    by the caller so they also serialize as strings.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else str(obj.numerator)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, VertexRef):
        return format_path(obj.v)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(x) for x in obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass(frozen=True)
class VertexRef:
    """Marks a vertex path inside a payload so it serializes as ``"0.1.2"``."""

    v: tuple


def vref(v):
    return None if v is None else VertexRef(tuple(v))


def exact(x):
    """Exact scalar as a ``"p/q"`` string (``"inf"`` for an infinite value)."""
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float):
        return x
    return str(Fraction(x))


@dataclass
class ExperimentReport:
    command: dict
    tree_fingerprint: str
    results: dict
    exactness: dict = field(default_factory=dict)
    wall_time: float = 0.0
    table: list = field(default_factory=list)
    columns: tuple = ()

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "tree_fingerprint": self.tree_fingerprint,
            "results": jsonable(self.results),
            "exactness": self.exactness,
            "wall_time": round(self.wall_time, 6),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.columns:
            w.writerow(self.columns)
            for row in self.table:
                w.writerow([_cell(x) for x in row])
        else:
            w.writerow(("key", "value"))
            for k, v in jsonable(self.results).items():
                w.writerow((k, json.dumps(v) if isinstance(v, (dict, list)) else v))
        return buf.getvalue()

    def to_plain(self) -> str:
        lines = [f"{self.command.get('verb')}  tree={self.tree_fingerprint[:12]}"]
        for k, v in jsonable(self.results).items():
            if isinstance(v, (dict, list)):
                v = json.dumps(v)
                if len(v) > 120:
                    v = v[:117] + "..."
            lines.append(f"  {k}: {v}")
        if self.columns:
            lines.append("  " + "  ".join(self.columns))
            for row in self.table:
                lines.append("  " + "  ".join(str(_cell(x)) for x in row))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "plain":
            return self.to_plain()
        return self.to_json()


def _cell(x):
    out = jsonable(x)
    if isinstance(out, list):
        return json.dumps(out)
    return "" if out is None else out
