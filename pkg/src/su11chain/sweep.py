"""Tabular sweep results with deterministic CSV and JSON rendering."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence


def format_value(x) -> str:
    """Fixed 17-significant-digit rendering so identical runs give identical bytes."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, float) or hasattr(x, "__float__") and not isinstance(x, str):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    if x is None:
        return ""
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    v = float(x)
    return v if math.isfinite(v) else str(v)


@dataclass
class SweepResult:
    """Rows of values under named columns, plus the configuration that produced them."""

    columns: Sequence[str]
    rows: List[Sequence[Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def column(self, name):
        i = list(self.columns).index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        out = io.StringIO()
        for key in sorted(self.metadata):
            out.write(f"# {key}={format_value(self.metadata[key])}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(format_value(v) for v in row) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        doc = {
            "metadata": {k: _json_value(self.metadata[k]) for k in sorted(self.metadata)},
            "columns": list(self.columns),
            "rows": [[_json_value(v) for v in row] for row in self.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def render(self, fmt="csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown output format {fmt!r}")
