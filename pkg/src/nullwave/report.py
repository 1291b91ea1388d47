"""Grid specifications and deterministic report containers.

Reports serialize to CSV (fixed column order, one row per grid point) and
to JSON ({"schema": 1, "points": [...], "aggregate": {...}, ...}).  Output
is byte-identical across runs and worker counts: rows are assembled in
grid-lexicographic order and floats are formatted with repr.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .spinor import MinkVec

AXIS_NAMES = ("t", "x1", "x2", "x3")


@dataclass(frozen=True)
class GridSpec:
    """Per-axis (min, max, count) for a rectangular evaluation grid."""

    axes: tuple[tuple[float, float, int], ...]

    def __post_init__(self):
        if len(self.axes) != 4:
            raise ConfigError("grid needs exactly four axes")
        for lo, hi, n in self.axes:
            if n < 1:
                raise ConfigError("grid counts must be >= 1")
            if hi < lo:
                raise ConfigError("grid axis has max < min")

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int) -> "GridSpec":
        return cls(((lo, hi, n),) * 4)

    @classmethod
    def from_json(cls, obj) -> "GridSpec":
        if isinstance(obj, dict):
            try:
                axes = tuple(
                    (float(obj[k][0]), float(obj[k][1]), int(obj[k][2]))
                    for k in AXIS_NAMES
                )
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad grid spec: {exc}") from exc
            return cls(axes)
        if isinstance(obj, (list, tuple)) and len(obj) == 4:
            return cls(tuple((float(a[0]), float(a[1]), int(a[2])) for a in obj))
        raise ConfigError("grid must be a mapping of axes or a list of four triples")

    def to_json(self) -> dict:
        return {k: [lo, hi, n] for k, (lo, hi, n) in zip(AXIS_NAMES, self.axes)}

    def values(self, axis: int) -> np.ndarray:
        lo, hi, n = self.axes[axis]
        return np.linspace(lo, hi, n)

    def points(self) -> list[MinkVec]:
        """All grid points in lexicographic axis order."""
        axes = [self.values(a) for a in range(4)]
        return [MinkVec(*c) for c in product(*axes)]

    def point_count(self) -> int:
        return int(np.prod([n for _, _, n in self.axes]))

    def min_count(self) -> int:
        return min(n for _, _, n in self.axes)


def worker_count(explicit: Optional[int] = None) -> int:
    """Worker pool size; capped by the NULLWAVE_THREADS environment variable."""
    env = os.environ.get("NULLWAVE_THREADS")
    cap = None
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            cap = None
    n = explicit if explicit is not None else (cap if cap is not None else 1)
    if cap is not None:
        n = min(n, cap)
    return max(1, n)


def ordered_map(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Map preserving input order; results are independent of scheduling."""
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def fmt(value) -> str:
    """Deterministic scalar formatting for CSV cells."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return repr(int(value))
    return repr(float(value))


def _jsonable(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    return value


@dataclass
class Report:
    """Tabular per-point results plus aggregates and verdicts."""

    command: str
    label: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def add_row(self, row: dict) -> None:
        self.rows.append(row)

    def numeric_columns(self) -> list[str]:
        skip = set(AXIS_NAMES) | {"flag"}
        return [c for c in self.columns if c not in skip]

    def aggregate(self) -> dict:
        agg: dict = {"points": len(self.rows)}
        flagged = sum(1 for r in self.rows if r.get("flag"))
        agg["flagged"] = flagged
        for c in self.numeric_columns():
            vals = [r[c] for r in self.rows if r.get(c) is not None]
            if vals:
                agg[f"max_{c}"] = float(max(vals))
                agg[f"mean_{c}"] = float(sum(vals) / len(vals))
        return agg

    def column_max(self, column: str) -> Optional[float]:
        vals = [r[column] for r in self.rows if r.get(column) is not None]
        return float(max(vals)) if vals else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "schema": 1,
            "command": self.command,
            "label": self.label,
            "columns": self.columns,
            "points": [
                {c: _jsonable(row.get(c)) for c in self.columns if row.get(c) is not None or c == "flag"}
                for row in self.rows
            ],
            "aggregate": _jsonable(self.aggregate()),
            "verdicts": _jsonable(self.verdicts),
            "meta": _jsonable(self.meta),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def render(self, format: str) -> str:
        if format == "csv":
            return self.to_csv()
        if format == "json":
            return self.to_json()
        raise ConfigError(f"unknown output format {format!r}")
