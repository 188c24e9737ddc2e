"""Discretized cadlag paths on a finite time grid.

A :class:`VectorPath` holds ``K+1`` points in ``R^n``; the value at index
``k`` is held on ``[t_k, t_{k+1})``.  Paths are immutable (arrays are
flagged read-only) so they can be shared freely between solvers.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class TimeGrid:
    times: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float).ravel()
        if t.size == 0:
            raise ValidationError("time grid must contain at least one point")
        if t[0] != 0.0:
            raise ValidationError(f"time grid must start at 0, got {t[0]}")
        if not np.all(np.isfinite(t)):
            raise ValidationError("time grid has non-finite entries")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValidationError("time grid must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @property
    def K(self) -> int:
        """Number of steps (the grid has ``K + 1`` points)."""
        return self.times.size - 1

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.times)

    def index_at(self, t: float) -> int:
        """Index of the grid cell containing ``t`` (right-continuous lookup)."""
        if t < 0:
            raise ValidationError("negative time")
        return int(np.searchsorted(self.times, t, side="right") - 1)

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and np.array_equal(self.times, other.times)

    def __hash__(self):
        return hash(self.times.tobytes())


def uniform_grid(horizon: float, step: float) -> TimeGrid:
    """Grid ``0, step, 2 step, ...`` ending exactly at ``horizon``.

    If ``horizon`` is not a multiple of ``step`` (to 1e-9 relative), it is
    appended as a final, shorter cell.
    """
    if not (step > 0 and horizon >= 0 and math.isfinite(horizon)):
        raise ValidationError(f"need step > 0 and finite horizon >= 0, got {horizon=}, {step=}")
    ratio = horizon / step
    K = round(ratio)
    if abs(ratio - K) <= 1e-9 * max(1.0, ratio):
        t = np.arange(K + 1, dtype=float) * step
        t[-1] = horizon
    else:
        K = math.floor(ratio)
        t = np.append(np.arange(K + 1, dtype=float) * step, horizon)
    return TimeGrid(t)


@dataclass(frozen=True, eq=False)
class VectorPath:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != len(self.grid):
            raise ValidationError(
                f"values must have shape (K+1, n) = ({len(self.grid)}, n), got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("path values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def __len__(self):
        return self.values.shape[0]

    def at(self, t: float) -> np.ndarray:
        return self.values[self.grid.index_at(t)]

    def coordinate(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def truncate(self, k: int) -> "VectorPath":
        """First ``k`` coordinates."""
        return VectorPath(self.grid, self.values[:, :k])

    def with_values(self, values) -> "VectorPath":
        return VectorPath(self.grid, values)

    def __add__(self, other):
        if isinstance(other, VectorPath):
            _check_same_grid(self, other)
            return VectorPath(self.grid, self.values + other.values)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, VectorPath):
            _check_same_grid(self, other)
            return VectorPath(self.grid, self.values - other.values)
        return NotImplemented

    def __eq__(self, other):
        return (
            isinstance(other, VectorPath)
            and self.grid == other.grid
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _check_same_grid(a: VectorPath, b: VectorPath) -> None:
    if a.grid != b.grid:
        raise ValidationError("paths live on different time grids")
    if a.n != b.n:
        raise ValidationError(f"dimension mismatch: {a.n} vs {b.n}")


def shift(a, X: VectorPath) -> VectorPath:
    """Return the path ``a + X`` for a nonnegative constant vector ``a``."""
    a = np.asarray(a, dtype=float).ravel()
    if a.size != X.n:
        raise ValidationError(f"shift vector has dimension {a.size}, path has {X.n}")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise ValidationError("shift vector must be finite and nonnegative")
    return VectorPath(X.grid, X.values + a[None, :])


def format_float(v: float) -> str:
    return repr(float(v))


def _write_rows(fh, header, times, blocks):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    cols = np.column_stack([times] + list(blocks))
    for row in cols.tolist():
        w.writerow([format_float(v) for v in row])


def path_to_csv(X: VectorPath, dest=None) -> str | None:
    """Write ``t,x1,...,xn`` rows; returns the text when ``dest`` is None."""
    header = ["t"] + [f"x{i + 1}" for i in range(X.n)]
    return _emit(dest, lambda fh: _write_rows(fh, header, X.times, [X.values]))


def solution_to_csv(W: VectorPath, L: VectorPath, dest=None) -> str | None:
    """Write ``t,w1..wn,l1..ln`` rows."""
    header = ["t"] + [f"w{i + 1}" for i in range(W.n)] + [f"l{i + 1}" for i in range(L.n)]
    return _emit(dest, lambda fh: _write_rows(fh, header, W.times, [W.values, L.values]))


def _emit(dest, writer):
    if dest is None:
        buf = io.StringIO()
        writer(buf)
        return buf.getvalue()
    with open(dest, "w", newline="") as fh:
        writer(fh)
    return None


def _read_table(src):
    text = Path(src).read_text() if not hasattr(src, "read") else src.read()
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise ValidationError("empty CSV")
    header = [h.strip() for h in rows[0]]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"non-numeric CSV entry: {exc}") from None
    if data.size == 0:
        raise ValidationError("CSV has no data rows")
    if data.shape[1] != len(header):
        raise ValidationError("CSV rows do not match header width")
    return header, data


def path_from_csv(src) -> VectorPath:
    header, data = _read_table(src)
    if header[0] != "t" or len(header) < 2:
        raise ValidationError(f"path CSV header must be t,x1,...,xn; got {header}")
    return VectorPath(TimeGrid(data[:, 0]), data[:, 1:])


def solution_from_csv(src) -> tuple[VectorPath, VectorPath]:
    header, data = _read_table(src)
    m = len(header) - 1
    if header[0] != "t" or m < 2 or m % 2:
        raise ValidationError(f"solution CSV header must be t,w1..wn,l1..ln; got {header}")
    n = m // 2
    grid = TimeGrid(data[:, 0])
    return VectorPath(grid, data[:, 1 : n + 1]), VectorPath(grid, data[:, n + 1 :])
