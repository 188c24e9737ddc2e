"""Routing matrices ``P`` and the associated M-matrix ``R = I - P^T``.

A :class:`RoutingMatrix` is validated at construction (finite, nonnegative,
spectral radius below one) and is immutable afterwards.  The helpers here
are plain functions on arrays so they can also be applied to the bound
matrices used by the time/state dependent solver.
"""
from __future__ import annotations

import csv
import json
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import InvalidRoutingError

RHO_MARGIN = 1e-12
_POWER_MAX_ITER = 10_000
_POWER_TOL = 1e-13


def _as_square(P, name="P") -> np.ndarray:
    A = np.array(P, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidRoutingError(f"{name} must be a nonempty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidRoutingError(f"{name} has non-finite entries")
    return A


def _perron_root(B: np.ndarray) -> float:
    """Perron root of an irreducible nonnegative block.

    Power iteration runs on ``B + I`` (primitive, so it converges) and is
    bracketed by the Collatz-Wielandt bounds.  LAPACK is the fallback when
    the bracket does not close within the iteration cap.
    """
    m = B.shape[0]
    if m == 1:
        return float(B[0, 0])
    A = B + np.eye(m)
    x = np.ones(m) / m
    lo, hi = 0.0, np.inf
    for _ in range(_POWER_MAX_ITER):
        y = A @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= _POWER_TOL * hi:
            break
        x = y / y.sum()
    else:
        return float(np.max(np.abs(np.linalg.eigvals(B))))
    return float(0.5 * (lo + hi) - 1.0)


def spectral_radius(P) -> float:
    """Spectral radius of a nonnegative square matrix.

    The positive-entry graph is split into strongly connected components;
    an acyclic graph (nilpotent ``P``) gives exactly 0, otherwise the result
    is the largest Perron root over the irreducible diagonal blocks.
    """
    A = _as_square(P)
    if np.any(A < 0):
        raise InvalidRoutingError("spectral_radius expects a nonnegative matrix")
    adj = A > 0
    n_comp, labels = connected_components(adj, directed=True, connection="strong")
    rho = 0.0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        block = A[np.ix_(idx, idx)]
        if idx.size == 1 and block[0, 0] == 0.0:
            continue
        rho = max(rho, _perron_root(block))
    return max(rho, 0.0)


def neumann_inverse(P, tol: float = 1e-13, rho: float | None = None) -> np.ndarray:
    """Return ``R^{-1} = (sum_k P^k)^T`` for ``R = I - P^T``.

    Partial sums are doubled (``S <- S + P^m S``, ``P^m <- P^{2m}``) until the
    leading neglected power is below ``tol * (1 - rho)`` in max-norm.  Since
    ``R S^T - I = -(P^m)^T`` exactly, the same quantity bounds the residual.
    """
    A = _as_square(P)
    n = A.shape[0]
    if rho is None:
        rho = spectral_radius(A)
    if rho >= 1.0:
        raise InvalidRoutingError(f"spectral radius {rho} >= 1; R is not invertible by a Neumann series")
    stop = tol * (1.0 - rho)
    S = np.eye(n)
    Q = A.copy()
    for _ in range(200):
        if np.max(Q) < stop and np.max(Q.sum(axis=1)) <= tol:
            break
        S = S + Q @ S
        Q = Q @ Q
    else:  # pragma: no cover - needs rho within ~1e-60 of one
        raise InvalidRoutingError("Neumann series did not reach tolerance")
    return S.T.copy()


class RoutingMatrix:
    """Nonnegative routing matrix ``P`` with spectral radius strictly below one.

    Attributes are read-only arrays: ``P``, ``R = I - P^T`` and the lazily
    computed ``R_inv``.
    """

    def __init__(self, entries):
        A = _as_square(entries)
        if np.any(A < 0):
            raise InvalidRoutingError("routing matrix entries must be nonnegative")
        rho = spectral_radius(A)
        if rho >= 1.0 - RHO_MARGIN:
            raise InvalidRoutingError(f"spectral radius {rho:.15g} is not below 1 - {RHO_MARGIN:g}")
        A.setflags(write=False)
        self._P = A
        self.rho = rho

    @classmethod
    def zeros(cls, n: int) -> "RoutingMatrix":
        return cls(np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self._P.shape[0]

    @property
    def P(self) -> np.ndarray:
        return self._P

    @cached_property
    def R(self) -> np.ndarray:
        R = np.eye(self.n) - self._P.T
        R.setflags(write=False)
        return R

    @cached_property
    def R_inv(self) -> np.ndarray:
        Ri = neumann_inverse(self._P, rho=self.rho)
        Ri.setflags(write=False)
        return Ri

    @property
    def has_zero_diagonal(self) -> bool:
        return bool(np.all(np.diag(self._P) == 0.0))

    def normalized(self) -> tuple["RoutingMatrix", np.ndarray]:
        return normalize_diagonal(self)

    def __eq__(self, other):
        return isinstance(other, RoutingMatrix) and np.array_equal(self._P, other._P)

    def __hash__(self):
        return hash(self._P.tobytes())

    def __repr__(self):
        return f"RoutingMatrix(n={self.n}, rho={self.rho:.6g})"

    def to_dict(self) -> dict:
        return {"n": self.n, "entries": [float(v) for v in self._P.ravel()]}

    @classmethod
    def from_dict(cls, d: dict) -> "RoutingMatrix":
        try:
            n = int(d["n"])
            entries = np.asarray(d["entries"], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise InvalidRoutingError('routing JSON needs "n" and numeric "entries"') from None
        if entries.size != n * n:
            raise InvalidRoutingError(f"expected {n * n} entries, got {entries.size}")
        return cls(entries.reshape(n, n))


def normalize_diagonal(P) -> tuple[RoutingMatrix, np.ndarray]:
    """Remove the diagonal of ``P`` by a symmetric diagonal rescaling.

    Returns ``(Ptilde, scale)`` with ``scale = (I-D)^{1/2}``, ``D = diag(P)``
    and ``Ptilde = scale^{-1} (P-D) scale^{-1}``.  If ``(W, L)`` solves the
    problem for ``(X, P)`` then ``(scale^{-1} W, scale L)`` solves it for
    ``(scale^{-1} X, Ptilde)``.  ``Ptilde`` is similar to ``(I-D)^{-1}(P-D)``,
    so its spectral radius does not exceed that of ``P``.
    """
    A = P.P if isinstance(P, RoutingMatrix) else _as_square(P)
    d = np.diag(A).copy()
    if np.any(d >= 1.0):
        raise InvalidRoutingError(f"diagonal entries must be < 1, got {d.tolist()}")
    s = np.sqrt(1.0 - d)
    Pt = (A - np.diag(d)) / (s[:, None] * s[None, :])
    np.fill_diagonal(Pt, 0.0)
    return RoutingMatrix(Pt), np.diag(s)


def load_matrix(path) -> RoutingMatrix:
    """Read a routing matrix from JSON (``{"n", "entries"}``) or headerless CSV."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidRoutingError(f"{path}: {exc}") from None
        if not isinstance(d, dict):
            raise InvalidRoutingError('routing JSON must be an object with "n" and "entries"')
        return RoutingMatrix.from_dict(d)
    try:
        rows = [[float(v) for v in row] for row in csv.reader(text.splitlines()) if row]
        A = np.array(rows, dtype=float)
    except ValueError:
        raise InvalidRoutingError(f"{path} is not a numeric square CSV matrix") from None
    return RoutingMatrix(A)


def save_matrix(P, path) -> None:
    """Write ``P`` as JSON ``{n, entries}`` or, for a ``.csv`` suffix, as rows."""
    P = P if isinstance(P, RoutingMatrix) else RoutingMatrix(P)
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            for row in P.P:
                w.writerow([repr(float(v)) for v in row])
    else:
        path.write_text(json.dumps(P.to_dict()) + "\n")
