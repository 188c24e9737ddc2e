"""Finite-horizon checks of the asymptotic statements about reflected paths.

Divergence statements (``lim L = inf``, ``liminf X = -inf``) cannot be
certified from a finite grid.  The checkers here return a three-valued
:class:`ConditionVerdict` per coordinate together with the statistic that
decided it, so a report can always be audited.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .mmatrix import RoutingMatrix
from .paths import VectorPath
from .processes import Brownian, LevyCP, Map, RenewalRisk, critical_premium, stationary_distribution
from .skorohod import regulator_bounds

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConditionVerdict:
    coordinate: int
    verdict: str
    witness: float
    horizon: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class CouplingResult:
    """First grid time after which two regulated paths stay within ``tol``."""

    coupled: bool
    time: float | None
    index: int | None
    horizon: float

    def to_dict(self):
        return asdict(self)


def _routing(P) -> RoutingMatrix:
    return P if isinstance(P, RoutingMatrix) else RoutingMatrix(P)


def _value_at_fraction(path: VectorPath, frac: float) -> np.ndarray:
    t = path.times
    cut = t[0] + frac * (t[-1] - t[0])
    k = int(np.searchsorted(t, cut, side="right") - 1)
    return path.values[max(k, 0)]


def regulator_divergence(
    L: VectorPath, threshold: float, *, active_fraction: float = 0.25, flat_tol: float = 0.0
) -> list[ConditionVerdict]:
    """Proxy for ``L_i(t) -> inf``.

    Satisfied when ``L_i`` ends at or above ``threshold`` and still increased
    during the final ``active_fraction`` of the horizon; violated when it
    stayed constant (within ``flat_tol``) over the final half; inconclusive
    otherwise.
    """
    end = L.values[-1]
    late = _value_at_fraction(L, 1.0 - active_fraction)
    half = _value_at_fraction(L, 0.5)
    out = []
    for i in range(L.n):
        if end[i] >= threshold and end[i] - late[i] > flat_tol:
            v = SATISFIED
        elif end[i] - half[i] <= flat_tol:
            v = VIOLATED
        else:
            v = INCONCLUSIVE
        out.append(ConditionVerdict(i, v, float(end[i]), L.grid.horizon))
    return out


def sufficient_condition(X: VectorPath, P, threshold: float) -> list[ConditionVerdict]:
    """Proxy for ``liminf X_i = -inf`` or ``liminf (R^{-1} X)_i = -inf``.

    Never returns ``violated``: failing a sufficient condition proves nothing.
    """
    P = _routing(P)
    mins = np.minimum(X.values.min(axis=0), (X.values @ P.R_inv.T).min(axis=0))
    return [
        ConditionVerdict(i, SATISFIED if mins[i] <= -threshold else INCONCLUSIVE, float(mins[i]), X.grid.horizon)
        for i in range(X.n)
    ]


def necessary_condition(
    X: VectorPath, P, threshold: float, *, active_fraction: float = 0.25
) -> list[ConditionVerdict]:
    """Check whether ``(R^{-1} M)_i`` can be unbounded.

    Satisfied if it reaches ``threshold``.  Below the threshold the verdict
    is ``violated`` (irrelevance of the initial condition fails for ``i``)
    when it was flat over the final ``active_fraction`` of the horizon, and
    ``inconclusive`` when it is still growing.
    """
    P = _routing(P)
    _, _, upper = regulator_bounds(X, P)
    end = upper.values[-1]
    late = _value_at_fraction(upper, 1.0 - active_fraction)
    out = []
    for i in range(X.n):
        if end[i] >= threshold:
            v = SATISFIED
        elif end[i] - late[i] <= 0.0:
            v = VIOLATED
        else:
            v = INCONCLUSIVE
        out.append(ConditionVerdict(i, v, float(end[i]), X.grid.horizon))
    return out


def stability_check(rho, P) -> tuple[bool, np.ndarray]:
    """``R^{-1} rho < 0`` coordinatewise; returns ``(stable, R^{-1} rho)``."""
    P = _routing(P)
    rho = np.asarray(rho, dtype=float).ravel()
    if rho.size != P.n or not np.all(np.isfinite(rho)):
        raise ValidationError("drift vector must be finite with the routing dimension")
    margins = P.R_inv @ rho
    return bool(np.all(margins < 0)), margins


def map_mean_drift(spec: Map) -> np.ndarray:
    """Long-run slope of a Markov additive process.

    ``sum_i pi_i rho_i + sum_{i != j} pi_i q_ij mu_ij`` where ``rho_i`` is the
    mean rate of the regime-``i`` dynamics and ``mu_ij`` the mean of the
    jump made on an ``i -> j`` switch.
    """
    pi = stationary_distribution(spec.Q)
    rho = np.zeros(spec.n)
    for i, st in enumerate(spec.states):
        rho += pi[i] * st.mean_rate
        for j in range(spec.m):
            g = spec.G[i][j]
            if i == j or g is None:
                continue
            mu = np.array([d.mean if d is not None else 0.0 for d in g])
            rho += pi[i] * spec.Q[i, j] * mu
    return rho


def mean_drift(spec) -> np.ndarray:
    """``lim X(t)/t`` for any generator spec (not defined for fixtures)."""
    if isinstance(spec, Brownian):
        return spec.mu.copy()
    if isinstance(spec, LevyCP):
        return spec.mean_rate
    if isinstance(spec, Map):
        return map_mean_drift(spec)
    if isinstance(spec, RenewalRisk):
        return spec.c - critical_premium(spec)
    raise ValidationError(f"no mean drift for {type(spec).__name__}")


def coupling_time(Wa: VectorPath, W0: VectorPath, tol: float) -> CouplingResult:
    """Earliest grid time from which ``max_i |Wa_i - W0_i| <= tol`` through the horizon."""
    if Wa.grid != W0.grid:
        raise ValidationError("coupling_time needs paths on the same grid")
    if Wa.n != W0.n:
        raise ValidationError("coupling_time needs paths of the same dimension")
    gap = np.max(np.abs(Wa.values - W0.values), axis=1)
    bad = np.flatnonzero(gap > tol)
    k = 0 if bad.size == 0 else int(bad[-1]) + 1
    horizon = Wa.grid.horizon
    if k >= len(Wa):
        return CouplingResult(False, None, None, horizon)
    return CouplingResult(True, float(Wa.times[k]), k, horizon)


def ks_distance(samples_a, samples_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(samples_a, dtype=float).ravel())
    b = np.sort(np.asarray(samples_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValidationError("ks_distance needs two nonempty samples")
    pts = np.concatenate([a, b])
    Fa = np.searchsorted(a, pts, side="right") / a.size
    Fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(Fa - Fb)))
