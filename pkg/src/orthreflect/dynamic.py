"""Reflection with time/state dependent drift ``b(t, l, w)`` and routing ``P(t, l, w)``.

The solver freezes the coefficients at the left end of every grid cell
(explicit Euler in the coefficients) and then performs the same
complementarity step as the constant-coefficient solver, so constant
coefficients reproduce :func:`orthreflect.skorohod.reflect` bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import _kernels
from .analysis import INCONCLUSIVE, SATISFIED, ConditionVerdict, CouplingResult, coupling_time
from .errors import ConvergenceError, ModelError, ValidationError
from .mmatrix import RoutingMatrix, neumann_inverse, spectral_radius
from .parallel import ordered_map
from .paths import VectorPath, shift
from .processes import generate
from .skorohod import DEFAULT_TOL, ReflectionSolution, reflect

Coefficient = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class DynamicCoefficients:
    """Drift ``b`` and routing ``P`` as functions of ``(t, l, w)`` with their declared structure.

    ``Pi`` is the entrywise bound on ``P`` and must have spectral radius
    below one.  The boolean flags are assertions made by the caller; they are
    checked on samples by :func:`validate_assumptions` and structurally
    where possible.
    """

    b: Coefficient
    P: Coefficient
    Pi: np.ndarray
    lipschitz: float | None = None
    feedforward: bool = False
    time_only: bool = False
    l_independent: bool = False
    name: str = "custom"
    is_constant: bool = False

    def __post_init__(self):
        Pi = np.array(self.Pi, dtype=float)
        if Pi.ndim != 2 or Pi.shape[0] != Pi.shape[1]:
            raise ValidationError("Pi must be square")
        if np.any(Pi < 0) or np.any(np.diag(Pi) != 0):
            raise ValidationError("Pi must be nonnegative with zero diagonal")
        if self.feedforward and np.any(np.tril(Pi) != 0):
            raise ValidationError("feedforward coefficients need P_ij = 0 for j <= i (strictly upper triangular Pi)")
        rho = spectral_radius(Pi)
        if rho >= 1.0 - 1e-12:
            raise ValidationError(f"spectral radius of Pi is {rho}, must be < 1")
        Pi.setflags(write=False)
        object.__setattr__(self, "Pi", Pi)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.Pi.shape[0]

    @classmethod
    def constant(cls, P, b=None, name: str = "constant") -> "DynamicCoefficients":
        """Constant routing ``P`` (and constant drift ``b``, default 0)."""
        Pm = P.P if isinstance(P, RoutingMatrix) else np.asarray(P, dtype=float)
        Pm = np.array(Pm)
        Pm.setflags(write=False)
        n = Pm.shape[0]
        bv = np.zeros(n) if b is None else np.asarray(b, dtype=float).reshape(n)
        bv.setflags(write=False)
        return cls(
            b=lambda t, l, w: bv,
            P=lambda t, l, w: Pm,
            Pi=Pm,
            lipschitz=0.0,
            feedforward=bool(np.all(np.tril(Pm) == 0)),
            time_only=True,
            l_independent=True,
            name=name,
            is_constant=True,
        )


@dataclass(frozen=True)
class EnvelopeFunction:
    """Upper envelopes ``beta(s) >= b(s, 0, w)`` (and optionally ``beta_hat`` for constant ``R``).

    Both map a time to a length-``n`` vector.
    """

    beta: Callable[[float], np.ndarray]
    beta_hat: Callable[[float], np.ndarray] | None = None

    def integral(self, times: np.ndarray, which: str = "beta") -> tuple[np.ndarray, np.ndarray]:
        """Left-endpoint quadrature of the envelope and an error estimate.

        Returns ``(I, err)`` with ``I[k] = sum_{j<k} beta(t_j) dt_j`` and
        ``err[k]`` the gap to the trapezoidal rule.
        """
        f = self.beta if which == "beta" else self.beta_hat
        vals = np.array([np.atleast_1d(f(float(s))) for s in times], dtype=float)
        dt = np.diff(times)[:, None]
        left = np.vstack([np.zeros((1, vals.shape[1])), np.cumsum(vals[:-1] * dt, axis=0)])
        trap = np.vstack([np.zeros((1, vals.shape[1])), np.cumsum(0.5 * (vals[:-1] + vals[1:]) * dt, axis=0)])
        return left, np.abs(trap - left)


def _eval_P(coeffs, t, l, w, tol):
    Pk = np.asarray(coeffs.P(t, l, w), dtype=float)
    if Pk.shape != coeffs.Pi.shape:
        raise ModelError(f"P returned shape {Pk.shape}, expected {coeffs.Pi.shape}")
    if np.any(Pk < 0) or np.any(np.diag(Pk) != 0):
        raise ModelError(f"P({t}) must be nonnegative with zero diagonal")
    if np.any(Pk > coeffs.Pi + tol):
        raise ModelError(f"P({t}) exceeds the declared bound Pi")
    return Pk


def reflect_dynamic(
    X: VectorPath, coeffs: DynamicCoefficients, a=None, tol: float = DEFAULT_TOL
) -> ReflectionSolution:
    """Solve the reflection problem for ``a + X`` with drift and routing depending on ``(t, L, W)``.

    ``info`` carries the per-step drift integral (``drift_integral``), the
    largest one-step change in ``b`` and in ``P`` (``max_drift_change``,
    ``max_routing_change``) and the largest number of complementarity sweeps.
    """
    n = X.n
    if coeffs.n != n:
        raise ValidationError(f"coefficients are {coeffs.n}-dimensional, path is {n}-dimensional")
    a = np.zeros(n) if a is None else np.asarray(a, dtype=float).ravel()
    if a.size != n or np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValidationError("initial vector a must be finite, nonnegative, with the path dimension")
    # shift first so the increments round exactly as in the constant solver
    Xv = a[None, :] + X.values
    t = X.times
    K1 = Xv.shape[0]
    W = np.empty((K1, n))
    L = np.empty((K1, n))
    B = np.zeros((K1, n))
    RL = np.zeros((K1, n))
    max_iter = _kernels.max_iterations(tol, coeffs.rho)
    stop = tol * (1.0 - coeffs.rho)

    w_prev = np.zeros(n)
    l_acc = np.zeros(n)
    rl_acc = np.zeros(n)
    b_acc = np.zeros(n)
    q = np.empty(n)
    w = np.empty(n)
    dl = np.empty(n)
    b_prev = P_prev = None
    db_max = dP_max = 0.0
    max_sweeps = 0
    clamp = 0.0
    for k in range(K1):
        if k == 0:
            tk = 0.0
            Pk = _eval_P(coeffs, tk, l_acc.copy(), w_prev.copy(), tol)
            q[:] = w_prev + Xv[0]
        else:
            tk = t[k - 1]
            lk, wk = l_acc.copy(), w_prev.copy()
            bk = np.asarray(coeffs.b(tk, lk, wk), dtype=float).reshape(n)
            Pk = _eval_P(coeffs, tk, lk, wk, tol)
            drift = bk * (t[k] - t[k - 1])
            q[:] = w_prev + ((Xv[k] - Xv[k - 1]) + drift)
            b_acc += drift
            if b_prev is not None:
                db_max = max(db_max, float(np.max(np.abs(bk - b_prev))))
            if P_prev is not None:
                dP_max = max(dP_max, float(np.max(np.abs(Pk - P_prev))))
            b_prev, P_prev = bk, Pk
        PT = np.ascontiguousarray(Pk.T)
        status, it, res = _kernels.lcp_advance(q, PT, tol, stop, max_iter, w, dl)
        if status != _kernels.OK:
            raise ConvergenceError(f"complementarity step failed at grid index {k} (check the Pi bound)")
        max_sweeps = max(max_sweeps, it)
        clamp = max(clamp, res)
        l_acc += dl
        rl_acc += dl - PT @ dl
        L[k] = l_acc
        W[k] = w
        w_prev[:] = w
        B[k] = b_acc
        RL[k] = rl_acc
    residual = float(np.max(np.abs(W - (Xv + B + RL))))
    return ReflectionSolution(
        VectorPath(X.grid, W),
        VectorPath(X.grid, L),
        residual,
        {
            "algorithm": "dynamic",
            "drift_integral": B,
            "max_drift_change": db_max,
            "max_routing_change": dP_max,
            "max_sweeps": max_sweeps,
            "clamp_residual": clamp,
        },
    )


def envelope_divergence(X: VectorPath, env: EnvelopeFunction, threshold: float) -> list[ConditionVerdict]:
    """Proxy for ``liminf [X_i(t) + int_0^t beta_i] = -inf`` (left-endpoint quadrature)."""
    I, _ = env.integral(X.times)
    stat = (X.values + I).min(axis=0)
    return [
        ConditionVerdict(i, SATISFIED if stat[i] <= -threshold else INCONCLUSIVE, float(stat[i]), X.grid.horizon)
        for i in range(X.n)
    ]


def regulator_lower_bound(X: VectorPath, a, env: EnvelopeFunction) -> tuple[np.ndarray, np.ndarray]:
    """Lower bound ``-a_i - [X_i(t) + int_0^t beta_i]`` on ``L^a_i`` and its quadrature error estimate."""
    a = np.asarray(a, dtype=float).ravel()
    I, err = env.integral(X.times)
    return -a[None, :] - (X.values + I), err


@dataclass
class AssumptionReport:
    passed: bool
    samples: int
    violations: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    def to_dict(self):
        return {
            "passed": self.passed,
            "samples": self.samples,
            "violations": dict(self.violations),
            "counterexamples": list(self.counterexamples),
        }


def validate_assumptions(
    coeffs: DynamicCoefficients,
    sample_budget: int = 200,
    seed: int = 0,
    *,
    t_max: float = 10.0,
    scale: float = 10.0,
    tol: float = 1e-12,
    max_examples: int = 10,
) -> AssumptionReport:
    """Sample-based audit of the standing assumptions on ``(b, P)``.

    Checks the ``Pi`` bound and sign/diagonal structure, monotonicity of
    ``b`` and ``R = I - P^T`` (nonincreasing in ``l``, nondecreasing in
    ``w``, entrywise), and, when asserted by the flags, the feedforward
    dependence pattern, time-only and ``l``-independence.
    """
    rng = np.random.default_rng(seed)
    n = coeffs.n
    viol: dict[str, int] = {}
    examples: list = []

    def flag(check, t, l, w, l2, w2, detail):
        viol[check] = viol.get(check, 0) + 1
        if len(examples) < max_examples:
            examples.append(
                {"check": check, "t": float(t), "l": l.tolist(), "w": w.tolist(), "l2": l2.tolist(), "w2": w2.tolist(), "detail": detail}
            )

    def evalb(t, l, w):
        return np.asarray(coeffs.b(t, l, w), dtype=float).reshape(n)

    def evalP(t, l, w):
        return np.asarray(coeffs.P(t, l, w), dtype=float).reshape(n, n)

    for _ in range(sample_budget):
        t = rng.uniform(0, t_max)
        l, w = rng.uniform(0, scale, n), rng.uniform(0, scale, n)
        l2, w2 = l + rng.uniform(0, scale, n), w + rng.uniform(0, scale, n)
        b0, P0 = evalb(t, l, w), evalP(t, l, w)
        if np.any(P0 < -tol) or np.any(np.abs(np.diag(P0)) > tol):
            flag("routing_structure", t, l, w, l, w, "P has a negative or diagonal entry")
        if np.any(P0 > coeffs.Pi + tol):
            flag("Pi_bound", t, l, w, l, w, f"max excess {float(np.max(P0 - coeffs.Pi))}")
        bl, Pl = evalb(t, l2, w), evalP(t, l2, w)
        if np.any(bl > b0 + tol):
            flag("b_nonincreasing_in_l", t, l, w, l2, w, f"increase {float(np.max(bl - b0))}")
        # R = I - P^T nonincreasing in l  <=>  P nondecreasing in l
        if np.any(Pl < P0 - tol):
            flag("R_nonincreasing_in_l", t, l, w, l2, w, f"P decrease {float(np.max(P0 - Pl))}")
        bw, Pw = evalb(t, l, w2), evalP(t, l, w2)
        if np.any(bw < b0 - tol):
            flag("b_nondecreasing_in_w", t, l, w, l, w2, f"decrease {float(np.max(b0 - bw))}")
        if np.any(Pw > P0 + tol):
            flag("R_nondecreasing_in_w", t, l, w, l, w2, f"P increase {float(np.max(Pw - P0))}")
        if coeffs.feedforward:
            if np.any(np.abs(np.tril(P0)) > tol):
                i, j = np.argwhere(np.abs(np.tril(P0)) > tol)[0]
                flag("feedforward_zeros", t, l, w, l, w, f"P[{i},{j}] = {float(P0[i, j])} but j <= i")
            for i in range(n - 1):
                # perturb coordinates beyond i; b_i and row i of R must not move
                l3, w3 = l.copy(), w.copy()
                l3[i + 1 :] = rng.uniform(0, scale, n - i - 1)
                w3[i + 1 :] = rng.uniform(0, scale, n - i - 1)
                b3, P3 = evalb(t, l3, w3), evalP(t, l3, w3)
                if abs(b3[i] - b0[i]) > tol or np.any(np.abs(P3[:, i] - P0[:, i]) > tol):
                    flag("feedforward_dependence", t, l, w, l3, w3, f"coordinate {i} depends on later coordinates")
        if coeffs.time_only or coeffs.l_independent:
            l4 = rng.uniform(0, scale, n)
            w4 = w if not coeffs.time_only else rng.uniform(0, scale, n)
            b4, P4 = evalb(t, l4, w4), evalP(t, l4, w4)
            if np.any(np.abs(b4 - b0) > tol) or np.any(np.abs(P4 - P0) > tol):
                flag("time_only" if coeffs.time_only else "l_independent", t, l, w, l4, w4, "coefficients changed")
    return AssumptionReport(not viol, sample_budget, viol, examples)


def feedforward_subproblem(X: VectorPath, coeffs: DynamicCoefficients, k: int) -> tuple[VectorPath, DynamicCoefficients]:
    """Restrict a feedforward problem to its first ``k`` coordinates."""
    if not coeffs.feedforward:
        raise ValidationError("feedforward_subproblem requires feedforward coefficients")
    n = coeffs.n
    if not 1 <= k <= n:
        raise ValidationError(f"k must be in [1, {n}]")
    if k == n:
        return X, coeffs

    def pad(v):
        out = np.zeros(n)
        out[:k] = v
        return out

    b, P = coeffs.b, coeffs.P
    return X.truncate(k), replace(
        coeffs,
        b=lambda t, l, w: np.asarray(b(t, pad(l), pad(w)), dtype=float)[:k],
        P=lambda t, l, w: np.asarray(P(t, pad(l), pad(w)), dtype=float)[:k, :k],
        Pi=coeffs.Pi[:k, :k],
        name=f"{coeffs.name}[:{k}]",
    )


@dataclass
class CouplingExperiment:
    results: list
    seeds: list

    @property
    def fraction_coupled(self) -> float:
        return sum(r.coupled for r in self.results) / len(self.results)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.time for r in self.results if r.coupled])

    def to_dict(self):
        return {
            "seeds": list(self.seeds),
            "fraction_coupled": self.fraction_coupled,
            "results": [r.to_dict() for r in self.results],
        }


def coupling_experiment(
    spec,
    coeffs: DynamicCoefficients,
    a,
    grid,
    seeds,
    tol: float = 1e-6,
    *,
    solver_tol: float = DEFAULT_TOL,
    validate: bool = True,
    threads: int | None = None,
) -> CouplingExperiment:
    """Per seed: generate ``X``, solve from ``a`` and from 0, and locate the coupling time."""
    if validate:
        if not (coeffs.feedforward and coeffs.l_independent):
            raise ModelError("coupling experiments need feedforward, l-independent coefficients")
        rep = validate_assumptions(coeffs, sample_budget=50, seed=0)
        if not rep.passed:
            raise ModelError(f"coefficient assumptions fail: {rep.violations}")
    seeds = list(seeds)
    a = np.asarray(a, dtype=float).ravel()

    fast = False
    if coeffs.is_constant:
        Pc = RoutingMatrix(coeffs.P(0.0, np.zeros(coeffs.n), np.zeros(coeffs.n)))
        bc = np.asarray(coeffs.b(0.0, np.zeros(coeffs.n), np.zeros(coeffs.n)), dtype=float)
        fast = not np.any(bc != 0)

    def one(seed):
        X = generate(spec, grid, seed)
        if fast:
            Wa = reflect(shift(a, X), Pc, solver_tol).W
            W0 = reflect(X, Pc, solver_tol).W
        else:
            Wa = reflect_dynamic(X, coeffs, a, solver_tol).W
            W0 = reflect_dynamic(X, coeffs, None, solver_tol).W
        return coupling_time(Wa, W0, tol)

    return CouplingExperiment(ordered_map(one, seeds, threads), seeds)


def transformed_difference(Wa: VectorPath, W0: VectorPath, Pi) -> np.ndarray:
    """``(I - Pi^T)^{-1} (W^a - W^0)``, nonincreasing for time-only coefficients.

    ``Pi`` bounds ``P`` entrywise, so ``Pi^T`` bounds the off-diagonal part of
    ``I - R(s)`` and ``(I - Pi^T)^{-1} R(s)`` is nonnegative.  With constant
    routing this is ``R^{-1} (W^a - W^0)``.
    """
    inv = neumann_inverse(np.asarray(Pi, dtype=float))
    return (Wa.values - W0.values) @ inv.T
