"""The reflection map on the nonnegative orthant for a constant routing matrix.

Two independent solvers are provided:

* :func:`reflect` steps along the grid and solves one least-element linear
  complementarity problem per step.  For piecewise-constant cadlag input
  this is the exact continuous-time reflection.
* :func:`reflect_fixed_point` runs a global Picard iteration on the regulator
  equations ``L_k = -inf_{s<=t} [(Y_k - sum_j p_jk L_j) ^ 0]``.  It is slower
  and exists as an oracle for the stepping solver.

Both return a :class:`ReflectionSolution` with ``W = X + R L``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConvergenceError, ValidationError
from .mmatrix import RoutingMatrix, normalize_diagonal
from .paths import VectorPath, shift

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class ReflectionSolution:
    """Regulated path ``W`` and regulator ``L`` on the input grid.

    ``residual`` is the sup-norm of ``W - X - R L`` over the grid (clamping
    of tiny negative values of ``W`` shows up here).  ``info`` carries solver
    diagnostics such as iteration counts.
    """

    W: VectorPath
    L: VectorPath
    residual: float
    info: dict = field(default_factory=dict, compare=False)


def _as_routing(P) -> RoutingMatrix:
    return P if isinstance(P, RoutingMatrix) else RoutingMatrix(P)


def _check_inputs(X: VectorPath, P: RoutingMatrix, tol: float) -> None:
    if not tol > 0:
        raise ValidationError("tol must be positive")
    if P.n != X.n:
        raise ValidationError(f"routing matrix is {P.n}x{P.n} but the path has dimension {X.n}")
    if not P.has_zero_diagonal:
        raise ValidationError("routing matrix must have a zero diagonal; apply normalize_diagonal first")


def equation_residual(X: VectorPath, W: VectorPath, L: VectorPath, R: np.ndarray) -> float:
    """``max |W - X - R L|`` over grid points and coordinates."""
    return float(np.max(np.abs(W.values - X.values - L.values @ R.T)))


def reflect(X: VectorPath, P, tol: float = DEFAULT_TOL) -> ReflectionSolution:
    """Reflect ``X`` on the orthant with routing ``P`` by per-step LCPs.

    Raises :class:`ConvergenceError` when a step's complementarity iteration
    exceeds ``ceil(log(tol)/log(rho)) + 10**4`` sweeps.
    """
    P = _as_routing(P)
    _check_inputs(X, P, tol)
    Xv = np.ascontiguousarray(X.values)
    W = np.empty_like(Xv)
    L = np.empty_like(Xv)
    PT = np.ascontiguousarray(P.P.T)
    max_iter = _kernels.max_iterations(tol, P.rho)
    stop = tol * (1.0 - P.rho)
    status, k, iters, res = _kernels.reflect_path(Xv, PT, tol, stop, max_iter, W, L)
    if status != _kernels.OK:
        raise ConvergenceError(
            f"complementarity iteration did not converge at grid index {k} after {iters} sweeps"
        )
    Wp, Lp = VectorPath(X.grid, W), VectorPath(X.grid, L)
    return ReflectionSolution(
        Wp,
        Lp,
        equation_residual(X, Wp, Lp, P.R),
        {"algorithm": "step", "max_sweeps": int(iters), "clamp_residual": float(res)},
    )


def reflect_fixed_point(
    X: VectorPath, P, tol: float = DEFAULT_TOL, max_iter: int = 100_000
) -> ReflectionSolution:
    """Global Picard iteration for the regulator equations.

    Starts from ``L = 0`` and repeats
    ``L_k(t) <- -min_{s<=t} min(X_k(s) - (L(s) P)_k, 0)`` until the sup-norm
    change is at most ``tol``.
    """
    P = _as_routing(P)
    _check_inputs(X, P, tol)
    Xv = X.values
    Pm = P.P
    L = np.zeros_like(Xv)
    for it in range(1, max_iter + 1):
        Y = np.minimum(Xv - L @ Pm, 0.0)
        L_new = -np.minimum.accumulate(Y, axis=0)
        change = float(np.max(np.abs(L_new - L)))
        L = L_new
        if change <= tol:
            break
    else:
        raise ConvergenceError(f"Picard iteration did not reach {tol:g} in {max_iter} iterations")
    L += 0.0  # normalise -0.0
    W = Xv + L @ P.R.T
    Wp, Lp = VectorPath(X.grid, W), VectorPath(X.grid, L)
    return ReflectionSolution(
        Wp, Lp, equation_residual(X, Wp, Lp, P.R), {"algorithm": "fixedpoint", "iterations": it}
    )


def regulator_bounds(X: VectorPath, P) -> tuple[VectorPath, VectorPath, VectorPath]:
    """Explicit bounds ``max(M, N) <= L <= R^{-1} M``.

    ``M_i(t) = -min_{s<=t} min(X_i(s), 0)`` is the one-dimensional regulator
    of each coordinate and ``N`` is the same functional applied to
    ``R^{-1} X``.
    """
    P = _as_routing(P)
    if P.n != X.n:
        raise ValidationError("dimension mismatch between path and routing matrix")
    Ri = P.R_inv
    M = -np.minimum.accumulate(np.minimum(X.values, 0.0), axis=0) + 0.0
    N = -np.minimum.accumulate(np.minimum(X.values @ Ri.T, 0.0), axis=0) + 0.0
    upper = M @ Ri.T
    g = X.grid
    return VectorPath(g, M), VectorPath(g, N), VectorPath(g, upper)


@dataclass(frozen=True)
class DifferenceReport:
    """Finite-horizon audit of ``D = W(a+X) - W(X)``.

    ``min_difference`` should be >= -tol; ``max_transformed_increase`` is the
    largest one-step increase of any coordinate of ``R^{-1} D`` and should be
    <= tol; ``regulator_sandwich_violation`` is the worst violation of
    ``L(a+X) <= L(X) <= L(a+X) + R^{-1} a``.
    """

    a: list
    terminal_difference: list
    initial_difference: list
    min_difference: float
    max_transformed_increase: float
    max_total_increase: float
    regulator_sandwich_violation: float
    horizon: float
    tol: float
    passed: bool
    D: np.ndarray = field(repr=False, compare=False)
    transformed: np.ndarray = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "terminal_difference": self.terminal_difference,
            "initial_difference": self.initial_difference,
            "min_difference": self.min_difference,
            "max_transformed_increase": self.max_transformed_increase,
            "max_total_increase": self.max_total_increase,
            "regulator_sandwich_violation": self.regulator_sandwich_violation,
            "horizon": self.horizon,
            "tol": self.tol,
            "passed": self.passed,
        }


def _max_increase(series: np.ndarray) -> float:
    if series.shape[0] < 2:
        return 0.0
    return float(np.max(np.diff(series, axis=0), initial=-np.inf))


def difference_diagnostics(
    X: VectorPath, a, P, tol: float = 1e-9, solver_tol: float = DEFAULT_TOL
) -> DifferenceReport:
    """Solve for ``X`` and ``a + X`` and audit the monotonicity properties of the difference."""
    P = _as_routing(P)
    a = np.asarray(a, dtype=float).ravel()
    sol0 = reflect(X, P, solver_tol)
    sola = reflect(shift(a, X), P, solver_tol)
    D = sola.W.values - sol0.W.values
    T = D @ P.R_inv.T
    e = D.sum(axis=1)
    L0, La = sol0.L.values, sola.L.values
    upper = La + (P.R_inv @ a)[None, :]
    sandwich = max(float(np.max(La - L0)), float(np.max(L0 - upper)), 0.0)
    min_d = float(np.min(D))
    inc = _max_increase(T)
    passed = min_d >= -tol and inc <= tol and sandwich <= tol
    return DifferenceReport(
        a=a.tolist(),
        terminal_difference=D[-1].tolist(),
        initial_difference=D[0].tolist(),
        min_difference=min_d,
        max_transformed_increase=inc,
        max_total_increase=_max_increase(e[:, None]),
        regulator_sandwich_violation=sandwich,
        horizon=X.grid.horizon,
        tol=tol,
        passed=bool(passed),
        D=D,
        transformed=T,
    )


def reflect_general(X: VectorPath, P, tol: float = DEFAULT_TOL, algorithm: str = "step") -> ReflectionSolution:
    """Reflect with a routing matrix that may have a nonzero diagonal.

    The diagonal is removed by :func:`~orthreflect.mmatrix.normalize_diagonal`,
    the normalized problem is solved, and ``(W, L)`` are mapped back.
    """
    P = _as_routing(P)
    solver = {"step": reflect, "fixedpoint": reflect_fixed_point}.get(algorithm)
    if solver is None:
        raise ValidationError(f"unknown algorithm {algorithm!r}")
    if P.has_zero_diagonal:
        return solver(X, P, tol)
    Pt, scale = normalize_diagonal(P)
    s = np.diag(scale)
    sol = solver(VectorPath(X.grid, X.values / s[None, :]), Pt, tol)
    W = VectorPath(X.grid, sol.W.values * s[None, :])
    L = VectorPath(X.grid, sol.L.values / s[None, :])
    return ReflectionSolution(W, L, equation_residual(X, W, L, P.R), {**sol.info, "normalized": True})


@dataclass
class AuditReport:
    """Result of checking a candidate ``(W, L)`` against the defining conditions."""

    passed: bool
    residual: float
    violations: list

    def to_dict(self):
        return {"passed": self.passed, "residual": self.residual, "violations": list(self.violations)}


def audit_solution(
    X: VectorPath, W: VectorPath, L: VectorPath, P, tol: float = 1e-9, max_items: int = 100
) -> AuditReport:
    """Check ``W = X + R L``, ``W >= 0``, ``L`` nondecreasing from ``L >= 0``,
    and discrete complementarity (``L_i`` increases only where ``W_i = 0``).

    Violations are reported as ``{"check", "index", "coordinate", "value"}``
    with grid indices, at most ``max_items`` per check.
    """
    P = _as_routing(P)
    if not (X.grid == W.grid == L.grid):
        raise ValidationError("solution and path grids differ")
    if not (X.n == W.n == L.n == P.n):
        raise ValidationError("dimension mismatch between path, solution and routing matrix")
    out = []
    failed = False

    def collect(check, mask, values):
        nonlocal failed
        hits = np.argwhere(mask)
        failed = failed or hits.size > 0
        for k, i in hits[:max_items]:
            out.append({"check": check, "index": int(k), "coordinate": int(i), "value": float(values[k, i])})

    eq = W.values - X.values - L.values @ P.R.T
    collect("equation", np.abs(eq) > tol, eq)
    collect("nonnegative_W", W.values < -tol, W.values)
    dL = np.diff(L.values, axis=0, prepend=np.zeros((1, L.n)))
    collect("monotone_L", dL < -tol, dL)
    collect("complementarity", (dL > tol) & (W.values > tol), W.values)
    return AuditReport(not failed, float(np.max(np.abs(eq))), out)
