"""Seeded experiment drivers producing JSON-ready, bit-reproducible reports.

A config names a process, a routing (matrix or catalog coefficients),
initial vectors, a grid and a seed range.  Four kinds are supported:

``irrelevance``
    terminal differences ``W(a+X) - W(X)`` and their monotonicity audit
``coupling``
    coupling times of ``W(a+X)`` and ``W(X)``
``stationary``
    terminal samples across seeds, compared by KS distance
``conditions``
    three-valued verdict tables from :mod:`orthreflect.analysis`
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .dynamic import DynamicCoefficients, coupling_experiment, reflect_dynamic, transformed_difference
from .errors import ValidationError
from .mmatrix import RoutingMatrix
from .parallel import ordered_map
from .paths import VectorPath, shift, uniform_grid
from .processes import Brownian, Fixture, LevyCP, generate, spec_from_dict
from .skorohod import DEFAULT_TOL, difference_diagnostics, reflect

SCHEMA = "orthreflect.report/1"
KINDS = ("irrelevance", "coupling", "stationary", "conditions")
SERIES_POINTS = 101


# ---------------------------------------------------------------- coefficient catalog


def _matrix_param(params, n, key="P"):
    if key not in params:
        return np.zeros((n, n))
    P = np.asarray(params[key], dtype=float)
    if P.shape != (n, n):
        raise ValidationError(f"catalog parameter {key!r} must be {n}x{n}")
    return P


def _vector_param(params, n, key, default=0.0):
    v = np.asarray(params.get(key, default), dtype=float)
    v = np.broadcast_to(v, (n,)).copy() if v.ndim == 0 else v
    if v.shape != (n,) or not np.all(np.isfinite(v)):
        raise ValidationError(f"catalog parameter {key!r} must be a finite vector of length {n}")
    v.setflags(write=False)
    return v


def _cat_constant(n, params):
    return DynamicCoefficients.constant(_matrix_param(params, n), _vector_param(params, n, "b"), name="constant")


def _cat_time_ramp(n, params):
    # b(t) moves linearly from b0 to b1 over [0, ramp], then stays at b1
    P = _matrix_param(params, n)
    P.setflags(write=False)
    b0 = _vector_param(params, n, "b0")
    b1 = _vector_param(params, n, "b1")
    ramp = float(params.get("ramp", 1.0))
    if not ramp > 0:
        raise ValidationError("time_ramp needs ramp > 0")
    return DynamicCoefficients(
        b=lambda t, l, w: b0 + (b1 - b0) * min(t / ramp, 1.0),
        P=lambda t, l, w: P,
        Pi=P,
        lipschitz=float(np.max(np.abs(b1 - b0))) / ramp,
        feedforward=bool(np.all(np.tril(P) == 0)),
        time_only=True,
        l_independent=True,
        name="time_ramp",
    )


def _cat_state_damped(n, params):
    # b_i = b0_i + gain_i w_i / (1 + w_i): the (negative) drift eases off as the content grows,
    # which keeps b nondecreasing in w
    P = _matrix_param(params, n)
    P.setflags(write=False)
    b0 = _vector_param(params, n, "b0", -1.0)
    gain = _vector_param(params, n, "gain", 0.5)
    if np.any(gain < 0):
        raise ValidationError("state_damped needs gain >= 0")
    return DynamicCoefficients(
        b=lambda t, l, w: b0 + gain * np.maximum(w, 0.0) / (1.0 + np.maximum(w, 0.0)),
        P=lambda t, l, w: P,
        Pi=P,
        lipschitz=float(np.max(gain)),
        feedforward=bool(np.all(np.tril(P) == 0)),
        l_independent=True,
        name="state_damped",
    )


def _cat_feedforward_constant(n, params):
    p = float(params.get("p", 0.5))
    if not 0 <= p:
        raise ValidationError("feedforward_constant needs p >= 0")
    P = np.diag(np.full(n - 1, p), k=1) if n > 1 else np.zeros((1, 1))
    return DynamicCoefficients.constant(P, _vector_param(params, n, "b"), name="feedforward_constant")


CATALOG = {
    "constant": _cat_constant,
    "time_ramp": _cat_time_ramp,
    "state_damped": _cat_state_damped,
    "feedforward_constant": _cat_feedforward_constant,
}


def catalog_coefficients(name: str, n: int, params: dict | None = None) -> DynamicCoefficients:
    """Build one of the named coefficient families for dimension ``n``."""
    if name not in CATALOG:
        raise ValidationError(f"unknown coefficient catalog entry {name!r}; known: {sorted(CATALOG)}")
    return CATALOG[name](n, dict(params or {}))


# ---------------------------------------------------------------- config


def _num(d, key, default=None, cast=float):
    v = d.get(key, default)
    if v is None:
        return None
    try:
        out = cast(v)
    except (TypeError, ValueError):
        raise ValidationError(f"{key!r} must be a number") from None
    if isinstance(out, float) and not math.isfinite(out):
        raise ValidationError(f"{key!r} must be finite")
    return out


@dataclass
class ExperimentConfig:
    kind: str
    process: object
    routing: dict
    initials: list
    horizon: float
    step: float
    seed_base: int = 0
    seed_count: int = 1
    solver_tol: float = DEFAULT_TOL
    coupling_tol: float = 1e-6
    audit_tol: float = 1e-9
    verdict_threshold: float | None = None
    ergodic: dict | None = None
    coeffs: DynamicCoefficients | None = field(default=None, repr=False, compare=False)
    matrix: RoutingMatrix | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ValidationError("config must be a JSON object")
        kind = d.get("kind")
        if kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
        if "process" not in d:
            raise ValidationError("config needs a 'process'")
        process = spec_from_dict(d["process"])
        n = process.n
        grid = d.get("grid") or {}
        step, horizon = _num(grid, "step"), _num(grid, "horizon")
        if step is None or horizon is None:
            raise ValidationError("grid needs 'horizon' and 'step'")
        if not step > 0:
            raise ValidationError("grid step must be positive")
        if not horizon >= step:
            raise ValidationError("grid horizon must be at least one step")
        seeds = d.get("seeds") or {}
        base, count = _num(seeds, "base", 0, int), _num(seeds, "count", 1, int)
        if count < 1:
            raise ValidationError("seed count must be at least 1")
        initials = d.get("initials", [[0.0] * n])
        try:
            initials = [np.asarray(a, dtype=float).reshape(n) for a in initials]
        except ValueError:
            raise ValidationError(f"every initial vector must have length {n}") from None
        if not initials or any(np.any(a < 0) or not np.all(np.isfinite(a)) for a in initials):
            raise ValidationError("initials must be a nonempty list of finite vectors >= 0")
        tols = d.get("tolerances") or {}
        routing = d.get("routing", {"catalog": "constant", "params": {}})
        cfg = cls(
            kind=kind,
            process=process,
            routing=routing,
            initials=[a.tolist() for a in initials],
            horizon=horizon,
            step=step,
            seed_base=base,
            seed_count=count,
            solver_tol=_num(tols, "solver", DEFAULT_TOL),
            coupling_tol=_num(tols, "coupling", 1e-6),
            audit_tol=_num(tols, "audit", 1e-9),
            verdict_threshold=_num(tols, "verdict_threshold"),
            ergodic=d.get("ergodic"),
        )
        for name in ("solver_tol", "coupling_tol", "audit_tol"):
            if not getattr(cfg, name) > 0:
                raise ValidationError(f"tolerance {name} must be positive")
        cfg._resolve_routing(n)
        return cfg

    def _resolve_routing(self, n):
        r = self.routing
        if not isinstance(r, dict):
            raise ValidationError("routing must be an object")
        if "catalog" in r:
            self.coeffs = catalog_coefficients(r["catalog"], n, r.get("params"))
            if self.coeffs.is_constant:
                self.matrix = RoutingMatrix(self.coeffs.Pi)
        else:
            self.matrix = RoutingMatrix.from_dict(r)
            if self.matrix.n != n:
                raise ValidationError(f"routing is {self.matrix.n}x{self.matrix.n} but the process has dimension {n}")
            self.coeffs = DynamicCoefficients.constant(self.matrix)
        if self.matrix is not None and not self.matrix.has_zero_diagonal:
            raise ValidationError("routing matrix must have a zero diagonal")
        if self.kind in ("stationary", "conditions") and self.matrix is None:
            raise ValidationError(f"kind {self.kind!r} needs a constant routing matrix")

    @property
    def seeds(self) -> list[int]:
        return [self.seed_base + i for i in range(self.seed_count)]

    @property
    def grid(self):
        return uniform_grid(self.horizon, self.step)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "process": self.process.to_dict(),
            "routing": self.routing,
            "initials": self.initials,
            "grid": {"horizon": self.horizon, "step": self.step},
            "seeds": {"base": self.seed_base, "count": self.seed_count},
            "tolerances": {
                "solver": self.solver_tol,
                "coupling": self.coupling_tol,
                "audit": self.audit_tol,
                "verdict_threshold": self.verdict_threshold,
            },
            "ergodic": self.ergodic,
        }


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(d)


# ---------------------------------------------------------------- helpers


def _sup(v) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def _series_indices(K: int, points: int = SERIES_POINTS) -> np.ndarray:
    return np.unique(np.linspace(0, K, min(points, K + 1)).round().astype(np.int64))


def _clean(obj):
    """Recursively convert numpy scalars/arrays to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def ergodic_sample(
    spec, P, horizon: float, step: float, every: float = 1.0, *, burn_in: float = 0.0,
    seed: int = 0, chunk: float = 1e4, tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Values of ``W(X)(t)`` at ``t = burn_in + every, burn_in + 2 every, ...`` along one long path.

    The path is generated chunk by chunk; this relies on stationary
    independent increments, so only Brownian and Levy specs are accepted.
    """
    if not isinstance(spec, (Brownian, LevyCP)):
        raise ValidationError("ergodic sampling needs a process with stationary independent increments")
    stride = every / step
    if not stride >= 1 or abs(stride - round(stride)) > 1e-9 * stride:
        raise ValidationError("'every' must be a positive integer multiple of the step")
    stride = int(round(stride))
    per_chunk = max(stride, int(round(chunk / step)) // stride * stride)
    grid = uniform_grid(per_chunk * step, step)
    P = P if isinstance(P, RoutingMatrix) else RoutingMatrix(P)
    total = int(round(horizon / step))
    w = np.zeros(spec.n)
    out, done, c = [], 0, 0
    ss = np.random.SeedSequence(seed)
    while done < total:
        sub = int(np.random.SeedSequence(entropy=ss.entropy, spawn_key=(7, c)).generate_state(1)[0])
        X = generate(spec, grid, sub)
        W = reflect(shift(w, X), P, tol).W.values
        t0 = done * step
        idx = np.arange(stride, per_chunk + 1, stride)
        keep = idx[(t0 + idx * step > burn_in + 1e-12 * step) & (done + idx <= total)]
        out.append(W[keep])
        w = W[-1].copy()
        done += per_chunk
        c += 1
    return np.concatenate(out, axis=0)


# ---------------------------------------------------------------- kinds


def _solve_pair(cfg: ExperimentConfig, X: VectorPath, a):
    """Return ``(Wa, W0, La, L0)`` arrays using the constant or dynamic solver."""
    if cfg.matrix is not None and cfg.coeffs.is_constant and not np.any(
        np.asarray(cfg.coeffs.b(0.0, np.zeros(X.n), np.zeros(X.n)))
    ):
        sa, s0 = reflect(shift(a, X), cfg.matrix, cfg.solver_tol), reflect(X, cfg.matrix, cfg.solver_tol)
    else:
        sa = reflect_dynamic(X, cfg.coeffs, a, cfg.solver_tol)
        s0 = reflect_dynamic(X, cfg.coeffs, None, cfg.solver_tol)
    return sa, s0


def _irrelevance_leg(cfg: ExperimentConfig, seed: int) -> dict:
    grid = cfg.grid
    X = generate(cfg.process, grid, seed)
    idx = _series_indices(grid.K)
    legs = []
    for a in cfg.initials:
        sa, s0 = _solve_pair(cfg, X, a)
        D = sa.W.values - s0.W.values
        T = transformed_difference(sa.W, s0.W, cfg.coeffs.Pi)
        inc = float(np.max(np.diff(T, axis=0), initial=-np.inf)) if len(T) > 1 else 0.0
        viol = int(np.sum(np.diff(T, axis=0) > cfg.audit_tol))
        sup = np.max(np.abs(D), axis=1)
        legs.append({
            "a": a,
            "initial_sup": float(sup[0]),
            "terminal_sup": float(sup[-1]),
            "terminal_difference": D[-1],
            "min_difference": float(np.min(D)),
            "max_transformed_increase": inc,
            "monotonicity_violations": viol,
            "audit_passed": bool(viol == 0 and np.min(D) >= -cfg.audit_tol),
            "series": {"t": grid.times[idx], "sup_difference": sup[idx]},
        })
    return {"seed": seed, "legs": legs}


def _run_irrelevance(cfg, threads):
    per_seed = ordered_map(lambda s: _irrelevance_leg(cfg, s), cfg.seeds, threads)
    agg = []
    for j, a in enumerate(cfg.initials):
        term = np.array([r["legs"][j]["terminal_sup"] for r in per_seed])
        init = np.array([r["legs"][j]["initial_sup"] for r in per_seed])
        agg.append({
            "a": a,
            "median_terminal_sup": float(np.median(term)),
            "max_terminal_sup": float(np.max(term)),
            "fraction_decayed_5pct": float(np.mean(term <= 0.05 * init)),
            "audits_passed": int(sum(r["legs"][j]["audit_passed"] for r in per_seed)),
        })
    return per_seed, agg


def _run_coupling(cfg, threads):
    per_a, agg = [], []
    edges = np.linspace(0.0, cfg.horizon, 11)
    for a in cfg.initials:
        exp = coupling_experiment(
            cfg.process, cfg.coeffs, a, cfg.grid, cfg.seeds, cfg.coupling_tol,
            solver_tol=cfg.solver_tol, threads=threads,
        )
        hist, _ = np.histogram(exp.times, bins=edges)
        per_a.append({"a": a, "results": [r.to_dict() for r in exp.results]})
        agg.append({
            "a": a,
            "fraction_coupled": exp.fraction_coupled,
            "median_time": float(np.median(exp.times)) if exp.times.size else None,
            "histogram": {"edges": edges, "counts": hist},
        })
    per_seed = [
        {"seed": s, "legs": [{"a": p["a"], **p["results"][i]} for p in per_a]} for i, s in enumerate(cfg.seeds)
    ]
    return per_seed, agg


def _stationary_leg(cfg, seed):
    X = generate(cfg.process, cfg.grid, seed)
    return [reflect(shift(a, X), cfg.matrix, cfg.solver_tol).W.values[-1] for a in cfg.initials]


def _run_stationary(cfg, threads):
    legs = ordered_map(lambda s: _stationary_leg(cfg, s), cfg.seeds, threads)
    samples = [np.array([leg[j] for leg in legs]) for j in range(len(cfg.initials))]
    n = cfg.process.n
    pairs = []
    for i in range(len(samples)):
        for j in range(i + 1, len(samples)):
            pairs.append({
                "a": [cfg.initials[i], cfg.initials[j]],
                "ks": [analysis.ks_distance(samples[i][:, c], samples[j][:, c]) for c in range(n)],
            })
    agg = {"pairwise_ks": pairs}
    if cfg.ergodic:
        e = cfg.ergodic
        erg = ergodic_sample(
            cfg.process, cfg.matrix, float(e.get("horizon", 1e6)), cfg.step, float(e.get("every", 1.0)),
            burn_in=float(e.get("burn_in", 0.0)), seed=int(e.get("seed", cfg.seed_base)), tol=cfg.solver_tol,
        )
        agg["ergodic"] = {
            "size": int(erg.shape[0]),
            "ks": [
                {"a": a, "ks": [analysis.ks_distance(samples[j][:, c], erg[:, c]) for c in range(n)]}
                for j, a in enumerate(cfg.initials)
            ],
        }
    per_seed = [{"seed": s, "terminal": leg} for s, leg in zip(cfg.seeds, legs)]
    return per_seed, agg


def _verdicts(vs):
    return [v.to_dict() for v in vs]


def _conditions_leg(cfg, seed, threshold):
    X = generate(cfg.process, cfg.grid, seed)
    out = {
        "seed": seed,
        "sufficient": _verdicts(analysis.sufficient_condition(X, cfg.matrix, threshold)),
        "necessary": _verdicts(analysis.necessary_condition(X, cfg.matrix, threshold)),
        "legs": [],
    }
    for a in cfg.initials:
        rep = difference_diagnostics(X, a, cfg.matrix, cfg.audit_tol, cfg.solver_tol)
        La = reflect(shift(a, X), cfg.matrix, cfg.solver_tol).L
        out["legs"].append({
            "a": a,
            "divergence": _verdicts(analysis.regulator_divergence(La, threshold)),
            "difference": rep.to_dict(),
        })
    return out


def _run_conditions(cfg, threads):
    threshold = cfg.verdict_threshold
    if threshold is None:
        threshold = 10.0 * max(float(np.max(a, initial=0.0)) for a in cfg.initials) + 10.0
    per_seed = ordered_map(lambda s: _conditions_leg(cfg, s, threshold), cfg.seeds, threads)
    agg = {"threshold": threshold}
    if not isinstance(cfg.process, Fixture):
        rho = analysis.mean_drift(cfg.process)
        stable, margins = analysis.stability_check(rho, cfg.matrix)
        agg.update({"mean_drift": rho, "stable": stable, "margins": margins})
    n = cfg.process.n

    def tally(key_fn):
        table = []
        for i in range(n):
            counts = {analysis.SATISFIED: 0, analysis.VIOLATED: 0, analysis.INCONCLUSIVE: 0}
            for r in per_seed:
                for v in key_fn(r):
                    counts[v[i]["verdict"]] += 1
            table.append(counts)
        return table

    agg["sufficient"] = tally(lambda r: [r["sufficient"]])
    agg["necessary"] = tally(lambda r: [r["necessary"]])
    agg["divergence"] = tally(lambda r: [leg["divergence"] for leg in r["legs"]])
    return per_seed, agg


_RUNNERS = {
    "irrelevance": _run_irrelevance,
    "coupling": _run_coupling,
    "stationary": _run_stationary,
    "conditions": _run_conditions,
}


def run_experiment(cfg: ExperimentConfig | dict, threads: int | None = None) -> dict:
    """Run ``cfg`` and return the report as plain JSON types.

    The report depends only on the config: seed legs may run concurrently
    but are merged in seed order.
    """
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    per_seed, agg = _RUNNERS[cfg.kind](cfg, threads)
    return _clean({"schema": SCHEMA, "config": cfg.to_dict(), "per_seed": per_seed, "aggregate": agg})


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, allow_nan=False) + "\n"


def report_series(report: dict):
    """Yield ``(seed, a_index, name, t, values)`` for every series carried by a report."""
    if not isinstance(report, dict) or report.get("schema") != SCHEMA:
        raise ValidationError(f"not a report with schema {SCHEMA!r}")
    for rec in report.get("per_seed", []):
        for j, leg in enumerate(rec.get("legs", [])):
            s = leg.get("series") if isinstance(leg, dict) else None
            if not s:
                continue
            for name, vals in s.items():
                if name != "t":
                    yield rec["seed"], j, name, s["t"], vals
