"""Seeded generators for the free input process ``X``.

Every generator returns a :class:`~orthreflect.paths.VectorPath` with
``X(0) = 0`` holding the exact value of the continuous-time process at each
grid point; events falling strictly between grid points therefore show up
at the next grid point, which keeps the input piecewise constant.

Randomness is split into independent streams keyed by ``(seed, component,
index)`` through :class:`numpy.random.SeedSequence` spawn keys.  Each stream
is consumed sequentially, so a longer horizon extends a path without
changing its prefix, and changing one coordinate's law leaves the other
coordinates untouched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.linalg
from numba import njit
from scipy.sparse.csgraph import connected_components

from .errors import ModelError, ValidationError
from .paths import TimeGrid, VectorPath

# stream components
_GAUSS, _JUMP_TIME, _JUMP_SIZE, _INTERARRIVAL, _CLAIM, _CHAIN_HOLD, _CHAIN_MOVE, _CHAIN_INIT, _SWITCH_JUMP = range(9)


def _rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


# ---------------------------------------------------------------- distributions


@dataclass(frozen=True)
class Deterministic:
    value: float

    @property
    def mean(self) -> float:
        return float(self.value)

    @property
    def min_support(self) -> float:
        return float(self.value)

    def sample(self, rng, size):
        return np.full(size, float(self.value))


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValidationError(f"Exponential rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def min_support(self) -> float:
        return 0.0

    def sample(self, rng, size):
        return rng.standard_exponential(size) / self.rate


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValidationError(f"Uniform needs lo < hi, got {self.lo}, {self.hi}")

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def min_support(self) -> float:
        return float(self.lo)

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size)


@dataclass(frozen=True)
class Empirical:
    values: tuple
    probs: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        p = tuple(float(x) for x in self.probs)
        if not v or len(v) != len(p):
            raise ValidationError("Empirical needs equally long, nonempty values and probs")
        if min(p) < 0 or abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValidationError("Empirical probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    @property
    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))

    @property
    def min_support(self) -> float:
        return min(v for v, p in zip(self.values, self.probs) if p > 0)

    def sample(self, rng, size):
        cdf = np.cumsum(self.probs)
        cdf[-1] = 1.0
        idx = np.searchsorted(cdf, rng.random(size), side="right")
        return np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]


Distribution = Union[Deterministic, Exponential, Uniform, Empirical]
_DIST_KINDS = {"deterministic": Deterministic, "exponential": Exponential, "uniform": Uniform, "empirical": Empirical}


def dist_to_dict(d: Distribution) -> dict:
    kind = {v: k for k, v in _DIST_KINDS.items()}[type(d)]
    out = {"kind": kind}
    if isinstance(d, Empirical):
        out.update(values=list(d.values), probs=list(d.probs))
    else:
        out.update({k: float(getattr(d, k)) for k in d.__dataclass_fields__})
    return out


def dist_from_dict(d) -> Distribution:
    if d is None:
        return None
    if isinstance(d, (int, float)):
        return Deterministic(float(d))
    kind = d.get("kind")
    if kind not in _DIST_KINDS:
        raise ValidationError(f"unknown distribution kind {kind!r}")
    params = {k: v for k, v in d.items() if k != "kind"}
    try:
        return _DIST_KINDS[kind](**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for {kind}: {exc}") from None


# ---------------------------------------------------------------- process specs


def _vec(x, name) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} must be a finite vector")
    return v


def covariance_factor(cov) -> np.ndarray:
    """Lower-triangular-type factor ``S`` with ``S S^T = cov``.

    Cholesky when ``cov`` is positive definite; otherwise a pivoted LDL^T
    factorization handles the semidefinite case.
    """
    C = np.asarray(cov, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or not np.allclose(C, C.T, atol=1e-12):
        raise ValidationError("covariance must be a symmetric square matrix")
    try:
        return np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        pass
    lu, d, perm = scipy.linalg.ldl(C, lower=True)
    dd = np.diag(d)
    scale = max(1.0, float(np.max(np.abs(C))))
    if not np.allclose(d, np.diag(dd)) or np.any(dd < -1e-12 * scale):
        raise ValidationError("covariance matrix is not positive semidefinite")
    return lu * np.sqrt(np.clip(dd, 0.0, None))[None, :]


@dataclass(frozen=True, eq=False)
class Brownian:
    """Brownian motion ``mu t + sigma B(t)``; give either ``sigma`` or ``cov``."""

    mu: np.ndarray
    sigma: np.ndarray | None = None
    cov: np.ndarray | None = None

    def __post_init__(self):
        mu = _vec(self.mu, "mu")
        n = mu.size
        if self.sigma is not None and self.cov is not None:
            raise ValidationError("give sigma or cov, not both")
        if self.cov is not None:
            cov = np.asarray(self.cov, dtype=float).reshape(n, n)
            sigma = covariance_factor(cov)
        elif self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=float)
            sigma = np.diag(np.full(n, float(sigma))) if sigma.ndim == 0 else sigma.reshape(n, -1)
            cov = None
        else:
            sigma, cov = np.eye(n), None
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "cov", cov)

    @property
    def n(self) -> int:
        return self.mu.size

    def to_dict(self):
        d = {"kind": "brownian", "mu": self.mu.tolist()}
        if self.cov is not None:
            d["cov"] = self.cov.tolist()
        else:
            d["sigma"] = self.sigma.tolist()
        return d


@dataclass(frozen=True, eq=False)
class LevyCP:
    """Drift plus independent compound Poisson jumps per coordinate (plus an optional Gaussian part).

    Jump values are added as drawn: use negative-valued laws for downward jumps
    or set ``jump_sign=-1`` to subtract positive draws.
    """

    drift: np.ndarray
    rates: np.ndarray
    jumps: tuple
    sigma: np.ndarray | None = None
    jump_sign: float = 1.0

    def __post_init__(self):
        drift = _vec(self.drift, "drift")
        n = drift.size
        rates = _vec(self.rates, "rates")
        if rates.size not in (1, n):
            raise ValidationError(f"rates must be a scalar or have length {n}")
        rates = np.broadcast_to(rates, (n,)).astype(float)
        if np.any(rates < 0):
            raise ValidationError("jump rates must be nonnegative")
        jumps = self.jumps
        if jumps is None or isinstance(jumps, (Deterministic, Exponential, Uniform, Empirical)):
            jumps = (jumps,) * n
        jumps = tuple(jumps)
        if len(jumps) != n:
            raise ValidationError("need one jump distribution per coordinate")
        for r, j in zip(rates, jumps):
            if r > 0 and j is None:
                raise ValidationError("positive jump rate needs a jump distribution")
        sigma = None
        if self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=float)
            sigma = np.diag(np.full(n, float(sigma))) if sigma.ndim == 0 else sigma.reshape(n, -1)
        if self.jump_sign not in (1.0, -1.0, 1, -1):
            raise ValidationError("jump_sign must be +1 or -1")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "jump_sign", float(self.jump_sign))

    @property
    def n(self) -> int:
        return self.drift.size

    @property
    def mean_rate(self) -> np.ndarray:
        """``E X(1)``: drift plus jump rate times mean jump."""
        jm = np.array([j.mean if j is not None else 0.0 for j in self.jumps])
        return self.drift + self.jump_sign * self.rates * jm

    def to_dict(self):
        d = {
            "kind": "levy_cp",
            "drift": self.drift.tolist(),
            "rates": self.rates.tolist(),
            "jumps": [dist_to_dict(j) if j is not None else None for j in self.jumps],
            "jump_sign": self.jump_sign,
        }
        if self.sigma is not None:
            d["sigma"] = self.sigma.tolist()
        return d


@dataclass(frozen=True, eq=False)
class Map:
    """Markov additive process with finite modulating chain.

    ``Q`` is the generator, ``states[i]`` the :class:`LevyCP` dynamics in
    regime ``i`` and ``G[i][j]`` either ``None`` (no jump) or a per-coordinate
    tuple of jump laws applied when the chain moves from ``i`` to ``j``.
    ``initial_state=None`` draws the starting regime from the stationary law.
    """

    Q: np.ndarray
    states: tuple
    G: tuple | None = None
    initial_state: int | None = None

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        m = Q.shape[0]
        validate_generator(Q)
        states = tuple(self.states)
        if len(states) != m:
            raise ModelError(f"need {m} regime specifications, got {len(states)}")
        n = states[0].n
        if any(s.n != n for s in states):
            raise ModelError("all regimes must share the dimension")
        G = self.G
        if G is None:
            G = tuple(tuple(None for _ in range(m)) for _ in range(m))
        G = tuple(tuple(_jump_tuple(g, n) for g in row) for row in G)
        if len(G) != m or any(len(row) != m for row in G):
            raise ModelError("G must be m x m")
        for i in range(m):
            if G[i][i] is not None and any(d is not None and not (isinstance(d, Deterministic) and d.value == 0) for d in G[i][i]):
                raise ModelError("diagonal transition jumps must be the constant zero")
        if self.initial_state is not None and not 0 <= self.initial_state < m:
            raise ModelError("initial_state out of range")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "G", G)

    @property
    def n(self) -> int:
        return self.states[0].n

    @property
    def m(self) -> int:
        return self.Q.shape[0]

    def to_dict(self):
        return {
            "kind": "map",
            "Q": self.Q.tolist(),
            "states": [s.to_dict() for s in self.states],
            "G": [[None if g is None else [dist_to_dict(d) if d is not None else None for d in g] for g in row] for row in self.G],
            "initial_state": self.initial_state,
        }


def _jump_tuple(g, n):
    if g is None:
        return None
    if isinstance(g, (Deterministic, Exponential, Uniform, Empirical)):
        return (g,) * n
    g = tuple(g)
    if len(g) != n:
        raise ModelError("transition jump needs one law per coordinate")
    return g


@dataclass(frozen=True, eq=False)
class RenewalRisk:
    """Independent renewal risk processes ``X_i(t) = c_i t - sum_{l <= N_i(t)} U_l``."""

    c: np.ndarray
    interarrival: tuple
    claims: tuple

    def __post_init__(self):
        c = _vec(self.c, "c")
        n = c.size
        if np.any(c <= 0):
            raise ValidationError("premium rates must be positive")
        ia = self.interarrival
        cl = self.claims
        ia = (ia,) * n if not isinstance(ia, (tuple, list)) else tuple(ia)
        cl = (cl,) * n if not isinstance(cl, (tuple, list)) else tuple(cl)
        if len(ia) != n or len(cl) != n:
            raise ValidationError("need one interarrival and one claim law per coordinate")
        for d in ia + cl:
            if d.min_support < 0 or (not isinstance(d, (Exponential, Uniform)) and d.min_support <= 0):
                raise ValidationError(f"{d} is not supported on (0, inf)")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "interarrival", ia)
        object.__setattr__(self, "claims", cl)

    @property
    def n(self) -> int:
        return self.c.size

    def to_dict(self):
        return {
            "kind": "renewal_risk",
            "c": self.c.tolist(),
            "interarrival": [dist_to_dict(d) for d in self.interarrival],
            "claims": [dist_to_dict(d) for d in self.claims],
        }


@dataclass(frozen=True)
class Fixture:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FIXTURES:
            raise ValidationError(f"unknown fixture {self.name!r}; known: {sorted(FIXTURES)}")

    @property
    def n(self) -> int:
        return FIXTURES[self.name][0]

    def to_dict(self):
        return {"kind": "fixture", "name": self.name, "params": dict(self.params)}


ProcessSpec = Union[Brownian, LevyCP, Map, RenewalRisk, Fixture]


def spec_from_dict(d: dict) -> ProcessSpec:
    """Build a process specification from its JSON form (tagged by ``kind``)."""
    kind = d.get("kind")
    try:
        if kind == "brownian":
            return Brownian(d["mu"], d.get("sigma"), d.get("cov"))
        if kind == "levy_cp":
            jumps = d.get("jumps")
            if isinstance(jumps, list):
                jumps = tuple(dist_from_dict(j) for j in jumps)
            else:
                jumps = dist_from_dict(jumps)
            return LevyCP(d["drift"], d.get("rates", 0.0), jumps, d.get("sigma"), d.get("jump_sign", 1.0))
        if kind == "map":
            states = tuple(spec_from_dict({**s, "kind": "levy_cp"}) for s in d["states"])
            G = d.get("G")
            if G is not None:
                G = tuple(
                    tuple(
                        None if g is None else (dist_from_dict(g) if isinstance(g, dict) else tuple(dist_from_dict(x) for x in g))
                        for g in row
                    )
                    for row in G
                )
            return Map(d["Q"], states, G, d.get("initial_state"))
        if kind == "renewal_risk":
            ia, cl = d["interarrival"], d["claims"]
            ia = tuple(dist_from_dict(x) for x in ia) if isinstance(ia, list) else dist_from_dict(ia)
            cl = tuple(dist_from_dict(x) for x in cl) if isinstance(cl, list) else dist_from_dict(cl)
            return RenewalRisk(d["c"], ia, cl)
        if kind == "fixture":
            return Fixture(d["name"], dict(d.get("params", {})))
    except KeyError as exc:
        raise ValidationError(f"process spec of kind {kind!r} is missing field {exc}") from None
    raise ValidationError(f"unknown process kind {kind!r}")


# ---------------------------------------------------------------- chain helpers


def validate_generator(Q: np.ndarray) -> None:
    """Raise :class:`ModelError` unless ``Q`` is a conservative irreducible rate matrix."""
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ModelError("rate matrix must be square")
    if not np.all(np.isfinite(Q)):
        raise ModelError("rate matrix has non-finite entries")
    off = Q - np.diag(np.diag(Q))
    if np.any(off < 0):
        raise ModelError("off-diagonal rates must be nonnegative")
    scale = max(1.0, float(np.max(np.abs(Q))))
    if np.any(np.abs(Q.sum(axis=1)) > 1e-12 * scale * Q.shape[0]):
        raise ModelError("rate matrix rows must sum to zero")
    if Q.shape[0] > 1:
        n_comp, _ = connected_components(off > 0, directed=True, connection="strong")
        if n_comp != 1:
            raise ModelError("rate matrix is reducible")


def stationary_distribution(Q) -> np.ndarray:
    """Solve ``pi Q = 0``, ``sum(pi) = 1`` by a dense least-squares solve of the augmented system."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    validate_generator(Q)
    m = Q.shape[0]
    A = np.vstack([Q.T, np.ones((1, m))])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@njit(cache=True)
def _run_chain(start, hold, move, exit_rates, cum_jump, horizon):
    # returns (switch_times, states) with states[r] the regime entered at switch_times[r];
    # a negative count means the pre-drawn randomness ran out
    N = hold.size
    times = np.empty(N + 1)
    states = np.empty(N + 1, dtype=np.int64)
    times[0] = 0.0
    states[0] = start
    t = 0.0
    s = start
    m = exit_rates.size
    for r in range(N):
        rate = exit_rates[s]
        if rate <= 0.0:
            return times[: r + 1], states[: r + 1], r + 1
        t = t + hold[r] / rate
        if t > horizon:
            return times[: r + 1], states[: r + 1], r + 1
        u = move[r]
        nxt = m - 1
        for j in range(m):
            if u < cum_jump[s, j]:
                nxt = j
                break
        s = nxt
        times[r + 1] = t
        states[r + 1] = s
    return times, states, -1


def _draw_until(seed, key, sampler, horizon, guess):
    """Sequential positive draws whose cumulative sum first exceeds ``horizon``.

    Redraws a longer prefix from a fresh generator if needed, which yields
    the same leading values, so the result does not depend on ``guess``.
    """
    size = max(16, int(guess))
    while True:
        draws = sampler(_rng(seed, *key), size)
        cs = np.cumsum(draws)
        if cs[-1] > horizon:
            k = int(np.searchsorted(cs, horizon, side="right"))
            return cs[:k]
        size *= 2


# ---------------------------------------------------------------- evaluators


def _levy_at(spec: LevyCP, clock: np.ndarray, seed: int, key_base: tuple) -> np.ndarray:
    """Evaluate a LevyCP path at nondecreasing clock values starting at 0."""
    n = spec.n
    K1 = clock.size
    out = clock[:, None] * spec.drift[None, :]
    horizon = float(clock[-1])
    if spec.sigma is not None:
        dtau = np.diff(clock)
        ncols = spec.sigma.shape[1]
        B = np.zeros((K1, ncols))
        for j in range(ncols):
            z = _rng(seed, _GAUSS, *key_base, j).standard_normal(K1 - 1)
            B[1:, j] = np.cumsum(np.sqrt(dtau) * z)
        out = out + B @ spec.sigma.T
    for j in range(n):
        lam = spec.rates[j]
        if lam <= 0 or horizon <= 0:
            continue
        times = _draw_until(
            seed, (_JUMP_TIME, *key_base, j), lambda g, s: g.standard_exponential(s) / lam, horizon, lam * horizon * 1.2 + 32
        )
        if times.size == 0:
            continue
        sizes = spec.jumps[j].sample(_rng(seed, _JUMP_SIZE, *key_base, j), times.size)
        cum = np.concatenate([[0.0], np.cumsum(sizes)])
        out[:, j] += spec.jump_sign * cum[np.searchsorted(times, clock, side="right")]
    return out


def _gen_brownian(spec: Brownian, grid: TimeGrid, seed: int) -> np.ndarray:
    t = grid.times
    sq = np.sqrt(np.diff(t))
    ncols = spec.sigma.shape[1]
    B = np.zeros((t.size, ncols))
    for j in range(ncols):
        z = _rng(seed, _GAUSS, j).standard_normal(t.size - 1)
        B[1:, j] = np.cumsum(sq * z)
    return t[:, None] * spec.mu[None, :] + B @ spec.sigma.T


def _gen_renewal(spec: RenewalRisk, grid: TimeGrid, seed: int) -> np.ndarray:
    t = grid.times
    horizon = grid.horizon
    out = t[:, None] * spec.c[None, :]
    for i in range(spec.n):
        ia = spec.interarrival[i]
        arrivals = _draw_until(seed, (_INTERARRIVAL, i), ia.sample, horizon, horizon / ia.mean * 1.2 + 32)
        if arrivals.size == 0:
            continue
        claims = spec.claims[i].sample(_rng(seed, _CLAIM, i), arrivals.size)
        cum = np.concatenate([[0.0], np.cumsum(claims)])
        out[:, i] -= cum[np.searchsorted(arrivals, t, side="right")]
    return out


def _gen_map(spec: Map, grid: TimeGrid, seed: int) -> np.ndarray:
    t = grid.times
    horizon = grid.horizon
    Q = spec.Q
    m, n = spec.m, spec.n
    exit_rates = -np.diag(Q).copy()
    jump_probs = np.zeros((m, m))
    for i in range(m):
        if exit_rates[i] > 0:
            jump_probs[i] = np.where(np.arange(m) == i, 0.0, Q[i]) / exit_rates[i]
    cum_jump = np.cumsum(jump_probs, axis=1)
    if spec.initial_state is None:
        pi = stationary_distribution(Q)
        u = _rng(seed, _CHAIN_INIT).random()
        start = int(min(np.searchsorted(np.cumsum(pi), u, side="right"), m - 1))
    else:
        start = int(spec.initial_state)

    size = int(horizon * max(exit_rates.max(), 1e-300) * 1.2) + 64 if exit_rates.max() > 0 else 1
    while True:
        hold = _rng(seed, _CHAIN_HOLD).standard_exponential(size)
        move = _rng(seed, _CHAIN_MOVE).random(size)
        sw_times, sw_states, count = _run_chain(start, hold, move, exit_rates, cum_jump, horizon)
        if count >= 0:
            break
        size *= 2

    # occupation clocks A_i(t_k)
    seg_idx = np.searchsorted(sw_times, t, side="right") - 1
    seg_len = np.diff(np.append(sw_times, np.inf))
    occ_at_start = np.zeros((sw_times.size, m))
    if sw_times.size > 1:
        contrib = np.zeros((sw_times.size - 1, m))
        contrib[np.arange(sw_times.size - 1), sw_states[:-1]] = seg_len[:-1]
        occ_at_start[1:] = np.cumsum(contrib, axis=0)
    out = np.zeros((t.size, n))
    for i in range(m):
        clock = occ_at_start[seg_idx, i] + np.where(sw_states[seg_idx] == i, t - sw_times[seg_idx], 0.0)
        clock = np.maximum.accumulate(clock)
        out += _levy_at(spec.states[i], clock, seed, (100 + i,))

    # transition jumps, drawn per (from, to) pair in order of occurrence
    if sw_times.size > 1:
        frm, to, when = sw_states[:-1], sw_states[1:], sw_times[1:]
        jumps = np.zeros((when.size, n))
        for i in range(m):
            for j in range(m):
                g = spec.G[i][j]
                if g is None or i == j:
                    continue
                sel = np.flatnonzero((frm == i) & (to == j))
                if sel.size == 0:
                    continue
                for c in range(n):
                    if g[c] is not None:
                        jumps[sel, c] = g[c].sample(_rng(seed, _SWITCH_JUMP, i, j, c), sel.size)
        cum = np.vstack([np.zeros((1, n)), np.cumsum(jumps, axis=0)])
        out += cum[np.searchsorted(when, t, side="right")]
    return out


# ---------------------------------------------------------------- fixtures


def _ramp(t, params):
    cap = float(params.get("cap", 1.0))
    return -np.minimum(t, cap)[:, None]


def _sine_pair(t, params):
    v = t * np.abs(np.sin(t))
    return np.column_stack([-v, v])


FIXTURES: dict[str, tuple[int, Callable]] = {"ramp": (1, _ramp), "sine_pair": (2, _sine_pair)}


def fixture(name: str, params: dict | None, grid: TimeGrid) -> VectorPath:
    """Deterministic paths: ``ramp`` is ``-min(t, cap)`` (cap 1) and
    ``sine_pair`` is ``(-t|sin t|, t|sin t|)``."""
    if name not in FIXTURES:
        raise ValidationError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
    return VectorPath(grid, FIXTURES[name][1](grid.times, params or {}))


# ---------------------------------------------------------------- public entry points


def generate(spec: ProcessSpec, grid: TimeGrid, seed: int = 0) -> VectorPath:
    """Sample ``spec`` on ``grid``; a pure function of ``(spec, grid, seed)``."""
    if isinstance(spec, Fixture):
        return fixture(spec.name, spec.params, grid)
    if isinstance(spec, Brownian):
        values = _gen_brownian(spec, grid, seed)
    elif isinstance(spec, LevyCP):
        values = _levy_at(spec, grid.times, seed, ())
    elif isinstance(spec, RenewalRisk):
        values = _gen_renewal(spec, grid, seed)
    elif isinstance(spec, Map):
        values = _gen_map(spec, grid, seed)
    else:
        raise ValidationError(f"unsupported process spec {type(spec).__name__}")
    values[0] = 0.0
    return VectorPath(grid, values)


def critical_premium(spec: RenewalRisk) -> np.ndarray:
    """Zero-loading premium ``E(U) / E(A)`` per coordinate."""
    out = []
    for ia, cl in zip(spec.interarrival, spec.claims):
        if ia.mean <= 0:
            raise ValidationError("interarrival law has zero mean")
        out.append(cl.mean / ia.mean)
    return np.array(out)
