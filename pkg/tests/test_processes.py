import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from orthreflect import (
    Brownian,
    Deterministic,
    Empirical,
    Exponential,
    Fixture,
    LevyCP,
    Map,
    ModelError,
    RenewalRisk,
    TimeGrid,
    Uniform,
    ValidationError,
    critical_premium,
    fixture,
    generate,
    spec_from_dict,
    stationary_distribution,
    uniform_grid,
)
from orthreflect.processes import covariance_factor, dist_from_dict, dist_to_dict


def test_degenerate_brownian_is_linear():
    g = uniform_grid(3, 0.1)
    X = generate(Brownian([1.0], sigma=0.0), g, seed=5)
    np.testing.assert_array_equal(X.values[:, 0], g.times)


def test_deterministic_renewal_sawtooth():
    g = uniform_grid(5, 0.25)
    spec = RenewalRisk([1.0], Deterministic(1.0), Deterministic(1.0))
    X = generate(spec, g, 0)
    expected = g.times - np.floor(g.times)
    np.testing.assert_allclose(X.values[:, 0], expected, atol=1e-12)


def test_single_state_map_is_linear():
    spec = Map([[0.0]], [LevyCP([-2.0], 0.0, None)])
    g = uniform_grid(1, 0.5)
    X = generate(spec, g, 0)
    np.testing.assert_array_equal(X.values[:, 0], [0.0, -1.0, -2.0])


@pytest.mark.parametrize(
    "spec",
    [
        Brownian([0.5, -0.2], cov=[[1.0, 0.3], [0.3, 2.0]]),
        LevyCP([1.0, 0.0], [2.0, 0.5], (Exponential(1.0), Uniform(-1, 1)), jump_sign=-1),
        RenewalRisk([0.5, 2.0], Exponential(1.0), (Exponential(2.0), Deterministic(1.5))),
        Map([[-1, 1], [2, -2]], [LevyCP([1.0], 1.0, Exponential(1.0)), LevyCP([-3.0], 0.0, None)],
            G=[[None, Exponential(2.0)], [None, None]]),
    ],
    ids=["brownian", "levy", "renewal", "map"],
)
def test_generation_is_deterministic_and_starts_at_zero(spec):
    g = uniform_grid(20, 0.05)
    X1, X2 = generate(spec, g, 42), generate(spec, g, 42)
    assert X1 == X2
    assert np.all(X1.values[0] == 0.0)
    assert generate(spec, g, 43) != X1
    # a longer horizon extends the path without changing its prefix
    long = generate(spec, uniform_grid(40, 0.05), 42)
    np.testing.assert_allclose(long.values[: len(g)], X1.values, rtol=0, atol=1e-12)


def test_streams_are_split_per_coordinate():
    g = uniform_grid(50, 0.1)
    a = RenewalRisk([1.0, 1.0], Exponential(1.0), (Exponential(1.0), Exponential(1.0)))
    b = RenewalRisk([1.0, 3.0], Exponential(1.0), (Exponential(1.0), Uniform(0.5, 1.0)))
    np.testing.assert_array_equal(generate(a, g, 7).values[:, 0], generate(b, g, 7).values[:, 0])


def test_renewal_events_are_snapped_forward():
    # one claim of size 1 at t = 0.3 on a grid of step 1: seen at t = 1 only
    spec = RenewalRisk([1.0], Deterministic(0.3), Deterministic(1.0))
    X = generate(spec, TimeGrid([0.0, 1.0]), 0)
    # three claims by t = 1 (at 0.3, 0.6, 0.9): 1 - 3 = -2
    assert X.values[1, 0] == pytest.approx(-2.0, abs=1e-12)


def test_brownian_moments():
    mu = np.array([0.5, -1.0])
    cov = np.array([[1.0, 0.6], [0.6, 2.0]])
    spec = Brownian(mu, cov=cov)
    g = TimeGrid([0.0, 0.5, 1.0])
    N = 10_000
    X1 = np.array([generate(spec, g, s).values[-1] for s in range(N)])
    mean_se = np.sqrt(np.diag(cov) / N)
    assert np.all(np.abs(X1.mean(axis=0) - mu) <= 4 * mean_se)
    C = np.cov(X1.T)
    cov_se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / N)
    assert np.all(np.abs(C - cov) <= 4 * cov_se)


def test_levy_mean():
    spec = LevyCP([0.5], [2.0], Exponential(0.5))
    g = uniform_grid(10, 0.5)
    N = 2000
    XT = np.array([generate(spec, g, s).values[-1, 0] for s in range(N)])
    # E X(T) = T (drift + lam E J), Var X(T) = T lam E J^2
    mean, var = 10 * (0.5 + 2 * 2.0), 10 * 2 * 8.0
    assert abs(XT.mean() - mean) <= 4 * math.sqrt(var / N)


def test_renewal_at_critical_premium_has_no_drift():
    base = RenewalRisk([1.0, 1.0], Exponential(1.0), Exponential(2.0))
    c = critical_premium(base)
    spec = RenewalRisk(c, Exponential(1.0), Exponential(2.0))
    T = 1000.0
    g = uniform_grid(T, 1.0)
    ratios = np.array([generate(spec, g, s).values[-1] / T for s in range(300)])
    se = ratios.std(axis=0, ddof=1) / np.sqrt(len(ratios))
    assert np.all(np.abs(ratios.mean(axis=0)) <= 4 * se)


@pytest.mark.parametrize(
    "ia, cl, expected",
    [
        (Exponential(1.0), Exponential(2.0), 0.5),
        (Deterministic(2.0), Deterministic(3.0), 1.5),
        (Exponential(0.5), Empirical([1, 3], [0.5, 0.5]), 1.0),
    ],
)
def test_critical_premium(ia, cl, expected):
    assert critical_premium(RenewalRisk([1.0], ia, cl))[0] == pytest.approx(expected)


def test_fixture_values():
    g = TimeGrid([0.0, 0.5, np.pi / 2, np.pi])
    r = fixture("ramp", {}, g)
    assert r.values[1, 0] == -0.5
    s = fixture("sine_pair", {}, g)
    np.testing.assert_allclose(s.values[2], [-np.pi / 2, np.pi / 2])
    np.testing.assert_allclose(s.values[3], [0.0, 0.0], atol=1e-15)
    with pytest.raises(ValidationError):
        fixture("nope", {}, g)


def test_stationary_distribution_matches_null_space():
    Q = np.array([[-3.0, 2.0, 1.0], [0.5, -1.0, 0.5], [1.0, 1.0, -2.0]])
    pi = stationary_distribution(Q)
    ns = scipy.linalg.null_space(Q.T)[:, 0]
    np.testing.assert_allclose(pi, ns / ns.sum(), atol=1e-12)


@pytest.mark.parametrize(
    "Q",
    [
        [[-1.0, 0.5], [1.0, -1.0]],  # rows do not sum to zero
        [[0.0, 0.0], [1.0, -1.0]],  # reducible
        [[1.0, -1.0], [1.0, -1.0]],  # negative rate
    ],
)
def test_invalid_generators(Q):
    with pytest.raises(ModelError):
        Map(Q, [LevyCP([0.0], 0.0, None)] * 2)


def test_spec_validation():
    with pytest.raises(ValidationError):
        Brownian([0.0, 0.0], cov=[[1.0, 2.0], [2.0, 1.0]])  # indefinite
    with pytest.raises(ValidationError):
        RenewalRisk([1.0], Exponential(1.0), Uniform(-1.0, 1.0))
    with pytest.raises(ValidationError):
        RenewalRisk([0.0], Exponential(1.0), Exponential(1.0))
    with pytest.raises(ValidationError):
        Empirical([1, 2], [0.5, 0.6])
    with pytest.raises(ValidationError):
        Exponential(0.0)
    with pytest.raises(ValidationError):
        Uniform(1.0, 1.0)
    with pytest.raises(ValidationError):
        LevyCP([0.0, 0.0], [1.0, 1.0, 1.0], Exponential(1.0))
    with pytest.raises(ModelError):
        Map([[-1, 1], [1, -1]], [LevyCP([0.0], 0, None)] * 2, G=[[Exponential(1.0), None], [None, None]])
    with pytest.raises(ValidationError):
        spec_from_dict({"kind": "brownian"})
    with pytest.raises(ValidationError):
        spec_from_dict({"kind": "teleport"})


def test_semidefinite_covariance_factor():
    cov = np.array([[1.0, 1.0], [1.0, 1.0]])
    S = covariance_factor(cov)
    np.testing.assert_allclose(S @ S.T, cov, atol=1e-12)


@pytest.mark.parametrize(
    "spec",
    [
        Brownian([0.5, -0.2], cov=[[1.0, 0.3], [0.3, 2.0]]),
        Brownian([1.0], sigma=[[2.0]]),
        LevyCP([1.0], [2.0], Exponential(1.0), sigma=0.5, jump_sign=-1),
        RenewalRisk([0.5], Exponential(1.0), Empirical([1, 2], [0.25, 0.75])),
        Map([[-1, 1], [2, -2]], [LevyCP([1.0], 0.0, None), LevyCP([-3.0], 0.0, None)],
            G=[[None, Deterministic(0.5)], [None, None]], initial_state=1),
        Fixture("sine_pair"),
    ],
)
def test_spec_json_roundtrip(spec):
    g = uniform_grid(5, 0.1)
    again = spec_from_dict(spec.to_dict())
    assert again.to_dict() == spec.to_dict()
    assert generate(again, g, 3) == generate(spec, g, 3)


@given(st.sampled_from([Deterministic(2.0), Exponential(3.0), Uniform(0.5, 1.5), Empirical([1.0, 4.0], [0.3, 0.7])]))
def test_distribution_dict_roundtrip(d):
    assert dist_from_dict(dist_to_dict(d)) == d
    assert dist_from_dict(2.5) == Deterministic(2.5)


@given(st.integers(0, 2**63 - 1))
@settings(max_examples=25, deadline=None)
def test_any_seed_is_reproducible(seed):
    spec = LevyCP([0.1], [1.0], Exponential(1.0))
    g = uniform_grid(5, 0.5)
    assert generate(spec, g, seed) == generate(spec, g, seed)
