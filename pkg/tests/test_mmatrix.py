import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from orthreflect import (
    InvalidRoutingError,
    RoutingMatrix,
    load_matrix,
    neumann_inverse,
    normalize_diagonal,
    save_matrix,
    spectral_radius,
)


def lapack_radius(A):
    return float(np.max(np.abs(np.linalg.eigvals(A))))


@pytest.mark.parametrize(
    "P, expected",
    [
        (np.zeros((2, 2)), 0.0),
        ([[0, 1], [0, 0]], 0.0),
        ([[0, 0.5], [0.5, 0]], 0.5),
    ],
)
def test_spectral_radius_examples(P, expected):
    assert spectral_radius(P) == pytest.approx(expected, abs=1e-12)


def test_spectral_radius_nilpotent_is_exact():
    # strictly upper triangular of any size: all eigenvalues zero
    A = np.triu(np.random.default_rng(0).uniform(0, 5, (6, 6)), k=1)
    assert spectral_radius(A) == 0.0


def test_spectral_radius_periodic_block():
    # a 3-cycle is periodic: plain power iteration on A would oscillate
    A = np.roll(np.eye(3), 1, axis=1) * 0.7
    assert spectral_radius(A) == pytest.approx(0.7, abs=1e-12)


def test_spectral_radius_reducible():
    A = np.array([[0.0, 0.3, 5.0, 0.0], [0.3, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.8], [0.0, 0.0, 0.8, 0.0]])
    assert spectral_radius(A) == pytest.approx(0.8, abs=1e-12)


def test_spectral_radius_rejects_bad_input():
    with pytest.raises(InvalidRoutingError):
        spectral_radius([[0, np.nan], [0, 0]])
    with pytest.raises(InvalidRoutingError):
        spectral_radius([[0, -1], [0, 0]])
    with pytest.raises(InvalidRoutingError):
        spectral_radius(np.zeros((2, 3)))


@given(arrays(np.float64, (4, 4), elements=st.floats(0, 1)))
@settings(max_examples=60, deadline=None)
def test_spectral_radius_matches_lapack(A):
    assert spectral_radius(A) == pytest.approx(lapack_radius(A), abs=1e-9, rel=1e-9)


@pytest.mark.parametrize(
    "P, expected",
    [
        (np.zeros((2, 2)), np.eye(2)),
        ([[0, 1], [0, 0]], [[1, 0], [1, 1]]),
        ([[0, 0.5], [0.5, 0]], [[4 / 3, 2 / 3], [2 / 3, 4 / 3]]),
    ],
)
def test_neumann_inverse_examples(P, expected):
    np.testing.assert_allclose(neumann_inverse(P), expected, atol=1e-12)


def test_R_of_nilpotent_example():
    P = RoutingMatrix([[0, 1], [0, 0]])
    np.testing.assert_array_equal(P.R, [[1, 0], [-1, 1]])


# entries are either absent or of moderate size; mixing 1e-300 with 1 makes
# R^{-1} overflow-scale and no absolute residual bound is meaningful
entry = st.one_of(st.just(0.0), st.floats(1e-3, 1.0))


@st.composite
def routing_matrices(draw, max_n=8, rho_max=0.95):
    n = draw(st.integers(1, max_n))
    A = draw(arrays(np.float64, (n, n), elements=entry))
    np.fill_diagonal(A, 0.0)
    r = lapack_radius(A)
    if r > 0:
        A = A * (draw(st.floats(0.0, rho_max)) / r)
    return RoutingMatrix(A)


@given(routing_matrices())
@settings(max_examples=80, deadline=None)
def test_neumann_inverse_properties(P):
    Ri = P.R_inv
    # nonnegative series starting at I
    assert np.all(Ri >= np.eye(P.n) - 1e-15)
    assert np.max(np.abs(P.R @ Ri - np.eye(P.n))) <= 1e-10
    np.testing.assert_allclose(Ri, np.linalg.inv(P.R), atol=1e-8, rtol=1e-8)


@given(routing_matrices(rho_max=0.9))
@settings(max_examples=40, deadline=None)
def test_matrix_powers_vanish(P):
    norms = [np.max(np.abs(np.linalg.matrix_power(P.P, k)).sum(axis=1)) for k in range(P.n, 65)]
    # eventually small; by k = 64 with rho <= 0.9 the max row sum is tiny relative to its start
    assert norms[-1] <= max(norms[0], 1.0) * 0.9 ** (64 - P.n) * 50 + 1e-12


def test_routing_matrix_validation():
    with pytest.raises(InvalidRoutingError):
        RoutingMatrix([[0, 1], [1, 0]])  # rho = 1
    with pytest.raises(InvalidRoutingError):
        RoutingMatrix([[0, -0.1], [0, 0]])
    with pytest.raises(InvalidRoutingError):
        RoutingMatrix([[np.inf]])
    with pytest.raises(InvalidRoutingError):
        RoutingMatrix(np.zeros((0, 0)))
    P = RoutingMatrix([[0, 0.5], [0.5, 0]])
    assert P.rho == pytest.approx(0.5)
    with pytest.raises(ValueError):
        P.P[0, 0] = 1.0


def test_normalize_zero_diagonal_is_identity():
    P = RoutingMatrix([[0, 0.3], [0.6, 0]])
    Pt, s = normalize_diagonal(P)
    np.testing.assert_array_equal(Pt.P, P.P)
    np.testing.assert_array_equal(s, np.eye(2))


def test_normalize_pure_diagonal():
    Pt, s = normalize_diagonal([[0.5, 0], [0, 0.5]])
    np.testing.assert_array_equal(Pt.P, np.zeros((2, 2)))
    np.testing.assert_allclose(s, np.diag([np.sqrt(0.5)] * 2))


def test_normalize_worked_example():
    Pt, _ = normalize_diagonal([[0.5, 0.25], [0.25, 0.5]])
    np.testing.assert_allclose(Pt.P, [[0, 0.5], [0.5, 0]], atol=1e-15)


def test_normalize_rejects_unit_diagonal():
    with pytest.raises(InvalidRoutingError):
        normalize_diagonal([[1.0, 0], [0, 0]])


@st.composite
def routing_with_diagonal(draw):
    n = draw(st.integers(1, 6))
    A = draw(arrays(np.float64, (n, n), elements=entry))
    r = lapack_radius(A)
    if r > 0:
        A = A * (draw(st.floats(0.0, 0.95)) / r)
    return A


@given(routing_with_diagonal())
@settings(max_examples=80, deadline=None)
def test_normalize_properties(A):
    P = RoutingMatrix(A)
    Pt, s = normalize_diagonal(P)
    assert np.all(np.diag(Pt.P) == 0)
    assert np.all(Pt.P >= 0)
    assert Pt.rho <= P.rho + 1e-10
    # W = X + R L maps to Wt = Xt + Rt Lt with Wt = s^-1 W, Xt = s^-1 X, Lt = s L
    S = np.diag(s)
    np.testing.assert_allclose(np.diag(1 / S) @ P.R @ np.diag(1 / S), Pt.R, atol=1e-12)


def test_matrix_json_roundtrip(tmp_path):
    P = RoutingMatrix([[0, 0.1], [0.2, 0]])
    f = tmp_path / "p.json"
    save_matrix(P, f)
    d = json.loads(f.read_text())
    assert d == {"n": 2, "entries": [0.0, 0.1, 0.2, 0.0]}
    assert load_matrix(f) == P


def test_matrix_csv_roundtrip(tmp_path):
    P = RoutingMatrix([[0, 1 / 3], [0.2, 0]])
    f = tmp_path / "p.csv"
    save_matrix(P, f)
    assert load_matrix(f) == P


def test_matrix_json_accepts_nested_rows(tmp_path):
    f = tmp_path / "p.json"
    f.write_text('{"n": 2, "entries": [[0, 0.5], [0, 0]]}')
    np.testing.assert_array_equal(load_matrix(f).P, [[0, 0.5], [0, 0]])


@pytest.mark.parametrize(
    "text",
    ['{"n": 2, "entries": [0, 1, 2]}', '{"entries": [0]}', "[1, 2]", "{not json"],
)
def test_matrix_json_malformed(tmp_path, text):
    f = tmp_path / "p.json"
    f.write_text(text)
    with pytest.raises(InvalidRoutingError):
        load_matrix(f)


def test_matrix_csv_malformed(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("0,x\n0,0\n")
    with pytest.raises(InvalidRoutingError):
        load_matrix(f)
