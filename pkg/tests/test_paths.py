import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from orthreflect import (
    TimeGrid,
    ValidationError,
    VectorPath,
    path_from_csv,
    path_to_csv,
    shift,
    solution_from_csv,
    solution_to_csv,
    uniform_grid,
)


def test_grid_invariants():
    with pytest.raises(ValidationError):
        TimeGrid([0.5, 1.0])
    with pytest.raises(ValidationError):
        TimeGrid([0.0, 1.0, 1.0])
    with pytest.raises(ValidationError):
        TimeGrid([0.0, np.inf])
    with pytest.raises(ValidationError):
        TimeGrid([])
    g = TimeGrid([0.0, 0.5, 2.0])
    assert g.K == 2 and g.horizon == 2.0
    assert g.index_at(0.49) == 0 and g.index_at(0.5) == 1 and g.index_at(10) == 2


def test_uniform_grid_exact_endpoint():
    g = uniform_grid(1.0, 0.1)
    assert g.K == 10 and g.times[-1] == 1.0
    g = uniform_grid(1.05, 0.5)
    np.testing.assert_array_equal(g.times, [0.0, 0.5, 1.0, 1.05])
    with pytest.raises(ValidationError):
        uniform_grid(1.0, 0.0)


def test_path_values_readonly_and_finite():
    g = uniform_grid(1, 0.5)
    X = VectorPath(g, [0.0, 1.0, 2.0])
    assert X.n == 1
    with pytest.raises(ValueError):
        X.values[0, 0] = 3.0
    with pytest.raises(ValidationError):
        VectorPath(g, [0.0, np.nan, 1.0])
    with pytest.raises(ValidationError):
        VectorPath(g, [0.0, 1.0])


def test_cadlag_lookup():
    X = VectorPath(TimeGrid([0.0, 1.0, 2.0]), [[0.0], [5.0], [7.0]])
    assert X.at(0.999)[0] == 0.0
    assert X.at(1.0)[0] == 5.0


def test_shift_examples():
    g = uniform_grid(2, 0.5)
    X = VectorPath(g, -np.minimum(g.times, 1.0))
    assert shift([0.0], X) == X
    np.testing.assert_array_equal(shift([2.0], X).values[:, 0], 2 - np.minimum(g.times, 1.0))
    Z = VectorPath(g, np.zeros((len(g), 2)))
    np.testing.assert_array_equal(shift([1, 1], Z).values, np.ones((len(g), 2)))


def test_shift_validation():
    X = VectorPath(uniform_grid(1, 1), np.zeros((2, 2)))
    with pytest.raises(ValidationError):
        shift([1.0], X)
    with pytest.raises(ValidationError):
        shift([1.0, -1.0], X)


def test_arithmetic_needs_same_grid():
    X = VectorPath(uniform_grid(1, 0.5), np.ones(3))
    Y = VectorPath(uniform_grid(1, 0.25), np.ones(5))
    with pytest.raises(ValidationError):
        X - Y
    assert (X + X).values[0, 0] == 2.0


def test_csv_header_and_format():
    X = VectorPath(TimeGrid([0.0, 0.1]), [[0.0, 1 / 3], [-2.5, 1e-300]])
    text = path_to_csv(X)
    lines = text.splitlines()
    assert lines[0] == "t,x1,x2"
    assert lines[1] == "0.0,0.0,0.3333333333333333"
    assert path_from_csv(io.StringIO(text)) == X


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.lists(st.floats(1e-6, 10.0), min_size=1, max_size=20),
            st.just(n),
        )
    ),
    st.data(),
)
@settings(max_examples=60, deadline=None)
def test_csv_roundtrip_is_exact(shape, data):
    dts, n = shape
    t = np.concatenate([[0.0], np.cumsum(dts)])
    if np.any(np.diff(t) <= 0):
        return
    vals = data.draw(arrays(np.float64, (t.size, n), elements=finite))
    X = VectorPath(TimeGrid(t), vals)
    assert path_from_csv(io.StringIO(path_to_csv(X))) == X
    W = VectorPath(TimeGrid(t), np.abs(vals))
    W2, L2 = solution_from_csv(io.StringIO(solution_to_csv(W, X)))
    assert W2 == W and L2 == X


def test_solution_csv_header(tmp_path):
    g = uniform_grid(1, 1)
    W = VectorPath(g, np.zeros((2, 2)))
    f = tmp_path / "s.csv"
    solution_to_csv(W, W, f)
    assert f.read_text().splitlines()[0] == "t,w1,w2,l1,l2"


@pytest.mark.parametrize(
    "text",
    ["", "t,x1\n", "x,x1\n0,0\n", "t,x1\n0,abc\n", "t,x1\n0,1,2\n", "t,x1\n1,0\n", "t,x1\n0,0\n0,1\n"],
)
def test_malformed_path_csv(text):
    with pytest.raises(ValidationError):
        path_from_csv(io.StringIO(text))


@pytest.mark.parametrize("text", ["t,w1,l1,l2\n0,0,0,0\n", "t,w1\n0,0\n"])
def test_malformed_solution_csv(text):
    with pytest.raises(ValidationError):
        solution_from_csv(io.StringIO(text))
