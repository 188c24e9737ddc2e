import numpy as np
import pytest

from orthreflect import RoutingMatrix, TimeGrid, VectorPath

ACCEPTANCE_LINES = []


def record_acceptance(number, title, ok, detail=""):
    line = f"[acceptance {number:>2}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def random_routing(rng, n, rho_max=0.9, density=0.6):
    """Random nonnegative zero-diagonal matrix rescaled to a spectral radius in (0, rho_max]."""
    A = rng.uniform(0, 1, (n, n)) * (rng.uniform(0, 1, (n, n)) < density)
    np.fill_diagonal(A, 0.0)
    r = np.max(np.abs(np.linalg.eigvals(A))) if n > 1 else 0.0
    if r > 0:
        A *= rng.uniform(0.05, rho_max) / r
    return RoutingMatrix(A)


def random_path(rng, n, K, scale=1.0, drift=None):
    """Random walk on an irregular grid with bounded increments, X(0) = 0."""
    dt = rng.uniform(0.5, 1.5, K)
    t = np.concatenate([[0.0], np.cumsum(dt)])
    inc = rng.uniform(-scale, scale, (K, n))
    if drift is not None:
        inc += np.asarray(drift) * dt[:, None]
    X = np.vstack([np.zeros((1, n)), np.cumsum(inc, axis=0)])
    return VectorPath(TimeGrid(t), X)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
