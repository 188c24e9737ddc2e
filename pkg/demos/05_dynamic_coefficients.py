"""
Drift and routing that move with time and state
===============================================

The dynamic solver freezes b(t, L, W) and P(t, L, W) at the left end of
each grid cell.  With constant coefficients it reproduces the constant
solver bit for bit.  With time-only coefficients, (I - Pi^T)^-1 D is
nonincreasing, where Pi bounds P entrywise.
"""

import numpy as np

from orthreflect import (
    Brownian,
    DynamicCoefficients,
    catalog_coefficients,
    coupling_experiment,
    feedforward_subproblem,
    generate,
    reflect,
    reflect_dynamic,
    shift,
    uniform_grid,
    validate_assumptions,
)
from orthreflect.dynamic import transformed_difference

grid = uniform_grid(200, 0.05)
X = generate(Brownian([0.0, 0.0]), grid, 7)
a = [1.5, 0.5]

P = [[0, 0.6], [0.2, 0]]
same = reflect_dynamic(X, DynamicCoefficients.constant(P), a).W.values == reflect(shift(a, X), P).W.values
print("bit-identical to the constant solver:", bool(same.all()))

# Routing that breathes in time, bounded by Pi.
Pi = np.array([[0, 0.6], [0.2, 0]])
coeffs = DynamicCoefficients(
    b=lambda t, l, w: np.array([-0.2, -0.1 * (1 + np.sin(t))]),
    P=lambda t, l, w: Pi * (0.5 + 0.5 * np.cos(t) ** 2),
    Pi=Pi,
    time_only=True,
    l_independent=True,
)
print("assumptions:", validate_assumptions(coeffs, 200, 0).to_dict()["passed"])
Wa, W0 = reflect_dynamic(X, coeffs, a).W, reflect_dynamic(X, coeffs).W
T = transformed_difference(Wa, W0, Pi)
print("largest rise of (I - Pi^T)^-1 D:", np.max(np.diff(T, axis=0)))

# Feedforward: the first k coordinates form a closed problem of their own.
ff = catalog_coefficients("state_damped", 2, {"P": [[0, 0.8], [0, 0]]})
full = reflect_dynamic(X, ff, a)
X1, ff1 = feedforward_subproblem(X, ff, 1)
print("first coordinate from the 1-d subproblem:",
      np.max(np.abs(reflect_dynamic(X1, ff1, a[:1]).W.values[:, 0] - full.W.values[:, 0])))

exp = coupling_experiment(Brownian([-0.2, -0.2]), ff, a, grid, range(20))
print("coupled:", exp.fraction_coupled, "median time:", float(np.median(exp.times)))
