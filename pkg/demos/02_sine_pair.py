"""
A feedforward pair where the second regulator grows without any push
=====================================================================

Coordinate 1 follows X1(t) = -t|sin t| and feeds all of its regulator
into coordinate 2, which on its own follows X2(t) = t|sin t| >= 0.  The
one-dimensional regulators of coordinate 2 (M2, and N2 built from R^-1 X)
are identically zero, yet L2 grows as fast as L1 does.
"""

import numpy as np

from orthreflect import (
    fixture,
    necessary_condition,
    reflect,
    regulator_bounds,
    regulator_divergence,
    sufficient_condition,
    uniform_grid,
)

P = [[0, 1], [0, 0]]
X = fixture("sine_pair", {}, uniform_grid(8 * np.pi, 1e-3))
M, N, upper = regulator_bounds(X, P)
L = reflect(X, P).L

print("max M2, N2:", M.values[:, 1].max(), N.values[:, 1].max())
for k in (2, 4, 6, 8):
    t = k * np.pi
    print(f"t={k}pi  L1={L.at(t)[0]:7.3f}  L2={L.at(t)[1]:7.3f}")

# Finite-horizon verdicts.  Divergence of L holds in both coordinates, the
# sufficient condition only sees coordinate 1, and the necessary condition
# (growth of R^-1 M) is met by both.
for name, verdicts in [
    ("divergence", regulator_divergence(L, 1.0)),
    ("sufficient", sufficient_condition(X, P, 1.0)),
    ("necessary", necessary_condition(X, P, 1.0)),
]:
    print(f"{name:>10}:", [(v.verdict, round(v.witness, 3)) for v in verdicts])
