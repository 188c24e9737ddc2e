"""
Reflecting a path on the orthant
================================

The smallest interesting input is the ramp X(t) = -min(t, 1): it pushes
down for one time unit and then stops.  Starting from a, the regulated
path is max(a - min(t, 1), 0), so a = 2 never touches the boundary while
a = 0.5 hits it at t = 0.5.
"""

import numpy as np

from orthreflect import (
    TimeGrid,
    VectorPath,
    fixture,
    reflect,
    reflect_fixed_point,
    regulator_bounds,
    shift,
    uniform_grid,
)

X = fixture("ramp", {}, uniform_grid(2.0, 0.25))
print("t:", X.times)

for a in (0.0, 0.5, 2.0):
    sol = reflect(shift([a], X), [[0.0]])
    print(f"a={a}: W={sol.W.values[:, 0]}  L={sol.L.values[:, 0]}")

# Two solvers: per-step complementarity and a global Picard iteration.
# They agree to solver tolerance on any input, here a random 3-d walk.
rng = np.random.default_rng(0)

t = np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 1.5, 500))])
walk = VectorPath(TimeGrid(t), np.cumsum(rng.normal(-0.1, 1.0, (501, 3)), axis=0) - rng.normal(0, 1, 3))
P = [[0, 0.4, 0.2], [0.3, 0, 0.3], [0.1, 0.5, 0]]
step, picard = reflect(walk, P), reflect_fixed_point(walk, P, 1e-12)
print("solver gap:", np.max(np.abs(step.L.values - picard.L.values)))
print("Picard sweeps:", picard.info["iterations"])

# The regulator sits between two explicit bounds built from 1-d regulators.
M, N, upper = regulator_bounds(walk, P)
L = step.L.values
print("lower bound slack >= 0:", np.min(L - np.maximum(M.values, N.values)) >= -1e-12)
print("upper bound slack >= 0:", np.min(upper.values - L) >= -1e-12)
