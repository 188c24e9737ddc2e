"""
Input processes
===============

Seeded generators for the driving processes: Brownian motion, Levy
processes with compound Poisson jumps, renewal risk processes and Markov
additive processes.  The same seed on a longer grid reproduces the prefix.
"""

import numpy as np

from orthreflect import (
    Deterministic,
    Exponential,
    LevyCP,
    Map,
    RenewalRisk,
    critical_premium,
    generate,
    map_mean_drift,
    mean_drift,
    uniform_grid,
)

short, long = uniform_grid(10, 0.5), uniform_grid(20, 0.5)
levy = LevyCP([0.5], [2.0], Exponential(1.0), jump_sign=-1)
A, B = generate(levy, short, 3), generate(levy, long, 3)
print("prefix preserved:", np.array_equal(A.values, B.values[: len(short)]))
print("levy mean drift:", mean_drift(levy))

# A renewal risk process at the critical premium has zero mean drift.
base = RenewalRisk([1.0, 1.0], Exponential(1.0), Exponential(2.0))
c = critical_premium(base)
risk = RenewalRisk(c, Exponential(1.0), Exponential(2.0))
print("critical premium:", c, "drift:", mean_drift(risk))
X = generate(risk, uniform_grid(1e4, 1.0), 0)
print("X(T)/T:", X.values[-1] / 1e4)

# Two regimes: drift +1 and -3, a jump of 0.5 when leaving regime 1.
spec = Map(
    [[-1, 1], [1, -1]],
    [LevyCP([1.0], 0.0, None), LevyCP([-3.0], 0.0, None)],
    G=[[None, Deterministic(0.5)], [None, None]],
)
rho = map_mean_drift(spec)
slopes = [generate(spec, uniform_grid(1e4, 10.0), s).values[-1, 0] / 1e4 for s in range(20)]
print("MAP drift:", rho, "empirical:", round(float(np.mean(slopes)), 4))
