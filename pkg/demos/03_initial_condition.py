"""
Forgetting the initial condition
================================

Two copies of a reflected Brownian network driven by the same noise,
one started at a and one at 0.  The difference D = W(a+X) - W(X) stays
nonnegative, R^-1 D only goes down, and for a stable network D dies out.
"""

import numpy as np

from orthreflect import Brownian, difference_diagnostics, generate, mean_drift, stability_check, uniform_grid

P = np.array([[0, 0.5, 0.0], [0.0, 0, 0.5], [0.3, 0.0, 0]])
spec = Brownian([-0.3, -0.3, -0.3])
stable, margins = stability_check(mean_drift(spec), P)
print("stable:", stable, "margins R^-1 mu:", np.round(margins, 3))

grid = uniform_grid(500, 0.05)
a = [2.0, 0.0, 1.0]
for seed in range(5):
    X = generate(spec, grid, seed)
    rep = difference_diagnostics(X, a, P)
    print(
        f"seed {seed}: min D {rep.min_difference:.1e}, "
        f"largest rise of R^-1 D {rep.max_transformed_increase:.1e}, "
        f"terminal D {np.round(rep.terminal_difference, 6) + 0.0}"
    )

# The same run with an unstable drift: D need not vanish.
up = Brownian([0.2, 0.2, 0.2])
X = generate(up, grid, 0)
print("unstable terminal D:", np.round(difference_diagnostics(X, a, P).terminal_difference, 3) + 0.0)
