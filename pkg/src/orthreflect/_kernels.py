"""Compiled inner loops.

``lcp_advance`` performs one reflection step and is shared by the constant
and the time/state dependent solvers, so both produce bit-identical output
on identical data.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

# status codes returned by the kernels
OK = 0
NO_CONVERGENCE = 1


def max_iterations(tol: float, rho: float) -> int:
    if rho <= 0.0:
        return 10_000
    return int(math.ceil(math.log(tol) / math.log(rho))) + 10_000


@njit(cache=True, nogil=True)
def _solve_active(R_sub, rhs):
    # Gaussian elimination without pivoting; R_sub is a nonsingular M-matrix
    m = rhs.size
    A = R_sub.copy()
    b = rhs.copy()
    for c in range(m):
        piv = A[c, c]
        if piv <= 0.0:
            return b, False
        for r in range(c + 1, m):
            f = A[r, c] / piv
            if f != 0.0:
                for j in range(c, m):
                    A[r, j] -= f * A[c, j]
                b[r] -= f * b[c]
    x = np.empty(m)
    for r in range(m - 1, -1, -1):
        s = b[r]
        for j in range(r + 1, m):
            s -= A[r, j] * x[j]
        x[r] = s / A[r, r]
    return x, True


@njit(cache=True, nogil=True)
def lcp_advance(q, PT, tol, stop, max_iter, w_out, dl_out):
    """One reflection step from the free position ``q = W_prev + dX``.

    Finds the least ``z >= 0`` with ``q + (I - PT) z >= 0`` and complementarity
    by the monotone iteration ``z <- max(0, PT z - q)`` started at 0, then
    re-solves the equality system on the identified active set.  Writes the
    new ``W`` into ``w_out`` and ``z`` into ``dl_out``.

    Returns ``(status, iterations, residual)``; the residual is the largest
    amount by which ``w_out`` was altered relative to ``q + R z`` (clamping).
    """
    n = q.size
    all_nonneg = True
    for i in range(n):
        dl_out[i] = 0.0
        if q[i] < 0.0:
            all_nonneg = False
    if all_nonneg:
        for i in range(n):
            w_out[i] = q[i]
        return OK, 0, 0.0

    z = dl_out
    znew = np.empty(n)
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        change = 0.0
        for i in range(n):
            s = -q[i]
            for j in range(n):
                s += PT[i, j] * z[j]
            v = s if s > 0.0 else 0.0
            d = v - z[i]
            if d > change:
                change = d
            znew[i] = v
        for i in range(n):
            z[i] = znew[i]
        if change <= stop:
            converged = True
            break
    if not converged:
        return NO_CONVERGENCE, it, math.inf

    # active-set polish
    m = 0
    for i in range(n):
        if z[i] > 0.0:
            m += 1
    if m > 0:
        idx = np.empty(m, dtype=np.int64)
        c = 0
        for i in range(n):
            if z[i] > 0.0:
                idx[c] = i
                c += 1
        R_sub = np.empty((m, m))
        rhs = np.empty(m)
        for a in range(m):
            rhs[a] = -q[idx[a]]
            for b in range(m):
                R_sub[a, b] = -PT[idx[a], idx[b]]
            R_sub[a, a] += 1.0
        zs, ok = _solve_active(R_sub, rhs)
        if ok:
            for a in range(m):
                if zs[a] < 0.0:
                    ok = False
        if ok:
            cand = np.zeros(n)
            for a in range(m):
                cand[idx[a]] = zs[a]
            for i in range(n):
                if cand[i] == 0.0:
                    s = q[i]
                    for j in range(n):
                        s -= PT[i, j] * cand[j]
                    if s < -tol:
                        ok = False
            if ok:
                for i in range(n):
                    z[i] = cand[i]

    resid = 0.0
    for i in range(n):
        s = q[i] + z[i]
        for j in range(n):
            s -= PT[i, j] * z[j]
        if z[i] > 0.0:
            w = 0.0
        elif s < 0.0 and s >= -tol:
            w = 0.0
        else:
            w = s
        r = abs(w - s)
        if r > resid:
            resid = r
        w_out[i] = w
    return OK, it, resid


@njit(cache=True, nogil=True)
def reflect_path(X, PT, tol, stop, max_iter, W, L):
    """Step the whole grid.  Returns ``(status, fail_index, max_iters, max_resid)``."""
    K1, n = X.shape
    w_prev = np.zeros(n)
    l_acc = np.zeros(n)
    q = np.empty(n)
    w = np.empty(n)
    dl = np.empty(n)
    max_it = 0
    max_res = 0.0
    for k in range(K1):
        for i in range(n):
            if k == 0:
                q[i] = w_prev[i] + X[0, i]
            else:
                q[i] = w_prev[i] + (X[k, i] - X[k - 1, i])
        status, it, res = lcp_advance(q, PT, tol, stop, max_iter, w, dl)
        if status != OK:
            return status, k, it, res
        if it > max_it:
            max_it = it
        if res > max_res:
            max_res = res
        for i in range(n):
            l_acc[i] += dl[i]
            L[k, i] = l_acc[i]
            W[k, i] = w[i]
            w_prev[i] = w[i]
    return OK, -1, max_it, max_res
