"""Independent brute-force oracles used only by the tests."""

import itertools
import math

import numpy as np


def simple_cycles(T):
    """Every simple cycle of length >= 2 on T nodes, rotated to start at its minimum."""
    for k in range(2, T + 1):
        for nodes in itertools.combinations(range(T), k):
            first, rest = nodes[0], nodes[1:]
            for perm in itertools.permutations(rest):
                yield (first,) + perm


def log_cycle(A, cyc):
    k = len(cyc)
    return math.fsum(math.log(A[cyc[i], cyc[(i + 1) % k]]) - math.log(A[cyc[i], cyc[i]])
                     for i in range(k))


def min_log_cycle(A):
    """Minimum log cycle product over simple cycles (``inf`` if T = 1)."""
    A = np.asarray(A, float)
    return min((log_cycle(A, c) for c in simple_cycles(A.shape[0])), default=math.inf)


def min_mean_cycle(A):
    A = np.asarray(A, float)
    return min((log_cycle(A, c) / len(c) for c in simple_cycles(A.shape[0])), default=math.inf)


def random_statistics(rng, T, n, rationalizable=False):
    """Entries in (0, 10]; optionally Cobb-Douglas demands, which satisfy the axiom."""
    P = rng.uniform(0.0, 10.0, (T, n))
    P = np.where(P == 0.0, 10.0, P)
    if rationalizable:
        a = rng.dirichlet(np.ones(n))
        budget = rng.uniform(1.0, 10.0, T)
        Q = a[None, :] * budget[:, None] / P
    else:
        Q = rng.uniform(0.0, 10.0, (T, n))
        Q = np.where(Q == 0.0, 10.0, Q)
    return P, Q


def grid_dual(generators, p, step=1e-3):
    """``inf (q.p) / Q(q)`` over a grid on the unit simplex in the plane."""
    g = np.asarray(generators, float)
    t = np.arange(0.0, 1.0 + step / 2, step)
    q = np.stack([t, 1.0 - t], axis=1)
    Q = np.min(q @ g.T, axis=1)
    ok = Q > 0
    return float(np.min((q[ok] @ np.asarray(p, float)) / Q[ok]))


def random_gauge(rng, k, n, low=0.2, high=3.0):
    return rng.uniform(0.5, 2.0, k), rng.uniform(low, high, (k, n))
