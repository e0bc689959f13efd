"""Cycle test versus multiplier feasibility on many random data sets.

Draws half the data sets from Cobb-Douglas demands (always consistent) and
half with independent quantities, then tabulates how often each verdict
occurs and whether the cycle test and both multiplier systems agree.

    python scripts/equivalence_study.py --instances 2000 --max-t 8 --max-n 4
"""

import argparse
import collections
import time

import numpy as np

from rpgauge import (InfeasibleError, MarketStatistics, check_axiom, cross_matrix,
                     solve_multipliers, verify_solution)


def draw(rng, T, n, rationalizable):
    P = rng.uniform(0.1, 10.0, (T, n))
    if rationalizable:
        a = rng.dirichlet(np.ones(n))
        Q = a * rng.uniform(1.0, 10.0, T)[:, None] / P
    else:
        Q = rng.uniform(0.1, 10.0, (T, n))
    return MarketStatistics(P, Q)


def feasible(A, mode, kind):
    try:
        return bool(verify_solution(A, solve_multipliers(A, mode, kind)))
    except InfeasibleError:
        return False


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=1000)
    ap.add_argument("--max-t", type=int, default=8)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    counts = collections.Counter()
    disagree = 0
    t0 = time.perf_counter()
    for k in range(args.instances):
        T, n = int(rng.integers(1, args.max_t + 1)), int(rng.integers(1, args.max_n + 1))
        A = cross_matrix(draw(rng, T, n, bool(k % 2)))
        for mode in ("weak", "strict"):
            v = check_axiom(A, mode).consistent
            lam, mu = feasible(A, mode, "lambda"), feasible(A, mode, "mu")
            counts[(mode, v)] += 1
            disagree += not (v == lam == mu)
    dt = time.perf_counter() - t0

    for mode in ("weak", "strict"):
        print(f"{mode:<7} consistent {counts[(mode, True)]:>6}   "
              f"inconsistent {counts[(mode, False)]:>6}")
    print(f"disagreements {disagree} over {2 * args.instances} tests, {dt:.1f} s")
    return 1 if disagree else 0


if __name__ == "__main__":
    raise SystemExit(main())
