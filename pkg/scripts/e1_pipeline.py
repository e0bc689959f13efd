"""Run the smoothing pipeline on the two-observation example and print the audit.

    python scripts/e1_pipeline.py [--svg e1.svg] [--out report.json]
"""

import argparse
import os
import time

from rpgauge import cross_matrix, load_statistics, solve_multipliers, PolyhedralGauge
from rpgauge.smoothing import SmoothingConfig, smooth

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--input", default=os.path.join(HERE, os.pardir, "data", "e1.csv"))
    ap.add_argument("--out")
    ap.add_argument("--svg")
    ap.add_argument("--quad-order", type=int, default=64)
    args = ap.parse_args()

    S = load_statistics(args.input)
    m = solve_multipliers(cross_matrix(S), "strict")
    G = PolyhedralGauge.from_multipliers(S, m)
    t0 = time.perf_counter()
    result = smooth(G, S, SmoothingConfig(quad_order=args.quad_order))
    dt = time.perf_counter() - t0
    rep = result.report

    print(f"lambda    {m.values.tolist()}")
    print(f"s points  {rep.s_points.tolist()}")
    print(f"rho       {rep.rho:.6g}   eps_round {rep.epsilon_round:.6g}   cap eps {rep.cap.eps:.6g}")
    print(f"alpha     {rep.alpha:.10f}   beta {rep.beta:.10f}")
    for c in rep.checks:
        print(f"  {'ok  ' if c.passed else 'FAIL'} {c.name:<24} {c.value: .3e}  (limit {c.limit:.1e})")
    print(f"{'passed' if rep.passed else 'FAILED'} in {dt:.1f} s")

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rep.dumps() + "\n")
    if args.svg:
        from rpgauge.cli import write_smoothing_svg
        write_smoothing_svg(result, args.svg)
    return 0 if rep.passed else 2


if __name__ == "__main__":
    raise SystemExit(main())
