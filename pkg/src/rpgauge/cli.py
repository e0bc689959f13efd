"""Command-line front end.

Exit status: 0 on success, 2 when the answer is a semantic negative (an
inconsistent data set, an infeasible system, a failed certificate), 1 on
errors. JSON goes to stdout (or ``--out``) whenever the status is 0 or 2.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import consistency as cons
from .gauge import GaugeError, PolyhedralGauge, eval_P, eval_Q, superdifferential
from .statistics import MarketStatistics, StatisticsError, cross_matrix, load_statistics
from .svg import Curve, Marker, render

OK, ERROR, NEGATIVE = 0, 1, 2
SEED_ENV = "RPGAUGE_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Bad command lines are errors (status 1), not semantic negatives."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ERROR, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON result here instead of stdout")
    common.add_argument("--verbose", "-v", action="store_true")
    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="market statistics (.csv or .json)")
    mode = argparse.ArgumentParser(add_help=False)
    mode.add_argument("--mode", choices=[cons.WEAK, cons.STRICT], default=None)
    gauge = argparse.ArgumentParser(add_help=False)
    gauge.add_argument("--gauge", help='gauge JSON {"lambda": [...], "prices": [[...], ...]}')
    quad = argparse.ArgumentParser(add_help=False)
    quad.add_argument("--quad-order", type=_positive(int), default=64)
    quad.add_argument("--resolution", type=_positive(float), default=1e-10,
                      help="positional tolerance h_b for boundary points")
    quad.add_argument("--tol", type=_positive(float), default=None,
                      help="relative tie tolerance for active facets")
    quad.add_argument("--svg", help="write an SVG overlay here")

    p = _Parser(prog="rpgauge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common, data, mode], help="test the axiom")
    s = sub.add_parser("solve", parents=[common, data, mode], help="solve the multiplier system")
    s.add_argument("--kind", choices=[cons.LAMBDA, cons.MU], default=cons.LAMBDA)
    sub.add_parser("recover", parents=[common, data, mode], help="recover the utility gauge")
    for name, what in (("eval", "utility index Q"), ("dual", "price index P")):
        e = sub.add_parser(name, parents=[common, gauge], help=f"evaluate the {what}")
        e.add_argument("--point", type=_vector, required=True, action="append",
                       help="comma-separated coordinates; repeatable")
        e.add_argument("--tol", type=_positive(float), default=None)
    sub.add_parser("smooth", parents=[common, data, gauge, quad], help="smooth the gauge pair")
    c = sub.add_parser("certify", parents=[common, data, gauge, quad],
                       help="certify boundary smoothness of a body")
    c.add_argument("--body", choices=["chi", "parallel", "smoothed"], default="smoothed")
    c.add_argument("--eps", type=_positive(float), default=0.1,
                   help="radius of the outer parallel body")
    c.add_argument("--samples", type=_positive(int), default=512)
    pl = sub.add_parser("plot", parents=[common, data, gauge], help="SVG of gauge level curves")
    pl.add_argument("--svg", required=True)
    pl.add_argument("--levels", type=_vector, default=np.array([0.5, 1.0, 2.0]))
    pl.add_argument("--kind", choices=["utility", "price"], default="utility")
    return p


# -- helpers -------------------------------------------------------------------

def _note(args, msg: str) -> None:
    if args.verbose:
        print(f"# {msg}", file=sys.stderr)


def _emit(args, doc: dict) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _statistics(args) -> MarketStatistics:
    if not args.input:
        raise UsageError(f"{args.command} needs --input")
    S = load_statistics(args.input)
    _note(args, f"read T={S.T} observations of n={S.n} goods; observations are numbered 1..T")
    return S


def _gauge(args) -> Optional[PolyhedralGauge]:
    return PolyhedralGauge.load(args.gauge) if args.gauge else None


def _seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _recover(S: MarketStatistics, mode: str):
    """Gauge from lambda multipliers, or the failing verdict."""
    try:
        m = cons.solve_multipliers(cross_matrix(S), mode, cons.LAMBDA)
    except cons.InfeasibleError as exc:
        return None, exc.verdict
    return PolyhedralGauge.from_multipliers(S, m), m


# -- commands ------------------------------------------------------------------

def cmd_check(args) -> int:
    S = _statistics(args)
    mode = args.mode or cons.WEAK
    _note(args, f"cycle log-margins within {cons.MARGIN_TOL:g} of 0 count as zero")
    v = cons.check_axiom(cross_matrix(S), mode)
    _emit(args, v.to_json())
    return OK if v.consistent else NEGATIVE


def cmd_solve(args) -> int:
    S = _statistics(args)
    mode = args.mode or cons.WEAK
    A = cross_matrix(S)
    try:
        m = cons.solve_multipliers(A, mode, args.kind)
    except cons.InfeasibleError as exc:
        doc = exc.verdict.to_json()
        doc["kind"] = args.kind
        _emit(args, doc)
        return NEGATIVE
    chk = cons.verify_solution(A, m)
    doc = m.to_json()
    doc["slack"] = chk.slack if math.isfinite(chk.slack) else None
    _emit(args, doc)
    return OK


def cmd_recover(args) -> int:
    S = _statistics(args)
    mode = args.mode or cons.STRICT
    G, res = _recover(S, mode)
    if G is None:
        _emit(args, res.to_json())
        return NEGATIVE
    doc = G.to_json()
    doc["mode"] = mode
    _emit(args, doc)
    return OK


def _points_doc(args, fn) -> dict:
    G = _gauge(args)
    if G is None:
        raise UsageError(f"{args.command} needs --gauge")
    out = []
    for x in args.point:
        if x.size != G.n:
            raise UsageError(f"point has {x.size} coordinates, gauge has {G.n}")
        out.append(fn(G, x))
    return {"points": out}


def cmd_eval(args) -> int:
    tol = args.tol or 1e-9

    def one(G, q):
        v = eval_Q(G, q)
        d = {"q": q.tolist(), "Q": v}
        if np.any(q):
            sd = superdifferential(G, q, tol)
            d["active"] = [i + 1 for i in sd.active_set]
            d["generators"] = sd.generators.tolist()
        if v > 0 and np.all(q > 0):
            d["boundary_point"] = (q / v).tolist()
        return d

    _emit(args, _points_doc(args, one))
    return OK


def cmd_dual(args) -> int:
    _emit(args, _points_doc(args, lambda G, p: {"p": p.tolist(), "P": eval_P(G, p)}))
    return OK


def _smoothing_inputs(args):
    from .smoothing import SmoothingConfig
    S = _statistics(args)
    G = _gauge(args)
    if G is None:
        G, res = _recover(S, cons.STRICT)
        if G is None:
            return None, None, None, res
        _note(args, "gauge recovered from strict multipliers")
    kw = {"quad_order": args.quad_order, "resolution": args.resolution, "seed": _seed()}
    if args.tol:
        kw["facet_rtol"] = args.tol
    _note(args, f"seed {kw['seed']} (set {SEED_ENV} to change)")
    return S, G, SmoothingConfig(**kw), None


def write_smoothing_svg(result, path: str, count: int = 400) -> None:
    from .smoothing import display_frame
    fr = display_frame(result.facet_points, result.hat_chi)
    th = np.linspace(fr.theta_hi, fr.theta_lo, count)
    tol = result.report.config.resolution
    curves = [
        Curve(result.chi.ray_boundary(th, tol), "chi_Q", "#7f7f7f", "4 3"),
        Curve(result.hat_chi.ray_boundary(th, tol), "hat chi", "#1f77b4", "2 2"),
        Curve(result.smoothed.ray_boundary(th, tol), "smoothed chi", "#2ca02c"),
    ]
    marks = [Marker(s, f"s{i + 1}") for i, s in enumerate(result.report.s_points)]
    with open(path, "w") as fh:
        fh.write(render(curves, marks, title="characteristic sets"))


def cmd_smooth(args) -> int:
    from .smoothing import SmoothingError, StrictnessError, smooth
    S, G, cfg, verdict = _smoothing_inputs(args)
    if S is None:
        _emit(args, verdict.to_json())
        return NEGATIVE
    try:
        result = smooth(G, S, cfg)
    except StrictnessError as exc:
        _emit(args, {"passed": False, "error": str(exc)})
        return NEGATIVE
    except SmoothingError as exc:
        raise UsageError(str(exc))
    if args.svg:
        write_smoothing_svg(result, args.svg)
    _emit(args, result.report.to_json())
    return OK if result.report.passed else NEGATIVE


def cmd_certify(args) -> int:
    from .smoothing import certify_smoothness, characteristic_polygon, outer_parallel
    if args.body == "smoothed":
        from .smoothing import StrictnessError, smooth
        S, G, cfg, verdict = _smoothing_inputs(args)
        if S is None:
            _emit(args, verdict.to_json())
            return NEGATIVE
        try:
            result = smooth(G, S, cfg)
        except StrictnessError as exc:
            _emit(args, {"passed": False, "error": str(exc)})
            return NEGATIVE
        rep = result.report.smoothness
    else:
        G = _gauge(args)
        if G is None:
            raise UsageError("certify --body chi/parallel needs --gauge")
        if G.n != 2:
            raise UsageError("smoothness certification is planar (n = 2)")
        body = characteristic_polygon(G)
        if args.body == "parallel":
            body = outer_parallel(body, args.eps)
        rep = certify_smoothness(body, args.samples, seed=_seed(), tol=args.resolution)
    doc = rep.to_json()
    doc["body"] = args.body
    _emit(args, doc)
    return OK if rep.passed else NEGATIVE


def cmd_plot(args) -> int:
    from .smoothing import characteristic_polygon
    G = _gauge(args)
    if G is None:
        if not args.input:
            raise UsageError("plot needs --gauge or --input")
        G, res = _recover(_statistics(args), cons.STRICT)
        if G is None:
            _emit(args, res.to_json())
            return NEGATIVE
    if G.n != 2:
        raise UsageError("plots are planar (n = 2)")
    th = np.linspace(0.5 * math.pi - 1e-3, 1e-3, 400)
    u = np.stack([np.cos(th), np.sin(th)], axis=1)
    if args.kind == "utility":
        unit = characteristic_polygon(G).ray_boundary(th, 1e-12)
        name = "Q"
    else:
        # boundary of the price index's characteristic set along the same rays
        unit = u / np.array([eval_P(G, v) for v in u])[:, None]
        name = "P"
    # clip the unbounded tails to a window around the frontier
    corner = np.vstack([unit[np.argmin(unit[:, 0])], unit[np.argmin(unit[:, 1])]])
    reach = 3.0 * float(np.max(np.abs(corner))) * float(np.max(args.levels))
    curves = []
    for c in args.levels:
        P = c * unit
        P = P[np.all(P <= reach, axis=1)]
        curves.append(Curve(P, f"{name} = {c:g}", "#1f77b4"))
    marks = []
    if args.input and args.kind == "utility":
        S = load_statistics(args.input)
        Qs = np.array([eval_Q(G, q) for q in S.quantities])
        marks = [Marker(q / v, f"q{t + 1}") for t, (q, v) in enumerate(zip(S.quantities, Qs))
                 if v > 0]
    with open(args.svg, "w") as fh:
        fh.write(render(curves, marks, title=f"level curves of {name}"))
    _emit(args, {"svg": args.svg, "kind": args.kind, "levels": [float(c) for c in args.levels]})
    return OK


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "recover": cmd_recover,
            "eval": cmd_eval, "dual": cmd_dual, "smooth": cmd_smooth,
            "certify": cmd_certify, "plot": cmd_plot}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, StatisticsError, GaugeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
