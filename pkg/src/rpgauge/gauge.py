"""Polyhedral utility gauge, its superdifferential and the dual price index.

A solution ``lambda`` of the Afriat system gives the utility index

    Q(q) = min_i lambda_i p^i . q

whose scaled prices ``g_i = lambda_i p^i`` are called generators below. The
dual price index

    P(p) = inf_{q >= 0} (q . p) / Q(q)

is the gauge of the blocking polyhedron ``conv{g_i} + R^n_+`` and is
evaluated as a small LP.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import lp
from .consistency import Multipliers
from .statistics import MarketStatistics

SUPERDIFF_RTOL = 1e-9


class GaugeError(ValueError):
    pass


@dataclass(frozen=True)
class PolyhedralGauge:
    """``Q(q) = min_i weights[i] * prices[i] . q``."""

    weights: np.ndarray
    prices: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).ravel()
        p = np.atleast_2d(np.array(self.prices, dtype=float))
        if p.shape[0] != w.size:
            raise GaugeError(f"{w.size} weights for {p.shape[0]} price vectors")
        if np.any(w <= 0):
            raise GaugeError("weights must be positive")
        if np.any(p < 0) or np.any(~p.any(axis=1)):
            raise GaugeError("prices must be nonnegative and nonzero")
        for a in (w, p):
            a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "prices", p)

    @property
    def n(self) -> int:
        return self.prices.shape[1]

    @property
    def generators(self) -> np.ndarray:
        return self.weights[:, None] * self.prices

    @classmethod
    def from_multipliers(cls, S: MarketStatistics, m: Multipliers) -> "PolyhedralGauge":
        if m.kind != "lambda":
            raise GaugeError("the utility gauge is built from lambda multipliers")
        return cls(m.values, S.prices)

    def to_json(self) -> dict:
        return {"lambda": [float(v) for v in self.weights],
                "prices": [[float(v) for v in row] for row in self.prices]}

    @classmethod
    def from_json(cls, doc: dict) -> "PolyhedralGauge":
        try:
            return cls(doc["lambda"], doc["prices"])
        except (KeyError, TypeError) as exc:
            raise GaugeError(f"gauge JSON needs 'lambda' and 'prices': {exc}") from None

    @classmethod
    def load(cls, path: str) -> "PolyhedralGauge":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _values(G: PolyhedralGauge, q) -> np.ndarray:
    return G.generators @ np.asarray(q, dtype=float)


def eval_Q(G: PolyhedralGauge, q) -> float:
    """Utility index ``min_i lambda_i p^i . q``."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise GaugeError("Q is defined on the nonnegative orthant")
    return float(np.min(_values(G, q)))


def eval_Q_many(G: PolyhedralGauge, qs) -> np.ndarray:
    """Vectorized :func:`eval_Q` over the rows of ``qs``."""
    return np.min(np.asarray(qs, dtype=float) @ G.generators.T, axis=1)


@dataclass(frozen=True)
class Superdifferential:
    generators: np.ndarray
    active_set: tuple[int, ...]


def superdifferential(G: PolyhedralGauge, q, tol: float = SUPERDIFF_RTOL) -> Superdifferential:
    """Active scaled prices at ``q``; their convex hull is the superdifferential."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0) or not np.any(q):
        raise GaugeError("superdifferential needs q >= 0, q != 0")
    vals = _values(G, q)
    Qq = vals.min()
    active = tuple(int(i) for i in np.flatnonzero(vals <= Qq * (1 + tol)))
    return Superdifferential(G.generators[list(active)], active)


def eval_P(G: PolyhedralGauge, p) -> float:
    """Dual price index.

    ``P(p) = max { sum(y) : sum_i y_i g_i <= p, y >= 0 }``, i.e. the largest
    ``mu`` with ``p`` in ``mu * conv{g_i} + R^n_+``.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise GaugeError("P is defined on the nonnegative orthant")
    if not np.any(p):
        return 0.0
    g = G.generators
    res = lp.linprog(-np.ones(g.shape[0]), A_ub=g.T, b_ub=p)
    if not res.success:  # pragma: no cover - feasible (y = 0) and bounded by construction
        raise GaugeError(f"dual gauge LP ended {res.status}")
    return -res.fun


def dual_infimum(G: PolyhedralGauge, q) -> float:
    """``inf_{p >= 0} (q . p) / P(p)`` computed as one LP.

    Minimizes ``q . p`` over the characteristic set of ``P``, i.e. over
    ``(p, y)`` with ``sum_i y_i g_i <= p``, ``sum(y) >= 1``, ``p, y >= 0``.
    By gauge duality the value is ``Q(q)``.
    """
    q = np.asarray(q, dtype=float)
    g = G.generators
    k, n = g.shape
    c = np.concatenate([q, np.zeros(k)])
    A_ub = np.vstack([np.hstack([-np.eye(n), g.T]),
                      np.concatenate([np.zeros(n), -np.ones(k)])[None, :]])
    b_ub = np.concatenate([np.zeros(n), [-1.0]])
    res = lp.linprog(c, A_ub=A_ub, b_ub=b_ub)
    if not res.success:  # pragma: no cover
        raise GaugeError(f"dual infimum LP ended {res.status}")
    return res.fun


def ray_boundary_point(G: PolyhedralGauge, q) -> np.ndarray:
    """Intersection of the ray through ``q`` with the boundary of ``chi_Q``."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0):
        raise GaugeError("ray_boundary_point needs a strictly positive q")
    Qq = eval_Q(G, q)
    if Qq <= 0:
        raise GaugeError("degenerate ray: Q(q) = 0")
    return q / Qq


@dataclass(frozen=True)
class CharacteristicSet:
    """Upper level set ``{q >= 0 : g_i . q >= 1 for all i}`` of a polyhedral gauge."""

    normals: np.ndarray

    @classmethod
    def of(cls, G: PolyhedralGauge) -> "CharacteristicSet":
        return cls(G.generators)

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.all(x >= 0, axis=1) & np.all(x @ self.normals.T >= 1.0, axis=1)

    def ray_entry(self, x) -> float:
        """Smallest ``s`` with ``s * x`` in the set, for strictly positive ``x``."""
        x = np.asarray(x, dtype=float)
        return 1.0 / float(np.min(self.normals @ x))


@dataclass
class BlockingReport:
    ok: bool
    checked: int
    max_euler_error: float
    max_dual_error: float
    max_subgradient_violation: float
    failures: list

    def __bool__(self) -> bool:
        return self.ok


def verify_blocking(G: PolyhedralGauge, sample_qs: Iterable, *,
                    probe_ps: Optional[np.ndarray] = None,
                    euler_tol: float = 1e-12, dual_tol: float = 1e-8) -> BlockingReport:
    """Check the blocking-pair relation at unit-level points.

    For each sample ``q`` (rescaled to ``Q(q) = 1``) and each active generator
    ``g``: ``g . q = 1`` (Euler identity), ``P(g) = 1``, and ``q`` is a
    supergradient of ``P`` at ``g``, probed as ``q . (p - g) >= P(p) - 1`` on
    ``probe_ps``.
    """
    failures = []
    e_err = d_err = sub_err = 0.0
    checked = 0
    P_probe = None
    if probe_ps is not None:
        probe_ps = np.atleast_2d(np.asarray(probe_ps, dtype=float))
        P_probe = np.array([eval_P(G, p) for p in probe_ps])
    for q in sample_qs:
        q = np.asarray(q, dtype=float)
        q = q / eval_Q(G, q)
        sd = superdifferential(G, q)
        for i, g in zip(sd.active_set, sd.generators):
            checked += 1
            e = abs(float(g @ q) - 1.0)
            d = abs(eval_P(G, g) - 1.0)
            e_err, d_err = max(e_err, e), max(d_err, d)
            s = 0.0
            if P_probe is not None:
                s = float(np.max(P_probe - 1.0 - (probe_ps - g) @ q))
                sub_err = max(sub_err, s)
            if e > euler_tol or d > dual_tol or s > dual_tol:
                failures.append({"q": q.tolist(), "generator": i,
                                 "euler": e, "dual": d, "subgradient": s})
    return BlockingReport(not failures, checked, e_err, d_err, sub_err, failures)


@dataclass
class RationalizationReport:
    ok: bool
    optima: list
    targets: list
    failures: list

    def __bool__(self) -> bool:
        return self.ok


def verify_rationalization(G: PolyhedralGauge, S: MarketStatistics,
                           rtol: float = 1e-9) -> RationalizationReport:
    """Check ``q^t`` maximizes ``Q`` on the budget set ``{q >= 0 : p^t q <= p^t q^t}``.

    Each budget problem is the LP ``max v  s.t.  v <= g_i . q,  p^t q <= p^t q^t``.
    """
    g = G.generators
    k, n = g.shape
    optima, targets, failures = [], [], []
    for t in range(S.T):
        pt, qt = S.prices[t], S.quantities[t]
        # variables (q_1..q_n, v); v >= 0 loses nothing since q = 0 gives v = 0
        c = np.concatenate([np.zeros(n), [-1.0]])
        A_ub = np.vstack([np.hstack([-g, np.ones((k, 1))]),
                          np.concatenate([pt, [0.0]])[None, :]])
        b_ub = np.concatenate([np.zeros(k), [float(pt @ qt)]])
        res = lp.linprog(c, A_ub=A_ub, b_ub=b_ub)
        opt = -res.fun
        target = eval_Q(G, qt)
        optima.append(opt)
        targets.append(target)
        if opt > target * (1 + rtol) + rtol:
            failures.append({"t": t, "optimum": opt, "Q(q^t)": target,
                             "maximizer": res.x[:n].tolist()})
    return RationalizationReport(not failures, optima, targets, failures)
