"""Caps, quasi-indicators and the mollified quasi-indicator ``f = q-ind_K * h``.

With ``D(z) = dist(z, K)`` the convolution is

    f(x) = 1 - integral D(z) h(|x - z|) dz,

so only the part of the cap disc outside ``K`` contributes. That part is cut
along the normal fan of the boundary, and each cell is integrated by tensor
Gauss-Legendre quadrature in its own (polar or strip) coordinates. The
outer variable is split wherever the inner limits change formula, so every
panel has a smooth integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import exp1

from .geometry import TWO_PI, PiecewiseBody, Polygon2D

MIN_ORDER = 8
DEFAULT_ORDER = 64
# near-boundary points per batch, bounds the size of the node arrays
_CHUNK = 256


class QuadratureConfigError(ValueError):
    pass


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class QuadratureConfig:
    """Gauss-Legendre orders for the angular and radial directions."""

    angular: int = DEFAULT_ORDER
    radial: int = DEFAULT_ORDER

    def __post_init__(self) -> None:
        for name in ("angular", "radial"):
            v = getattr(self, name)
            if int(v) != v or v < MIN_ORDER:
                raise QuadratureConfigError(
                    f"{name} quadrature order {v} is below the minimum {MIN_ORDER}")

    def halved(self) -> "QuadratureConfig":
        return QuadratureConfig(max(MIN_ORDER, self.angular // 2),
                                max(MIN_ORDER, self.radial // 2))


@dataclass(frozen=True)
class CapFunction:
    """Radial bump ``h(x) = c * profile(|x| / eps)`` supported in ``B(0, eps)``.

    ``k = inf`` gives ``exp(-1 / (1 - u^2))``; a finite ``k`` gives the
    ``C^k`` bump ``(1 - u^2)^(k+1)``.
    """

    eps: float
    k: float = math.inf
    normalization: float = 0.0

    def profile(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        inside = u < 1.0
        s = np.where(inside, 1.0 - u * u, 1.0)
        if math.isinf(self.k):
            v = np.exp(-1.0 / s)
        else:
            v = s ** (self.k + 1)
        return np.where(inside, v, 0.0)

    def radial(self, r) -> np.ndarray:
        """``h`` as a function of the radius."""
        return self.normalization * self.profile(np.asarray(r, dtype=float) / self.eps)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.radial(np.hypot(x[..., 0], x[..., 1]))

    def to_json(self) -> dict:
        return {"eps": self.eps, "k": None if math.isinf(self.k) else self.k,
                "normalization": self.normalization}


def cap(eps: float, k: float = math.inf) -> CapFunction:
    """Unit-mass cap of support radius ``eps`` and smoothness ``k``."""
    if not eps > 0:
        raise ValueError("cap radius must be positive")
    if math.isinf(k):
        # 2 pi eps^2 int_0^1 u exp(-1/(1-u^2)) du = pi eps^2 (e^-1 - E1(1))
        mass = math.pi * eps * eps * (math.exp(-1.0) - float(exp1(1.0)))
    else:
        if k < 0 or int(k) != k:
            raise ValueError("finite cap order must be a nonnegative integer")
        mass = math.pi * eps * eps / (k + 2.0)
    return CapFunction(float(eps), float(k), 1.0 / mass)


def quasi_indicator(K: PiecewiseBody, x) -> np.ndarray:
    """``min(1, 1 - dist(x, K))``: 1 on ``K``, decaying with unit slope outside."""
    return 1.0 - K.distance(np.asarray(x, dtype=float))


def _wrap(a: np.ndarray) -> np.ndarray:
    return np.mod(a + math.pi, TWO_PI) - math.pi


def _panels(edges: list[np.ndarray], n: int):
    """GL nodes/weights on consecutive sub-intervals; ``edges`` are ``(N,)`` arrays."""
    u, w = gauss_legendre(n)
    nodes, wts = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        width = np.maximum(b - a, 0.0)
        nodes.append(a[:, None] + width[:, None] * u)
        wts.append(width[:, None] * w)
    return np.concatenate(nodes, axis=1), np.concatenate(wts, axis=1)


def _inner(lo, hi, n: int):
    v, w = gauss_legendre(n)
    span = np.maximum(hi - lo, 0.0)
    return lo[..., None] + span[..., None] * v, span[..., None] * w


def _clipped(edges: list[np.ndarray]) -> list[np.ndarray]:
    a, b = edges[0], np.maximum(edges[-1], edges[0])
    return [a] + [np.clip(e, a, b) for e in edges[1:-1]] + [b]


def _active(wt: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Flat (row, node) pairs whose outer weight and inner range are both nonzero."""
    mask = (wt > 0.0) & (hi > lo)
    rows = np.nonzero(mask)[0]
    return mask, rows


def _accumulate(n: int, rows: np.ndarray, vals: np.ndarray) -> np.ndarray:
    return np.bincount(rows, weights=vals, minlength=n)


def _line_region(p, h: CapFunction, x: np.ndarray, cfg) -> np.ndarray:
    """Contribution of the strip of points whose nearest boundary point lies on line ``p``."""
    eps = h.eps
    rel = x - p.origin
    tx = rel @ p.direction
    sx = rel @ p.normal
    w = np.sqrt(np.maximum(eps * eps - sx * sx, 0.0))
    A = np.maximum(p.t0, tx - eps)
    B = np.minimum(p.t1, tx + eps)
    t, wt = _panels(_clipped([A, tx - w, tx + w, B]), cfg.angular)
    dt = t - tx[:, None]
    sq = np.sqrt(np.maximum(eps * eps - dt * dt, 0.0))
    lo = np.maximum(0.0, sx[:, None] - sq)
    hi = np.maximum(lo, sx[:, None] + sq)
    mask, rows = _active(wt, lo, hi)
    s, ws = _inner(lo[mask], hi[mask], cfg.radial)
    dist = np.sqrt(dt[mask][:, None] ** 2 + (s - sx[rows][:, None]) ** 2)
    vals = np.einsum("mk,mk->m", s * h.radial(dist), ws) * wt[mask]
    return _accumulate(x.shape[0], rows, vals)


def _angular_windows(rel0: np.ndarray, width, half: np.ndarray):
    """Intersections of the cyclic interval ``[rel0, rel0 + width]`` with ``[-half, half]``."""
    out = []
    for shift in (0.0, -TWO_PI):
        lo = np.maximum(rel0 + shift, -half)
        hi = np.minimum(rel0 + shift + width, half)
        out.append((lo, np.maximum(hi, lo)))
    return out


def _polar(h: CapFunction, dx: np.ndarray, ang: np.ndarray, wa: np.ndarray, inner_min, cfg, weight):
    """Polar integral around a centre at distance ``dx`` from the point.

    ``ang`` are directions relative to the point's direction, the radial
    range is the part of the cap disc beyond ``inner_min``, and ``weight(s)``
    is the integrand factor besides the cap.
    """
    b = dx[:, None] * np.cos(ang)
    disc = b * b - (dx * dx - h.eps * h.eps)[:, None]
    sq = np.sqrt(np.maximum(disc, 0.0))
    lo = np.maximum(inner_min, b - sq)
    hi = np.where(disc > 0, np.maximum(lo, b + sq), lo)
    mask, rows = _active(wa, lo, hi)
    s, ws = _inner(lo[mask], hi[mask], cfg.radial)
    bm = b[mask][:, None]
    d2 = s * s - 2.0 * s * bm + (dx * dx)[rows][:, None]
    dist = np.sqrt(np.maximum(d2, 0.0))
    vals = np.einsum("mk,mk->m", weight(s) * h.radial(dist), ws) * wa[mask]
    return _accumulate(dx.size, rows, vals)



def _arc_region(p, h: CapFunction, x: np.ndarray, cfg) -> np.ndarray:
    """Contribution of the annular sector outside arc ``p``."""
    eps, R = h.eps, p.radius
    w = x - p.center
    dx = np.hypot(w[:, 0], w[:, 1])
    phx = np.arctan2(w[:, 1], w[:, 0])
    half = np.where(dx > eps, np.arcsin(np.minimum(eps / np.maximum(dx, eps), 1.0)), math.pi)
    # angle where the lower end of the radial range switches from R to the disc
    cs = (R * R + dx * dx - eps * eps) / (2.0 * R * np.maximum(dx, 1e-300))
    psi = np.where(np.abs(cs) <= 1.0, np.arccos(np.clip(cs, -1.0, 1.0)), 0.0)
    rel0 = _wrap(p.a0 - phx)
    parts = [_panels(_clipped([lo_a, -psi, psi, hi_a]), cfg.angular)
             for lo_a, hi_a in _angular_windows(rel0, p.span, half)]
    ang = np.concatenate([a for a, _ in parts], axis=1)
    wa = np.concatenate([b for _, b in parts], axis=1)
    return _polar(h, dx, ang, wa, R, cfg, lambda s: (s - R) * s)


def _wedge_region(vertex, n1, n2, h: CapFunction, x: np.ndarray, cfg) -> np.ndarray:
    """Contribution of the normal cone at a boundary corner."""
    eps = h.eps
    a1 = math.atan2(n1[1], n1[0])
    width = (math.atan2(n2[1], n2[0]) - a1) % TWO_PI
    w = x - vertex
    dv = np.hypot(w[:, 0], w[:, 1])
    phx = np.arctan2(w[:, 1], w[:, 0])
    half = np.where(dv > eps, np.arcsin(np.minimum(eps / np.maximum(dv, eps), 1.0)), math.pi)
    rel0 = _wrap(a1 - phx)
    parts = [_panels([lo_a, hi_a], cfg.angular) for lo_a, hi_a in _angular_windows(rel0, width, half)]
    ang = np.concatenate([a for a, _ in parts], axis=1)
    wa = np.concatenate([b for _, b in parts], axis=1)
    return _polar(h, dv, ang, wa, 0.0, cfg, lambda r: r * r)


def _ray_distance(x: np.ndarray, apex, direction) -> np.ndarray:
    w = x - apex
    t = np.maximum(w @ direction, 0.0)
    return np.hypot(w[:, 0] - t * direction[0], w[:, 1] - t * direction[1])


def _touches_line(p, x, eps) -> np.ndarray:
    rel = x - p.origin
    tx = rel @ p.direction
    return (rel @ p.normal > -eps) & (tx + eps > p.t0) & (tx - eps < p.t1)


def _touches_arc(p, x, eps) -> np.ndarray:
    w = x - p.center
    ok = np.hypot(w[:, 0], w[:, 1]) + eps > p.radius
    if p.full:
        return ok
    # the sector between the end normals, widened by eps
    rel = np.mod(np.arctan2(w[:, 1], w[:, 0]) - p.a0, TWO_PI)
    inside = rel <= p.span
    near = np.minimum(_ray_distance(x, p.center, p.normal_at_start()),
                      _ray_distance(x, p.center, p.normal_at_end())) < eps
    return ok & (inside | near)


def _touches_wedge(vertex, n1, n2, x, eps) -> np.ndarray:
    w = x - vertex
    a1 = math.atan2(n1[1], n1[0])
    width = (math.atan2(n2[1], n2[0]) - a1) % TWO_PI
    inside = np.mod(np.arctan2(w[:, 1], w[:, 0]) - a1, TWO_PI) <= width
    near = np.minimum(_ray_distance(x, vertex, n1), _ray_distance(x, vertex, n2)) < eps
    return inside | near


def _deficit(K: PiecewiseBody, h: CapFunction, x: np.ndarray, cfg) -> np.ndarray:
    """``1 - f(x)``: the integral of ``dist(z, K) h(|x - z|)`` over the complement of ``K``.

    The complement is split into the normal fan of the boundary (strips over
    line pieces, annular sectors over arcs, wedges at corners); in each
    region the distance is smooth in the region's own coordinates. Regions
    the cap disc cannot reach are skipped.
    """
    eps = h.eps
    total = np.zeros(x.shape[0])
    for p in K.pieces:
        if p.kind == "line":
            sel = np.flatnonzero(_touches_line(p, x, eps))
            if sel.size:
                total[sel] += _line_region(p, h, x[sel], cfg)
        else:
            sel = np.flatnonzero(_touches_arc(p, x, eps))
            if sel.size:
                total[sel] += _arc_region(p, h, x[sel], cfg)
    for vertex, n1, n2 in K.junctions():
        sel = np.flatnonzero(_touches_wedge(vertex, n1, n2, x, eps))
        if sel.size:
            total[sel] += _wedge_region(vertex, n1, n2, h, x[sel], cfg)
    return total


def convolve(K: PiecewiseBody, h: CapFunction, x, config: QuadratureConfig | None = None):
    """``f(x) = integral q-ind_K(x - c) h(c) dc``; accepts one point or an array of points."""
    if not isinstance(K, PiecewiseBody):
        raise TypeError("convolution needs a body with an explicit boundary")
    cfg = config or QuadratureConfig()
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x).reshape(-1, 2)
    out = np.ones(X.shape[0])
    # the cap disc of a point this deep inside never leaves K
    idx = np.flatnonzero(K.signed_distance(X) > -h.eps)
    for c in range(0, idx.size, _CHUNK):
        sel = idx[c:c + _CHUNK]
        out[sel] = 1.0 - _deficit(K, h, X[sel], cfg)
    out = out.reshape(x.shape[:-1]) if not single else out[0]
    return float(out) if single else out


def alpha_constant(h: CapFunction, direction=(1.0, 0.0),
                   config: QuadratureConfig | None = None) -> float:
    """Mollified quasi-indicator of a halfplane, evaluated on its boundary line."""
    H = Polygon2D.halfplane(direction)
    return convolve(H, h, np.zeros(2), config)
