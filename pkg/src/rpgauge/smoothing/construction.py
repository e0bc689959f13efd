"""Spherical-facet smoothing of a polyhedral characteristic set in the plane.

Steps: the facet points ``s_i`` where the observed bundles' rays meet the
boundary of ``chi_Q``; equal balls ``B_i`` tangent to the facets at ``s_i``;
the body ``hat_chi = (cap_i B_i  cap  chi_Q) + R^2_+``; a radius ``eps`` on
which ``hat_chi`` coincides with ``B_i`` near every ``s_i``; and finally
the level set of the mollified quasi-indicator of ``hat_chi`` at the common
ball value ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..gauge import SUPERDIFF_RTOL, PolyhedralGauge
from ..statistics import MarketStatistics
from .geometry import TWO_PI, ArcPiece, Disc, LinePiece, Polygon2D, RayFrame, UpwardHull
from .levelset import LevelSetBody
from .mollifier import CapFunction, QuadratureConfig, convolve


class SmoothingError(ValueError):
    pass


class StrictnessError(SmoothingError):
    pass


class ResolutionError(SmoothingError):
    pass


def _require_planar(G: PolyhedralGauge) -> None:
    if G.n != 2:
        raise SmoothingError(f"smoothing is implemented for n = 2 goods, got n = {G.n}")


def characteristic_polygon(G: PolyhedralGauge) -> Polygon2D:
    """``chi_Q = {x >= 0 : g_i . x >= 1}`` as an explicit unbounded polygon."""
    _require_planar(G)
    g = G.generators
    A = np.vstack([-g, [[-1.0, 0.0], [0.0, -1.0]]])
    b = np.concatenate([-np.ones(len(g)), [0.0, 0.0]])
    return Polygon2D(A, b, description="chi_Q")


@dataclass(frozen=True)
class FacetPoints:
    points: np.ndarray      # (T, 2), s_i = q^i / Q(q^i)
    facets: tuple[int, ...]  # index of the unique active generator at q^i


def facet_points(G: PolyhedralGauge, S: MarketStatistics, rtol: float = SUPERDIFF_RTOL) -> FacetPoints:
    """Intersections of the rays through the bundles with the boundary of ``chi_Q``."""
    g = G.generators
    pts, facets = [], []
    for t, q in enumerate(S.quantities):
        vals = g @ q
        order = np.argsort(vals, kind="stable")
        qmin = vals[order[0]]
        if qmin <= 0:
            raise SmoothingError(f"Q(q^{t + 1}) = 0: the ray misses the characteristic set")
        if len(vals) > 1 and vals[order[1]] <= qmin * (1 + rtol):
            raise StrictnessError(
                f"strictness violated: the minimum at q^{t + 1} is attained by generators "
                f"{int(order[0]) + 1} and {int(order[1]) + 1}")
        pts.append(q / qmin)
        facets.append(int(order[0]))
    if len(set(facets)) != len(facets):
        raise StrictnessError("strictness violated: two bundles share a facet")
    P = np.array(pts)
    P.setflags(write=False)
    return FacetPoints(P, tuple(facets))


@dataclass(frozen=True)
class BallSystem:
    rho: float
    centers: np.ndarray      # (T, 2)
    directions: np.ndarray   # unit inward normals of the facets at s_i
    doublings: int

    def discs(self) -> list[Disc]:
        return [Disc(c, self.rho, description=f"B_{i + 1}") for i, c in enumerate(self.centers)]


def _ray_distance_max(c: np.ndarray, grid: np.ndarray) -> float:
    """Largest distance from ``c`` to the rays ``{t e : t >= 0}`` over unit vectors ``grid``."""
    along = grid @ c
    perp = np.abs(grid[:, 0] * c[1] - grid[:, 1] * c[0])
    d = np.where(along >= 0, perp, np.linalg.norm(c))
    return float(d.max())


def rho_conditions(s: np.ndarray, directions: np.ndarray, rho: float, grid_size: int = 2049):
    """Margins of the two ball conditions (both must be positive or zero for (a), positive for (b)).

    (a) every nonnegative ray meets every ball: ``rho - max_ray dist(center, ray)``;
    (b) every other facet point lies inside the ball: ``rho - |s_j - center_i|``.
    """
    th = np.linspace(0.0, 0.5 * math.pi, grid_size)
    grid = np.stack([np.cos(th), np.sin(th)], axis=1)
    centers = s + rho * directions
    a = min(rho - _ray_distance_max(c, grid) for c in centers)
    b = math.inf
    for i, c in enumerate(centers):
        for j in range(len(s)):
            if j != i:
                b = min(b, rho - float(np.linalg.norm(s[j] - c)))
    return a, b


def choose_rho(G: PolyhedralGauge, fp: FacetPoints, grid_size: int = 2049,
               max_doublings: int = 200) -> BallSystem:
    """Smallest ``rho_0 2^m`` for which both ball conditions hold."""
    s = fp.points
    g = G.generators[list(fp.facets)]
    u = g / np.linalg.norm(g, axis=1)[:, None]
    if len(s) > 1:
        rho0 = max(float(np.linalg.norm(a - b)) for a in s for b in s)
    else:
        rho0 = float(np.linalg.norm(s[0]))
    rho = rho0
    for m in range(max_doublings):
        a, b = rho_conditions(s, u, rho, grid_size)
        if a >= 0 and b > 0:
            return BallSystem(rho, s + rho * u, u, m)
        rho *= 2.0
    raise SmoothingError("no admissible ball radius found")  # pragma: no cover


# -- hat chi ------------------------------------------------------------------

@dataclass(frozen=True)
class _Ball:
    center: np.ndarray
    radius: float

    def exit(self, o, e):
        w = o - self.center
        b = e @ w
        cc = w @ w - self.radius ** 2
        return -b + np.sqrt(np.maximum(b * b - cc, 0.0))

    def contains(self, z, tol):
        return np.linalg.norm(z - self.center) <= self.radius + tol


@dataclass(frozen=True)
class _Half:
    a: np.ndarray  # unit outward normal,  a . z <= b
    b: float

    def exit(self, o, e):
        den = e @ self.a
        with np.errstate(divide="ignore"):
            return np.where(den > 1e-15, (self.b - self.a @ o) / np.where(den > 1e-15, den, 1.0), np.inf)

    def contains(self, z, tol):
        return self.a @ z <= self.b + tol


def _intersections(c1, c2) -> list[np.ndarray]:
    if isinstance(c1, _Half) and isinstance(c2, _Half):
        M = np.vstack([c1.a, c2.a])
        if abs(np.linalg.det(M)) < 1e-14:
            return []
        return [np.linalg.solve(M, np.array([c1.b, c2.b]))]
    if isinstance(c1, _Ball) and isinstance(c2, _Half):
        c1, c2 = c2, c1
    if isinstance(c1, _Half):
        a, b, c, R = c1.a, c1.b, c2.center, c2.radius
        foot = c + (b - a @ c) * a
        h2 = R * R - (b - a @ c) ** 2
        if h2 < 0:
            return []
        d = np.array([-a[1], a[0]])
        hh = math.sqrt(h2)
        return [foot - hh * d, foot + hh * d]
    d = c2.center - c1.center
    L = float(np.linalg.norm(d))
    if L == 0:
        return []
    x = (L * L + c1.radius ** 2 - c2.radius ** 2) / (2 * L)
    h2 = c1.radius ** 2 - x * x
    if h2 < 0:
        return []
    e = d / L
    n = np.array([-e[1], e[0]])
    base = c1.center + x * e
    hh = math.sqrt(h2)
    return [base - hh * n, base + hh * n]


def _boundary_pieces(constraints, o: np.ndarray, scale: float):
    """CCW boundary pieces of the intersection of ``constraints`` (``o`` strictly inside)."""
    tol = 1e-10 * scale
    pts = []
    for i in range(len(constraints)):
        for j in range(i + 1, len(constraints)):
            for z in _intersections(constraints[i], constraints[j]):
                if all(c.contains(z, tol) for c in constraints):
                    pts.append(z)
    if not pts:
        # a single ball lies inside every other constraint
        e = np.array([[1.0, 0.0]])
        c = constraints[int(np.argmin([c.exit(o, e)[0] for c in constraints]))]
        if not isinstance(c, _Ball):  # pragma: no cover
            raise SmoothingError("unbounded intersection")
        return [ArcPiece(c.center, c.radius, 0.0, TWO_PI)]
    ang = np.array([math.atan2(*(z - o)[::-1]) for z in pts]) % TWO_PI
    order = np.argsort(ang)
    ang, pts = ang[order], [pts[i] for i in order]
    keep = [0]
    for k in range(1, len(pts)):
        if ang[k] - ang[keep[-1]] > 1e-13:
            keep.append(k)
    if len(keep) > 1 and ang[keep[0]] + TWO_PI - ang[keep[-1]] <= 1e-13:
        keep.pop()
    ang, pts = ang[keep], [pts[k] for k in keep]
    m = len(pts)
    active = []
    for k in range(m):
        a0, a1 = ang[k], ang[(k + 1) % m] + (TWO_PI if k == m - 1 else 0.0)
        mid = 0.5 * (a0 + a1)
        e = np.array([[math.cos(mid), math.sin(mid)]])
        active.append(int(np.argmin([c.exit(o, e)[0] for c in constraints])))
    # merge neighbouring intervals with the same active constraint
    starts = [k for k in range(m) if active[k] != active[k - 1]] or [0]
    pieces = []
    for idx, k in enumerate(starts):
        nxt = starts[(idx + 1) % len(starts)]
        P0, P1 = pts[k], pts[nxt]
        c = constraints[active[k]]
        if isinstance(c, _Ball):
            a0 = math.atan2(*(P0 - c.center)[::-1])
            span = (math.atan2(*(P1 - c.center)[::-1]) - a0) % TWO_PI
            if len(starts) == 1 and span < 1e-12:
                span = TWO_PI
            pieces.append(ArcPiece(c.center, c.radius, a0, a0 + span))
        else:
            d = np.array([-c.a[1], c.a[0]])
            pieces.append(LinePiece(P0, d, 0.0, float((P1 - P0) @ d)))
    return pieces


_SW_LO, _SW_HI = math.pi, 1.5 * math.pi


def _southwest_chain(pieces) -> list:
    """Sub-pieces whose outward normals point strictly into the third quadrant, in CCW order."""
    out = []
    tol = 1e-12
    for p in pieces:
        if p.kind == "line":
            a = math.atan2(p.normal[1], p.normal[0]) % TWO_PI
            if _SW_LO + tol < a < _SW_HI - tol:
                out.append((a, p))
            continue
        a0 = p.a0 % TWO_PI
        a1 = a0 + p.span
        for shift in (0.0, TWO_PI):
            lo, hi = max(a0, _SW_LO + shift), min(a1, _SW_HI + shift)
            if hi - lo > 1e-14:
                out.append((lo - shift, ArcPiece(p.center, p.radius, lo, hi)))
    out.sort(key=lambda x: x[0])
    return [p for _, p in out]


def build_hat_chi(G: PolyhedralGauge, fp: FacetPoints, balls: BallSystem) -> UpwardHull:
    """``(cap_i B_i  cap  chi_Q) + R^2_+`` with an exact arc/segment boundary."""
    _require_planar(G)
    g = G.generators
    constraints = [_Ball(c, balls.rho) for c in balls.centers]
    for gi in g:
        nrm = float(np.linalg.norm(gi))
        constraints.append(_Half(-gi / nrm, -1.0 / nrm))
    constraints += [_Half(np.array([-1.0, 0.0]), 0.0), _Half(np.array([0.0, -1.0]), 0.0)]
    s0, u0 = fp.points[0], balls.directions[0]
    delta = 0.5 * balls.rho
    for _ in range(200):
        o = s0 + delta * u0
        if all(c.contains(o, -1e-9 * delta) for c in constraints):
            break
        delta *= 0.5
    else:  # pragma: no cover
        raise SmoothingError("empty ball intersection")
    scale = max(1.0, balls.rho)
    chain = _southwest_chain(_boundary_pieces(constraints, o, scale))
    if not chain:  # pragma: no cover
        raise SmoothingError("empty southwest frontier")
    for a, b in zip(chain[:-1], chain[1:]):
        if np.linalg.norm(a.end - b.start) > 1e-8 * scale:  # pragma: no cover
            raise SmoothingError("frontier pieces do not join")
    return UpwardHull(chain, description="hat_chi")


# -- eps-round radius ---------------------------------------------------------

def _round_samples(s, center, rho, eps, count, rng):
    half = count // 2
    r = eps * np.sqrt(rng.random(half))
    th = TWO_PI * rng.random(half)
    uniform = s + np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    phi0 = math.atan2(*(s - center)[::-1])
    m = count - half
    phi = phi0 + (eps / rho) * rng.uniform(-1.0, 1.0, m)
    off = rng.choice([-1.0, 1.0], m) * rng.uniform(0.01, 1.0, m) * eps * eps / (2 * rho)
    rad = rho + off
    hug = center + rad[:, None] * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    hug = hug[np.linalg.norm(hug - s, axis=1) <= eps]
    return np.vstack([uniform, hug])


def eps_round_violations(body, s, center, rho, eps, count=1000, seed=0) -> int:
    """Sampled points of ``B(s, eps)`` where ``body`` and ``B(center, rho)`` disagree."""
    rng = np.random.default_rng(seed)
    X = _round_samples(np.asarray(s, float), np.asarray(center, float), rho, eps, count, rng)
    in_ball = np.linalg.norm(X - center, axis=1) <= rho
    return int(np.count_nonzero(in_ball != body.contains(X)))


def choose_epsilon_round(hat_chi, fp: FacetPoints, balls: BallSystem, resolution: float,
                         count: int = 1000, seed: int = 0) -> float:
    """Largest ``eps`` in the halving sequence for which every ``s_i`` is ``eps``-round."""
    s = fp.points
    if len(s) > 1:
        eps = min(float(np.linalg.norm(a - b)) for i, a in enumerate(s) for b in s[i + 1:]) / 4
    else:
        eps = float(np.linalg.norm(s[0])) / 4
    floor = 10.0 * resolution
    while eps >= floor:
        if all(eps_round_violations(hat_chi, s[i], balls.centers[i], balls.rho, eps, count,
                                    seed + i) == 0 for i in range(len(s))):
            return eps
        eps *= 0.5
    raise ResolutionError(
        f"no eps-round radius down to {floor:g}; refine the resolution (h_b = {resolution:g})")


def beta_values(balls: BallSystem, h: CapFunction, fp: FacetPoints,
                config: QuadratureConfig | None = None) -> np.ndarray:
    return np.array([convolve(D, h, s, config) for D, s in zip(balls.discs(), fp.points)])


def beta_constant(balls: BallSystem, h: CapFunction, fp: FacetPoints,
                  config: QuadratureConfig | None = None, tol: float = 1e-8) -> float:
    """Common value of the mollified ball quasi-indicators at their facet points."""
    b = beta_values(balls, h, fp, config)
    if b.max() - b.min() > tol:
        raise SmoothingError(f"beta spread {b.max() - b.min():.3g} exceeds {tol:g}")
    return float(b.mean())


def smoothed_body(hat_chi: UpwardHull, h: CapFunction, beta: float,
                  config: QuadratureConfig | None = None) -> LevelSetBody:
    """``{x : (q-ind_hat_chi * h)(x) >= beta}``."""
    return LevelSetBody(hat_chi, h, beta, config)


def display_frame(fp: FacetPoints, hat_chi: UpwardHull, pad: float = 1.0) -> RayFrame:
    """Origin-centred rays covering the curved frontier plus flat tails of relative length ``pad``."""
    top, bottom = hat_chi.top, hat_chi.bottom
    ext = pad * float(np.linalg.norm(top - bottom) + np.linalg.norm(fp.points, axis=1).max())
    # aim slightly off the tails so no ray runs along an axis
    off = 0.05 * ext
    edge = 1e-3
    hi = min(math.atan2(top[1] + ext, top[0] + off), 0.5 * math.pi - edge)
    lo = max(math.atan2(bottom[1] + off, bottom[0] + ext), edge)
    return RayFrame(np.zeros(2), lo, hi, False, hat_chi.frame.t_scale, periodic=False,
                    ccw_increasing=False)


def convexity_window(fp: FacetPoints, eps_round: float) -> tuple[float, float]:
    """Angular window around the facet points where the smoothed body must be strictly convex."""
    ang = np.arctan2(fp.points[:, 1], fp.points[:, 0])
    pad = 0.5 * eps_round / np.linalg.norm(fp.points, axis=1)
    return float(np.min(ang - pad)), float(np.max(ang + pad))


__all__ = [
    "BallSystem", "FacetPoints", "ResolutionError", "SmoothingError", "StrictnessError",
    "beta_constant", "beta_values", "build_hat_chi", "characteristic_polygon",
    "choose_epsilon_round", "choose_rho", "convexity_window", "display_frame",
    "eps_round_violations", "facet_points", "rho_conditions", "smoothed_body",
]
