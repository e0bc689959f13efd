"""Numerical C^1 and strict-convexity certificates for planar convex bodies.

All checks work on boundary points found along the body's frame rays, so
they apply equally to explicit polygons, level sets and parallel bodies.

* ``c1_refinement``: the largest turning of the boundary polyline over three
  consecutive vertices must shrink when the ray spacing is divided by
  ``refine``. At a corner it stays near the exterior angle however fine the
  sampling. A factor of 4 keeps smooth bodies well clear of the limit even
  where the curvature jumps (a factor of 2 leaves them near 0.58).
* ``strict_convexity``: midpoints of random chords (vertices at least two
  apart) must be interior with positive margin.
* ``unique_support``: around the worst-turning samples the rays are
  refined geometrically; the one-sided tangents must converge to each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import ConvexBody2D
from .levelset import interior_margin


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""

    def to_json(self) -> dict:
        d = {"name": self.name, "passed": bool(self.passed),
             "value": _finite(self.value), "limit": _finite(self.limit)}
        if self.detail:
            d["detail"] = self.detail
        return d


def _finite(v):
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass
class SmoothnessReport:
    samples: int
    window: tuple[float, float]
    checks: list[Check] = field(default_factory=list)
    max_turning: float = 0.0
    curvature_bound: float = 0.0

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"samples": self.samples, "window": [float(w) for w in self.window],
                "max_turning": self.max_turning, "curvature_bound": self.curvature_bound,
                "passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def turning_angles(P: np.ndarray, periodic: bool) -> tuple[np.ndarray, np.ndarray]:
    """Signed turning at every interior vertex and the local spacing there."""
    if periodic:
        P = np.vstack([P[-1:], P, P[:1]])
    d = np.diff(P, axis=0)
    ang = np.arctan2(d[:, 1], d[:, 0])
    turn = np.mod(np.diff(ang) + math.pi, 2 * math.pi) - math.pi
    seg = np.linalg.norm(d, axis=1)
    return turn, 0.5 * (seg[:-1] + seg[1:])


def windowed_turning(turn: np.ndarray, periodic: bool) -> np.ndarray:
    a = np.abs(turn)
    if periodic:
        return a + np.roll(a, 1) + np.roll(a, -1)
    if a.size < 3:
        return a
    return np.concatenate([[a[0] + a[1]], a[:-2] + a[1:-1] + a[2:], [a[-2] + a[-1]]])


def _angles(body: ConvexBody2D, n: int, window: Optional[tuple[float, float]]):
    fr = body.frame
    if window is None:
        return fr.angles(n), fr.periodic
    th = np.linspace(window[0], window[1], n)
    return (th if fr.ccw_increasing else th[::-1]), False


def _zoom(body: ConvexBody2D, centers: np.ndarray, width: np.ndarray, levels: int, rays: int,
          tol: float, bounds: Optional[tuple[float, float]] = None) -> np.ndarray:
    """Windowed turning at each zoom level around the given ray angles, shape ``(levels, k)``."""
    out = []
    c, w = centers.astype(float).copy(), width.astype(float).copy()
    k = c.size
    u = np.linspace(-1.0, 1.0, rays)
    for _ in range(levels):
        if bounds is not None:
            # keep every zoom fan inside the sampled angular range
            c = np.clip(c, bounds[0] + w, bounds[1] - w)
        th = c[:, None] + w[:, None] * u[None, :]
        if not body.frame.ccw_increasing:
            th = th[:, ::-1]
        P = body.ray_boundary(th.ravel(), tol).reshape(k, rays, 2)
        W = np.zeros((k, rays - 2))
        j = np.zeros(k, dtype=int)
        for i in range(k):
            turn, _ = turning_angles(P[i], False)
            W[i] = windowed_turning(turn, False)
            # a kink lies within one spacing of the vertex that turns most
            j[i] = int(np.argmax(np.abs(turn))) + 1
        out.append(W.max(axis=1))
        c = np.take_along_axis(th, j[:, None], axis=1)[:, 0]
        w = w / 8.0
    return np.array(out)


def certify_smoothness(body: ConvexBody2D, samples: int = 512, *,
                       window: Optional[tuple[float, float]] = None, chords: int = 1000,
                       seed: int = 0, tol: float = 1e-12, margin_tol: float = 1e-12,
                       refine_ratio: float = 0.6, refine: int = 4, zoom_points: int = 8,
                       zoom_levels: int = 4, zoom_ratio: float = 0.01,
                       turn_floor: float = 1e-9) -> SmoothnessReport:
    """Run the three boundary checks; ``window`` restricts the frame to an angular range."""
    th1, periodic = _angles(body, samples, window)
    th2, _ = _angles(body, refine * samples, window)
    P1 = body.ray_boundary(th1, tol)
    P2 = body.ray_boundary(th2, tol)
    t1, _ = turning_angles(P1, periodic)
    t2, sp2 = turning_angles(P2, periodic)
    W1, W2 = windowed_turning(t1, periodic), windowed_turning(t2, periodic)
    rep = SmoothnessReport(samples, window or (float(body.frame.theta_lo), float(body.frame.theta_hi)))
    rep.max_turning = float(np.abs(t2).max())
    rep.curvature_bound = float(np.max(np.abs(t2) / np.maximum(sp2, 1e-300)))

    ratio = float(W2.max() / W1.max()) if W1.max() > 0 else 0.0
    ok = W2.max() <= turn_floor or ratio <= refine_ratio
    rep.checks.append(Check("c1_refinement", ok, ratio, refine_ratio,
                            f"max 3-vertex turning {W1.max():.3g} -> {W2.max():.3g}"))

    rng = np.random.default_rng(seed)
    m = P2.shape[0]
    i = rng.integers(0, m, chords)
    gap = rng.integers(2, max(3, m - 1), chords)
    j = (i + gap) % m if periodic else np.clip(i + gap, 0, m - 1)
    if not periodic:
        j = np.where(np.abs(j - i) < 2, np.clip(i - gap, 0, m - 1), j)
    mid = 0.5 * (P2[i] + P2[j])
    margins = interior_margin(body, mid)
    worst = float(margins.min())
    # boundary points are only located to within tol, so smaller margins mean nothing
    floor = max(margin_tol, tol)
    rep.checks.append(Check("strict_convexity", worst > floor, worst, floor,
                            f"{int(np.count_nonzero(margins <= floor))} of {chords} chords flat"))

    k = min(zoom_points, W2.size)
    worst_idx = np.argsort(-W2, kind="stable")[:k]
    off = 0 if periodic else 1
    vert = (worst_idx + off) % m
    step = float(np.abs(np.diff(th2[:2]))[0]) if not periodic else 2 * math.pi / m
    base = float(W2.max())
    if base <= turn_floor:
        rep.checks.append(Check("unique_support", True, 0.0, zoom_ratio, "boundary locally straight"))
    else:
        bounds = None if periodic else (float(th2.min()), float(th2.max()))
        Z = _zoom(body, th2[vert], np.full(k, 2.0 * step), zoom_levels, 17, tol, bounds)
        finals = Z[-1] / np.maximum(Z[0], 1e-300)
        zr = float(np.max(np.where(Z[0] <= turn_floor, 0.0, finals)))
        rep.checks.append(Check("unique_support", zr <= zoom_ratio, zr, zoom_ratio,
                                f"turning under zoom {Z[0].max():.3g} -> {Z[-1].max():.3g}"))
    return rep
