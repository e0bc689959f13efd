"""Bodies defined implicitly: level sets of mollified quasi-indicators and outer parallel bodies."""

from __future__ import annotations

import numpy as np

from .geometry import ConvexBody2D, PiecewiseBody, RayFrame, upward_frame
from .mollifier import CapFunction, QuadratureConfig, convolve


class EmptyLevelSetError(ValueError):
    pass


def interior_margin(body: ConvexBody2D, z) -> np.ndarray:
    """Signed depth proxy: positive inside, zero on the boundary, negative outside."""
    z = np.asarray(z, dtype=float)
    if hasattr(body, "margin"):
        return body.margin(z)
    if isinstance(body, PiecewiseBody):
        return -body.signed_distance(z)
    raise TypeError(f"no interior margin for {type(body).__name__}")


def find_crossings(g, lo: np.ndarray, hi: np.ndarray, tol: float,
                   max_iter: int = 80, ftol: float = 1e-15) -> np.ndarray:
    """Vectorized Illinois root finder; ``g(t, idx) >= 0`` at ``lo`` and ``< 0`` at ``hi``."""
    lo, hi = lo.astype(float).copy(), hi.astype(float).copy()
    all_idx = np.arange(lo.size)
    glo, ghi = g(lo, all_idx), g(hi, all_idx)
    if np.any(glo < 0) or np.any(ghi >= 0):
        raise ValueError("root finder called with an invalid bracket")
    t = 0.5 * (lo + hi)
    side = np.zeros(lo.size, dtype=int)
    active = np.ones(lo.size, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        a, b, ga, gb = lo[idx], hi[idx], glo[idx], ghi[idx]
        cand = (a * gb - b * ga) / (gb - ga)
        bad = ~((cand > a) & (cand < b))
        cand = np.where(bad, 0.5 * (a + b), cand)
        gc = g(cand, idx)
        prev = t[idx]
        t[idx] = cand
        up = gc >= 0
        s = side[idx]
        lo[idx] = np.where(up, cand, a)
        glo[idx] = np.where(up, gc, np.where(s == -1, 0.5 * ga, ga))
        hi[idx] = np.where(up, b, cand)
        ghi[idx] = np.where(up, np.where(s == 1, 0.5 * gb, gb), gc)
        side[idx] = np.where(up, 1, -1)
        done = ((hi[idx] - lo[idx]) <= tol) | (np.abs(gc) <= ftol) | (np.abs(cand - prev) <= 0.1 * tol)
        active[idx[done]] = False
    return t


class LevelSetBody(ConvexBody2D):
    """``{x : f(x) >= threshold}`` with ``f`` the mollified quasi-indicator of ``K``."""

    def __init__(self, K: PiecewiseBody, h: CapFunction, threshold: float,
                 config: QuadratureConfig | None = None, frame: RayFrame | None = None):
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        self.K, self.h, self.threshold = K, h, float(threshold)
        self.config = config or QuadratureConfig()
        self.frame = frame or K.frame
        self.description = f"levelset({K.description}, {self.threshold!r})"
        near = self.field(self.frame.anchor) >= self.threshold
        if near != self.frame.inside_near:
            if self.frame.inside_near:
                raise EmptyLevelSetError(
                    "level set misses the frame anchor; it is empty or too thin for this cap")
            raise ValueError("frame anchor unexpectedly lies inside the level set")

    def field(self, x) -> np.ndarray:
        return convolve(self.K, self.h, x, self.config)

    def contains(self, z) -> np.ndarray:
        return np.asarray(self.field(z)) >= self.threshold

    def margin(self, z) -> np.ndarray:
        return np.asarray(self.field(z)) - self.threshold

    def ray_boundary(self, angles, tol: float = 1e-12) -> np.ndarray:
        fr = self.frame
        angles = np.asarray(angles, dtype=float)
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        t_K = np.linalg.norm(self.K.ray_boundary(angles, tol=1e-13) - fr.anchor, axis=1)
        sign = 1.0 if fr.inside_near else -1.0

        def g(t, idx):
            return sign * (self.field(fr.anchor + t[:, None] * dirs[idx]) - self.threshold)

        idx = np.arange(angles.size)
        delta = np.full(angles.size, self.h.eps + (1.0 - self.threshold))
        lo = np.maximum(t_K - delta, 0.0)
        hi = t_K + delta
        for _ in range(60):
            glo, ghi = g(lo, idx), g(hi, idx)
            bad_lo, bad_hi = glo < 0, ghi >= 0
            if not (bad_lo.any() or bad_hi.any()):
                break
            delta = 2.0 * delta
            lo = np.where(bad_lo, np.maximum(t_K - delta, 0.0), lo)
            hi = np.where(bad_hi, t_K + delta, hi)
            if np.any(bad_lo & (lo == 0.0) & (g(lo, idx) < 0)):
                raise EmptyLevelSetError("level set does not cross some frame ray")
        else:  # pragma: no cover
            raise RuntimeError("could not bracket the level set")
        t = find_crossings(g, lo, hi, tol)
        return fr.anchor + t[:, None] * dirs


class OuterParallelBody(ConvexBody2D):
    """``K + eps B`` (Minkowski sum with a disc), optionally intersected with the orthant."""

    def __init__(self, K: PiecewiseBody, eps: float, clip_orthant: bool = False):
        if not eps > 0:
            raise ValueError("parallel distance must be positive")
        self.K, self.eps, self.clip = K, float(eps), clip_orthant
        fr = K.frame
        if fr.inside_near:
            self.frame = RayFrame(fr.anchor, fr.theta_lo, fr.theta_hi, True,
                                  fr.t_scale + eps, fr.periodic, fr.ccw_increasing)
        else:
            if not clip_orthant:
                raise ValueError("an upward-closed body needs clip_orthant=True")
            self.frame = upward_frame(t_scale=fr.t_scale)
            if self.contains(self.frame.anchor):
                raise ValueError("the parallel body reaches the origin")
        self.description = f"parallel({K.description}, {self.eps!r})"

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        ok = self.K.distance(z) <= self.eps
        if self.clip:
            ok &= np.all(z >= 0, axis=-1)
        return ok

    def margin(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        m = self.eps - self.K.distance(z)
        if self.clip:
            m = np.minimum(m, np.min(z, axis=-1))
        return m

    def ray_boundary(self, angles, tol: float = 1e-12) -> np.ndarray:
        fr = self.frame
        angles = np.asarray(angles, dtype=float)
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        sign = 1.0 if fr.inside_near else -1.0

        def g(t, idx):
            return sign * self.margin(fr.anchor + t[:, None] * dirs[idx])

        t_K = np.linalg.norm(self.K.ray_boundary(angles, tol=1e-13) - fr.anchor, axis=1) \
            if fr.inside_near else np.zeros(angles.size)
        lo = t_K.copy() if fr.inside_near else np.zeros(angles.size)
        hi = t_K + 2.0 * self.eps if fr.inside_near else np.full(angles.size, fr.t_scale)
        idx = np.arange(angles.size)
        for _ in range(80):
            bad = g(hi, idx) >= 0
            if not bad.any():
                break
            lo = np.where(bad, hi, lo)
            hi = np.where(bad, 2.0 * hi + self.eps, hi)
        return fr.anchor + find_crossings(g, lo, hi, tol)[:, None] * dirs


def level_set(K: PiecewiseBody, h: CapFunction, threshold: float,
              config: QuadratureConfig | None = None) -> LevelSetBody:
    return LevelSetBody(K, h, threshold, config)


def outer_parallel(K: PiecewiseBody, eps: float, clip_orthant: bool | None = None) -> OuterParallelBody:
    """``K + eps B``; upward-closed bodies are clipped to the orthant by default."""
    if clip_orthant is None:
        clip_orthant = not K.frame.inside_near
    return OuterParallelBody(K, eps, clip_orthant)
