"""Planar convex bodies with exact piecewise boundaries.

A body's boundary is a chain of :class:`LinePiece` and :class:`ArcPiece`
objects traversed counterclockwise (body on the left, outward normal on the
right). Unbounded bodies such as characteristic sets use line pieces with an
infinite end. Point arguments are arrays of shape ``(..., 2)``.

Every body also carries a :class:`RayFrame`: a family of rays along which
membership switches exactly once. Boundary polylines are found by bisection
along those rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

TWO_PI = 2.0 * math.pi


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class LinePiece:
    """Points ``origin + t * direction`` for ``t0 <= t <= t1`` (either end may be infinite)."""

    origin: np.ndarray
    direction: np.ndarray
    t0: float
    t1: float

    kind = "line"

    @property
    def normal(self) -> np.ndarray:
        d = self.direction
        return np.array([d[1], -d[0]])

    def point(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.origin + t[..., None] * self.direction

    @property
    def start(self) -> Optional[np.ndarray]:
        return None if math.isinf(self.t0) else self.point(self.t0)

    @property
    def end(self) -> Optional[np.ndarray]:
        return None if math.isinf(self.t1) else self.point(self.t1)

    @property
    def length(self) -> float:
        return self.t1 - self.t0

    def normal_at_start(self) -> np.ndarray:
        return self.normal

    def normal_at_end(self) -> np.ndarray:
        return self.normal

    def distance(self, z: np.ndarray) -> np.ndarray:
        t = np.clip(_dot(z - self.origin, self.direction), self.t0, self.t1)
        dx = z[..., 0] - (self.origin[0] + t * self.direction[0])
        dy = z[..., 1] - (self.origin[1] + t * self.direction[1])
        return np.sqrt(dx * dx + dy * dy)

    def sample(self, spacing: float, far: float) -> np.ndarray:
        a = self.t0 if math.isfinite(self.t0) else self.t1 - far
        b = self.t1 if math.isfinite(self.t1) else self.t0 + far
        k = max(2, int(math.ceil((b - a) / spacing)) + 1)
        return self.point(np.linspace(a, b, k))


@dataclass(frozen=True)
class ArcPiece:
    """Counterclockwise arc of the circle ``(center, radius)`` from angle ``a0`` to ``a1``."""

    center: np.ndarray
    radius: float
    a0: float
    a1: float

    kind = "arc"

    @property
    def span(self) -> float:
        return self.a1 - self.a0

    @property
    def full(self) -> bool:
        return self.span >= TWO_PI - 1e-15

    def point(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        return self.center + self.radius * np.stack([np.cos(a), np.sin(a)], axis=-1)

    @property
    def start(self) -> Optional[np.ndarray]:
        return None if self.full else self.point(self.a0)

    @property
    def end(self) -> Optional[np.ndarray]:
        return None if self.full else self.point(self.a1)

    @property
    def length(self) -> float:
        return self.radius * self.span

    def normal_at_start(self) -> np.ndarray:
        return np.array([math.cos(self.a0), math.sin(self.a0)])

    def normal_at_end(self) -> np.ndarray:
        return np.array([math.cos(self.a1), math.sin(self.a1)])

    def distance(self, z: np.ndarray) -> np.ndarray:
        wx = z[..., 0] - self.center[0]
        wy = z[..., 1] - self.center[1]
        r = np.sqrt(wx * wx + wy * wy)
        d_on = np.abs(r - self.radius)
        if self.full:
            return d_on
        rel = np.mod(np.arctan2(wy, wx) - self.a0, TWO_PI)
        ps, pe = self.point(self.a0), self.point(self.a1)
        ds = np.sqrt((z[..., 0] - ps[0]) ** 2 + (z[..., 1] - ps[1]) ** 2)
        de = np.sqrt((z[..., 0] - pe[0]) ** 2 + (z[..., 1] - pe[1]) ** 2)
        return np.where(rel <= self.span, d_on, np.minimum(ds, de))

    def sample(self, spacing: float, far: float) -> np.ndarray:
        k = max(2, int(math.ceil(self.length / spacing)) + 1)
        return self.point(np.linspace(self.a0, self.a1, k))


Piece = LinePiece | ArcPiece


@dataclass(frozen=True)
class RayFrame:
    """Rays ``anchor + t (cos th, sin th)`` crossing the boundary exactly once.

    ``inside_near`` says whether points near the anchor are members. Angles
    increase counterclockwise around the anchor; ``ccw_increasing`` tells
    whether that ordering walks the boundary counterclockwise.
    """

    anchor: np.ndarray
    theta_lo: float
    theta_hi: float
    inside_near: bool
    t_scale: float
    periodic: bool = False
    ccw_increasing: bool = True

    def angles(self, count: int) -> np.ndarray:
        if self.periodic:
            th = self.theta_lo + TWO_PI * np.arange(count) / count
        else:
            th = np.linspace(self.theta_lo, self.theta_hi, count)
        return th if self.ccw_increasing else th[::-1]


def upward_frame(margin: float = 1e-3, t_scale: float = 1.0) -> RayFrame:
    """Rays from the origin into the open quadrant, for upward-closed sets."""
    return RayFrame(np.zeros(2), margin, math.pi / 2 - margin, False, t_scale,
                    periodic=False, ccw_increasing=False)


class ConvexBody2D:
    """Base class: a closed convex set known through a membership oracle."""

    description: str = "body"
    frame: RayFrame

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def ray_boundary(self, angles, tol: float = 1e-12) -> np.ndarray:
        """Boundary points on the frame rays at ``angles`` by bisection on membership."""
        fr = self.frame
        angles = np.asarray(angles, dtype=float)
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        lo, hi = _bracket(lambda t: self.contains(fr.anchor + t[:, None] * dirs),
                          fr.inside_near, fr.t_scale, angles.size)
        while np.max(hi - lo) > tol:
            mid = 0.5 * (lo + hi)
            if np.all((mid == lo) | (mid == hi)):
                break
            inside = self.contains(fr.anchor + mid[:, None] * dirs)
            near_side = inside == fr.inside_near
            lo = np.where(near_side, mid, lo)
            hi = np.where(near_side, hi, mid)
        # return the member end of the bracket
        t = lo if fr.inside_near else hi
        return fr.anchor + t[:, None] * dirs

    def boundary(self, samples: int = 512, tol: float = 1e-12) -> np.ndarray:
        """Counterclockwise boundary polyline sampled on ``samples`` frame rays."""
        return self.ray_boundary(self.frame.angles(samples), tol)


def _bracket(contains_at, inside_near: bool, t0: float, m: int):
    """Find ``lo < hi`` per ray with membership ``inside_near`` at lo and not at hi."""
    lo = np.zeros(m)
    hi = np.full(m, float(t0))
    for _ in range(80):
        flip = contains_at(hi) != inside_near
        if np.all(flip):
            return lo, hi
        lo = np.where(flip, lo, hi)
        hi = np.where(flip, hi, 2.0 * hi)
    raise RuntimeError("could not bracket the boundary along some frame ray")


class PiecewiseBody(ConvexBody2D):
    """Convex body whose boundary is an explicit CCW chain of pieces.

    Supplies exact distances and the pieces and corners of the boundary,
    which is what the convolution quadrature needs.
    """

    def __init__(self, pieces: Sequence[Piece], closed: bool, frame: RayFrame,
                 description: str, scale: float = 1.0):
        self.pieces = list(pieces)
        self.closed = closed
        self.frame = frame
        self.description = description
        self.scale = scale

    # -- distances -------------------------------------------------------
    def boundary_distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        d = self.pieces[0].distance(z)
        for p in self.pieces[1:]:
            d = np.minimum(d, p.distance(z))
        return d

    def distance(self, z) -> np.ndarray:
        """Euclidean distance to the body (0 inside)."""
        z = np.asarray(z, dtype=float)
        return np.where(self.contains(z), 0.0, self.boundary_distance(z))

    def signed_distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        d = self.boundary_distance(z)
        return np.where(self.contains(z), -d, d)

    def junctions(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Corners ``(vertex, incoming normal, outgoing normal)`` with a nonzero normal cone."""
        out = []
        m = len(self.pieces)
        for k in range(m if self.closed else m - 1):
            a, b = self.pieces[k], self.pieces[(k + 1) % m]
            if a.end is None:
                continue
            n1, n2 = a.normal_at_end(), b.normal_at_start()
            if abs(_cross(n1, n2)) <= 1e-15 and _dot(n1, n2) > 0:
                continue
            out.append((a.end, n1, n2))
        return out

    def boundary_polyline(self, spacing: float, far: float = 1.0) -> np.ndarray:
        """Dense sample of the exact boundary chain (infinite ends cut at ``far``)."""
        parts = [p.sample(spacing, far) for p in self.pieces]
        out = [parts[0]]
        for q in parts[1:]:
            out.append(q[1:] if np.allclose(q[0], out[-1][-1]) else q)
        return np.vstack(out)


class Polygon2D(PiecewiseBody):
    """Intersection of halfplanes ``A z <= b`` (bounded or not)."""

    def __init__(self, A, b, frame: Optional[RayFrame] = None, description: str = "polyhedral"):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        nrm = np.linalg.norm(A, axis=1)
        A, b = A / nrm[:, None], b / nrm
        keep = []
        for i in range(len(b)):
            if not any(np.allclose(A[i], A[j], atol=1e-14) and abs(b[i] - b[j]) <= 1e-14
                       for j in keep):
                keep.append(i)
        self.A, self.b = A[keep], b[keep]
        pieces, scale = self._edges()
        if not pieces:
            raise ValueError("halfplane intersection has empty interior")
        bounded = all(math.isfinite(p.t0) and math.isfinite(p.t1) for p in pieces)
        if frame is None:
            frame = self._default_frame(pieces, bounded, scale)
        super().__init__(pieces, bounded, frame, description, scale)

    @classmethod
    def from_vertices(cls, points, description: str = "polytope") -> "Polygon2D":
        pts = np.asarray(points, dtype=float)
        hull = ConvexHull(pts)
        V = pts[hull.vertices]  # counterclockwise in 2-D
        A, b = [], []
        for i in range(len(V)):
            d = V[(i + 1) % len(V)] - V[i]
            nrm = np.array([d[1], -d[0]])
            A.append(nrm)
            b.append(nrm @ V[i])
        return cls(A, b, description=description)

    @classmethod
    def halfplane(cls, normal, offset: float = 0.0, depth: float = 1.0) -> "Polygon2D":
        """``{z : normal . z <= offset}`` with rays from a point ``depth`` inside."""
        a = _unit(normal)
        foot = offset / np.linalg.norm(normal) * a
        anchor = foot - depth * a
        th = math.atan2(a[1], a[0])
        frame = RayFrame(anchor, th - 1.2, th + 1.2, True, 2.0 * depth)
        return cls([normal], [offset], frame=frame, description="halfplane")

    def _edges(self):
        A, b = self.A, self.b
        m = len(b)
        pieces = []
        for i in range(m):
            a = A[i]
            d = np.array([-a[1], a[0]])
            p = b[i] * a
            lo, hi = -np.inf, np.inf
            empty = False
            for j in range(m):
                if j == i:
                    continue
                coef = A[j] @ d
                rhs = b[j] - A[j] @ p
                if abs(coef) <= 1e-14:
                    if rhs < -1e-14:
                        empty = True
                    continue
                if coef > 0:
                    hi = min(hi, rhs / coef)
                else:
                    lo = max(lo, rhs / coef)
            if empty or hi - lo <= 1e-12:
                continue
            ang = math.atan2(a[1], a[0]) % TWO_PI
            pieces.append((ang, LinePiece(p, d, lo, hi)))
        pieces.sort(key=lambda x: x[0])
        pieces = [pc for _, pc in pieces]
        # an unbounded chain must start with the edge coming in from infinity
        starts = [k for k, pc in enumerate(pieces) if math.isinf(pc.t0)]
        if starts:
            k = starts[0]
            pieces = pieces[k:] + pieces[:k]
        finite = [pc.point(t) for pc in pieces for t in (pc.t0, pc.t1) if math.isfinite(t)]
        scale = max(1.0, float(np.max(np.abs(finite)))) if finite else 1.0
        return pieces, scale

    def _default_frame(self, pieces, bounded: bool, scale: float) -> RayFrame:
        if bounded:
            verts = np.array([pc.point(pc.t0) for pc in pieces])
            c = verts.mean(axis=0)
            return RayFrame(c, 0.0, TWO_PI, True, scale, periodic=True)
        return upward_frame(t_scale=scale)

    @property
    def vertices(self) -> np.ndarray:
        return np.array([pc.point(pc.t1) for pc in self.pieces if math.isfinite(pc.t1)])

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.all(z @ self.A.T <= self.b, axis=-1)


class Disc(PiecewiseBody):
    """Closed Euclidean ball ``B(center, radius)``."""

    def __init__(self, center, radius: float, description: str = "ball"):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        frame = RayFrame(self.center, 0.0, TWO_PI, True, 1.5 * self.radius, periodic=True)
        scale = max(1.0, float(np.abs(self.center).max()) + self.radius)
        super().__init__([ArcPiece(self.center, self.radius, 0.0, TWO_PI)], True,
                         frame, description, scale)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        w = z - self.center
        return w[..., 0] ** 2 + w[..., 1] ** 2 <= self.radius ** 2


class UpwardHull(PiecewiseBody):
    """``L + R^2_+`` for a compact convex ``L`` given by its southwest frontier.

    ``frontier`` is the CCW chain of pieces of ``L``'s boundary whose outward
    normals lie in the closed third quadrant, running from the leftmost point
    down to the lowest. The body boundary is a vertical ray down to the
    frontier, the frontier itself, and a horizontal ray to the right.
    """

    def __init__(self, frontier: Sequence[Piece], description: str = "upward hull"):
        frontier = list(frontier)
        top = frontier[0].start
        bottom = frontier[-1].end
        self.frontier = frontier
        self.top, self.bottom = top, bottom
        up = LinePiece(top, np.array([0.0, -1.0]), -np.inf, 0.0)
        right = LinePiece(bottom, np.array([1.0, 0.0]), 0.0, np.inf)
        pieces = [up] + frontier + [right]
        scale = max(1.0, float(np.abs(np.vstack([top, bottom])).max()))
        super().__init__(pieces, False, upward_frame(t_scale=scale), description, scale)

    def frontier_height(self, a: np.ndarray) -> np.ndarray:
        """Lowest frontier height over abscissa ``a`` (valid for ``top_x <= a``)."""
        g = np.full(a.shape, self.bottom[1])
        for p in self.frontier:
            s, e = p.start, p.end
            x0, x1 = s[0], e[0]
            if x1 - x0 <= 0:
                continue
            sel = (a >= x0) & (a <= x1)
            if not sel.any():
                continue
            if p.kind == "line":
                tt = (a[sel] - x0) / (x1 - x0)
                g[sel] = s[1] + tt * (e[1] - s[1])
            else:
                dx = a[sel] - p.center[0]
                g[sel] = p.center[1] - np.sqrt(np.maximum(p.radius ** 2 - dx * dx, 0.0))
        return g

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        a, b = z[..., 0], z[..., 1]
        ok = a >= self.top[0]
        g = self.frontier_height(np.where(ok, a, self.top[0]))
        return ok & (b >= g)
