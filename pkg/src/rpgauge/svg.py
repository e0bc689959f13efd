"""Minimal hand-written SVG for planar curves and point markers.

Coordinates are data coordinates; the y axis is flipped so that the picture
reads like a textbook plot. The viewBox is the bounding box of everything
drawn, padded by 10% on each side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PAD = 0.10


@dataclass(frozen=True)
class Curve:
    points: np.ndarray
    label: str
    stroke: str = "#1f77b4"
    dash: str = ""
    closed: bool = False


@dataclass(frozen=True)
class Marker:
    point: np.ndarray
    label: str
    fill: str = "#d62728"


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _bounds(curves: Sequence[Curve], markers: Sequence[Marker]):
    pts = [np.asarray(c.points, float).reshape(-1, 2) for c in curves]
    pts += [np.asarray(m.point, float).reshape(1, 2) for m in markers]
    allp = np.vstack(pts)
    allp = allp[np.all(np.isfinite(allp), axis=1)]
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    return lo - PAD * span, hi + PAD * span


def render(curves: Sequence[Curve], markers: Sequence[Marker] = (), *, title: str = "",
           width: int = 640) -> str:
    """Return an SVG document as text."""
    if not curves and not markers:
        raise ValueError("nothing to draw")
    lo, hi = _bounds(curves, markers)
    w, h = hi - lo
    height = max(1, int(round(width * h / w)))
    diag = float(np.hypot(w, h))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_fmt(lo[0])} {_fmt(-hi[1])} {_fmt(w)} {_fmt(h)}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    for c in curves:
        P = np.asarray(c.points, float).reshape(-1, 2)
        P = P[np.all(np.isfinite(P), axis=1)]
        coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in P)
        tag = "polygon" if c.closed else "polyline"
        dash = f' stroke-dasharray="{c.dash}"' if c.dash else ""
        out.append(f'<{tag} fill="none" stroke="{c.stroke}" stroke-width="1.5" '
                   f'vector-effect="non-scaling-stroke"{dash} points="{coords}">'
                   f"<title>{escape(c.label)}</title></{tag}>")
    r = 0.006 * diag
    for m in markers:
        x, y = np.asarray(m.point, float)
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(-y)}" r="{_fmt(r)}" fill="{m.fill}">'
                   f"<title>{escape(m.label)}</title></circle>")
        out.append(f'<text x="{_fmt(x + 1.5 * r)}" y="{_fmt(-y - 1.5 * r)}" '
                   f'font-size="{_fmt(4 * r)}">{escape(m.label)}</text>')
    y0 = 0.02 * h
    for k, c in enumerate(curves):
        out.append(f'<text x="{_fmt(lo[0] + 0.02 * w)}" y="{_fmt(-hi[1] + y0 * (k + 2))}" '
                   f'font-size="{_fmt(0.03 * h)}" fill="{c.stroke}">{escape(c.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
