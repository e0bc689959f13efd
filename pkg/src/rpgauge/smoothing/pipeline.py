"""End-to-end smoothing of a planar polyhedral gauge, with every check recorded.

:func:`smooth` chains the construction steps (facet points, ball system,
composite body, epsilon-round radius, cap, beta, smoothed body) and then
audits the result. Nothing here raises on a failed audit; failures show up
as ``passed = False`` entries in the report.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..gauge import SUPERDIFF_RTOL, PolyhedralGauge
from ..statistics import MarketStatistics
from .certify import Check, SmoothnessReport, certify_smoothness
from .construction import (BallSystem, FacetPoints, beta_values, build_hat_chi,
                           characteristic_polygon, choose_epsilon_round, choose_rho,
                           display_frame, eps_round_violations, facet_points,
                           rho_conditions, smoothed_body)
from .geometry import Polygon2D, UpwardHull
from .levelset import LevelSetBody
from .mollifier import CapFunction, QuadratureConfig, alpha_constant, cap, convolve


@dataclass(frozen=True)
class SmoothingConfig:
    quad_order: int = 64
    # positional tolerance for boundary points and the epsilon-round floor
    resolution: float = 1e-10
    cap_k: float = math.inf
    samples: int = 512
    chords: int = 1000
    members: int = 1000
    round_samples: int = 1000
    rays: int = 100
    seed: int = 0
    facet_rtol: float = SUPERDIFF_RTOL
    beta_tol: float = 1e-8
    boundary_tol: float = 1e-6
    supergr_tol: float = 1e-8

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        for name in ("samples", "chords", "members", "round_samples", "rays"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(self.quad_order, self.quad_order)

    def to_json(self) -> dict:
        d = asdict(self)
        d["cap_k"] = None if math.isinf(self.cap_k) else self.cap_k
        return d


@dataclass
class SmoothingReport:
    alpha: float
    beta: float
    rho: float
    epsilon_round: float
    s_points: np.ndarray
    facets: tuple[int, ...]
    balls: BallSystem
    cap: CapFunction
    beta_values: np.ndarray
    config: SmoothingConfig
    checks: list[Check] = field(default_factory=list)
    smoothness: Optional[SmoothnessReport] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "beta_values": [float(b) for b in self.beta_values],
            "rho": self.rho,
            "epsilon_round": self.epsilon_round,
            "cap": self.cap.to_json(),
            "s_points": [[float(v) for v in s] for s in self.s_points],
            # 1-based observation numbers, as in the input files
            "facets": [i + 1 for i in self.facets],
            "balls": {"radius": self.balls.rho,
                      "centers": [[float(v) for v in c] for c in self.balls.centers],
                      "directions": [[float(v) for v in d] for d in self.balls.directions],
                      "doublings": self.balls.doublings},
            "checks": [c.to_json() for c in self.checks],
            "smoothness": None if self.smoothness is None else self.smoothness.to_json(),
            "passed": self.passed,
            "config": self.config.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


@dataclass
class SmoothingResult:
    """The bodies built along the way together with the audit report."""

    chi: Polygon2D
    hat_chi: UpwardHull
    smoothed: LevelSetBody
    facet_points: FacetPoints
    report: SmoothingReport


def _upward_members(body, rays: np.ndarray, rng: np.random.Generator, tol: float) -> np.ndarray:
    """Members of an upward body: boundary points along ``rays`` pushed outward.

    Half of the points sit just past the boundary, where a supporting-line
    test is tightest; the rest lie deeper along the same ray. Every point is
    checked for membership and pushed further until it passes.
    """
    B = body.ray_boundary(rays, tol)
    scale = np.where(np.arange(rays.size) % 2 == 0, 1e-9, rng.uniform(0.0, 0.5, rays.size))
    X = B * (1.0 + scale)[:, None]
    for _ in range(40):
        bad = ~np.asarray(body.contains(X))
        if not bad.any():
            return X
        scale = np.where(bad, 2.0 * scale, scale)
        X = B * (1.0 + scale)[:, None]
    raise RuntimeError("could not produce member samples")  # pragma: no cover


def _ray_property(body, directions: np.ndarray, tol: float, rel: float = 1e-6) -> np.ndarray:
    """Per direction: the ray meets the body exactly in ``[t*, inf)``."""
    ang = np.arctan2(directions[:, 1], directions[:, 0])
    t_star = np.linalg.norm(body.ray_boundary(ang, tol), axis=1)
    u = directions / np.linalg.norm(directions, axis=1)[:, None]
    ok = ~np.asarray(body.contains(u * (t_star * (1 - rel))[:, None]))
    for f in (1 + rel, 1.5, 4.0, 32.0):
        ok &= np.asarray(body.contains(u * (t_star * f)[:, None]))
    return ok


def smooth(G: PolyhedralGauge, S: MarketStatistics,
           config: SmoothingConfig | None = None) -> SmoothingResult:
    """Build the smoothed characteristic set of ``G`` and audit it.

    ``G`` must come from strict multipliers for ``S`` (two goods, positive
    prices and quantities). Construction errors (ties, a resolution that is
    too coarse) propagate as :class:`SmoothingError` subclasses.
    """
    cfg = config or SmoothingConfig()
    quad = cfg.quadrature
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.resolution
    chi_q = characteristic_polygon(G)   # rejects n != 2
    if np.any(G.prices <= 0) or np.any(S.quantities <= 0):
        raise ValueError("smoothing needs strictly positive prices and quantities")

    fp = facet_points(G, S, rtol=cfg.facet_rtol)
    balls = choose_rho(G, fp)
    hat = build_hat_chi(G, fp, balls)
    er = choose_epsilon_round(hat, fp, balls, cfg.resolution, cfg.round_samples, cfg.seed)
    h = cap(er / 2.0, cfg.cap_k)
    betas = beta_values(balls, h, fp, quad)
    beta = float(np.mean(betas))
    alpha = alpha_constant(h, config=quad)
    chi_t = smoothed_body(hat, h, beta, quad)

    rep = SmoothingReport(alpha, beta, balls.rho, er, fp.points, tuple(fp.facets), balls, h,
                          betas, cfg)
    add = rep.checks.append
    s = fp.points

    add(Check("facet_points_distinct", len(set(fp.facets)) == len(fp.facets),
              float(len(set(fp.facets))), float(len(fp.facets)), "one facet per observation"))
    a, b = rho_conditions(s, balls.directions, balls.rho)
    add(Check("rho_rays_meet_balls", a >= 0, a, 0.0, "min over balls of rho - ray distance"))
    add(Check("rho_points_in_balls", b > 0, b, 0.0, "min over j != i of rho - |s_j - c_i|"))
    d_hat = float(np.max(np.abs(hat.signed_distance(s))))
    add(Check("s_on_hat_boundary", d_hat <= tol, d_hat, tol))
    viol = sum(eps_round_violations(hat, s[i], balls.centers[i], balls.rho, er,
                                    cfg.round_samples, cfg.seed + i) for i in range(len(s)))
    add(Check("epsilon_round", viol == 0, float(viol), 0.0,
              f"{cfg.round_samples} samples per point"))

    spread = float(np.ptp(betas))
    add(Check("beta_spread", spread <= cfg.beta_tol, spread, cfg.beta_tol))
    # a ball lies inside its tangent halfplane, so its mollified value is lower
    add(Check("beta_below_alpha", beta < alpha, alpha - beta, 0.0, "alpha - beta"))
    phi = np.atleast_1d(convolve(hat, h, s, quad))
    dphi = float(np.max(np.abs(phi - beta)))
    add(Check("phi_at_s_equals_beta", dphi <= cfg.beta_tol, dphi, cfg.beta_tol))

    s_ang = np.arctan2(s[:, 1], s[:, 0])
    on_ray = chi_t.ray_boundary(s_ang, tol)
    d_s = float(np.max(np.linalg.norm(on_ray - s, axis=1)))
    add(Check("s_on_smoothed_boundary", d_s <= cfg.boundary_tol, d_s, cfg.boundary_tol))

    fr = display_frame(fp, hat)
    half = cfg.members // 2
    width = 0.25 * (fr.theta_hi - fr.theta_lo)
    near = s_ang[rng.integers(0, len(s), cfg.members - half)] \
        + width * rng.uniform(-1.0, 1.0, cfg.members - half)
    rays = np.concatenate([rng.uniform(fr.theta_lo, fr.theta_hi, half),
                           np.clip(near, fr.theta_lo, fr.theta_hi)])
    X = _upward_members(chi_t, rays, rng, tol)
    gens = G.generators[list(fp.facets)]
    slack = (X @ gens.T) - np.einsum("ij,ij->i", s, gens)[None, :]
    worst = float(slack.min())
    add(Check("supporting_lines", worst >= -cfg.supergr_tol, worst, -cfg.supergr_tol,
              f"min over {X.shape[0]} members of p_i.x - p_i.s_i"))

    dirs = rng.uniform(0.05, 1.0, size=(cfg.rays, 2))
    ok = _ray_property(chi_t, dirs, tol)
    add(Check("ray_property", bool(ok.all()), float(np.count_nonzero(~ok)), 0.0,
              f"{cfg.rays} positive rays"))

    sm = certify_smoothness(chi_t, cfg.samples, window=(fr.theta_lo, fr.theta_hi),
                            chords=cfg.chords, seed=cfg.seed, tol=tol)
    rep.smoothness = sm
    rep.checks.extend(sm.checks)

    a_half = alpha_constant(h, config=quad.halved())
    da = abs(alpha - a_half)
    add(Check("alpha_richardson", da <= cfg.beta_tol, da, cfg.beta_tol,
              "agreement at half quadrature order"))
    return SmoothingResult(chi_q, hat, chi_t, fp, rep)


__all__ = ["SmoothingConfig", "SmoothingReport", "SmoothingResult", "smooth"]
