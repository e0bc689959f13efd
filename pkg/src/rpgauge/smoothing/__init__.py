"""Planar smoothing of polyhedral characteristic sets by mollification."""

from .certify import Check, SmoothnessReport, certify_smoothness
from .construction import (BallSystem, FacetPoints, ResolutionError, SmoothingError,
                           StrictnessError, beta_constant, beta_values, build_hat_chi,
                           characteristic_polygon, choose_epsilon_round, choose_rho,
                           convexity_window, display_frame, eps_round_violations,
                           facet_points, rho_conditions, smoothed_body)
from .geometry import ArcPiece, ConvexBody2D, Disc, LinePiece, Polygon2D, RayFrame, UpwardHull
from .levelset import (EmptyLevelSetError, LevelSetBody, OuterParallelBody, interior_margin,
                       level_set, outer_parallel)
from .mollifier import (CapFunction, QuadratureConfig, QuadratureConfigError, alpha_constant,
                        cap, convolve, quasi_indicator)
from .pipeline import SmoothingConfig, SmoothingReport, SmoothingResult, smooth

__all__ = [
    "ArcPiece", "BallSystem", "CapFunction", "Check", "ConvexBody2D", "Disc",
    "EmptyLevelSetError", "FacetPoints", "LevelSetBody", "LinePiece", "OuterParallelBody",
    "Polygon2D", "QuadratureConfig", "QuadratureConfigError", "RayFrame", "ResolutionError",
    "SmoothingConfig", "SmoothingError", "SmoothingReport", "SmoothingResult",
    "SmoothnessReport", "StrictnessError", "UpwardHull", "alpha_constant", "beta_constant",
    "beta_values", "build_hat_chi", "cap", "certify_smoothness", "characteristic_polygon",
    "choose_epsilon_round", "choose_rho", "convexity_window", "convolve", "display_frame",
    "eps_round_violations", "facet_points", "interior_margin", "level_set", "outer_parallel",
    "quasi_indicator", "rho_conditions", "smooth", "smoothed_body",
]
