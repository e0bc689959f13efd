"""Homogeneous revealed preference: axiom tests, Afriat multipliers, polyhedral
gauges and their duals, and planar smoothing of the recovered indices."""

from .consistency import (AxiomVerdict, InfeasibleError, Multipliers, check_axiom,
                          cycle_product, solve_multipliers, verify_solution)
from .gauge import (CharacteristicSet, GaugeError, PolyhedralGauge, dual_infimum, eval_P,
                    eval_Q, ray_boundary_point, superdifferential, verify_blocking,
                    verify_rationalization)
from .statistics import (MarketStatistics, StatisticsError, cross_matrix, load_statistics,
                         parse_statistics)

__version__ = "0.1.0"

__all__ = [
    "AxiomVerdict", "CharacteristicSet", "GaugeError", "InfeasibleError", "MarketStatistics",
    "Multipliers", "PolyhedralGauge", "StatisticsError", "check_axiom", "cross_matrix",
    "cycle_product", "dual_infimum", "eval_P", "eval_Q", "load_statistics",
    "parse_statistics", "ray_boundary_point", "solve_multipliers", "superdifferential",
    "verify_blocking", "verify_rationalization",
]
