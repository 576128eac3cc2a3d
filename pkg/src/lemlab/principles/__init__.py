"""Minimum-principle harnesses: Cartan discs, logarithmic potentials, capacity, three circles."""

from .capacity import (BallCn, CapacityEstimate, CapacityMethod, Corollary44Report, Disc, PointCloud,
                       Segment, capacity_1d, corollary44_check, fekete_indices, leja_points,
                       transfinite_diameter)
from .cartan import (H_constant, MinModulusReport, cartan_cover, lemniscate_grid, min_modulus_1d,
                     verify_lemniscate_cover)
from .lelong_class import corollary43_bound, corollary43_harness, lemniscate_samples, theorem42_harness
from .three_circle import (EssentialBound, LelongBoundReport, ThreeCircleMaxReport, ThreeCircleParams,
                           ball_sup, corollary64_harness, essential_lower_bound, lelong_bound_check,
                           nu_constant, rho_constant, three_circle_max_check, three_circle_min_harness)

__all__ = [
    "BallCn", "CapacityEstimate", "CapacityMethod", "Corollary44Report", "Disc", "PointCloud", "Segment",
    "capacity_1d", "corollary44_check", "fekete_indices", "leja_points", "transfinite_diameter",
    "H_constant", "MinModulusReport", "cartan_cover", "lemniscate_grid", "min_modulus_1d",
    "verify_lemniscate_cover", "corollary43_bound", "corollary43_harness", "lemniscate_samples",
    "theorem42_harness", "EssentialBound", "LelongBoundReport", "ThreeCircleMaxReport",
    "ThreeCircleParams", "ball_sup", "corollary64_harness", "essential_lower_bound",
    "lelong_bound_check", "nu_constant", "rho_constant", "three_circle_max_check",
    "three_circle_min_harness",
]
