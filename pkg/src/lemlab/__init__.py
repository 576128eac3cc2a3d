"""Numerical checks of minimum principles for plurisubharmonic functions.

The package is organised in layers: ``cover`` holds metric balls, Vitali
selection, content estimates and the exclusion-ball engine; ``potentials``
holds psh oracles, sphere quadrature and the projective mass; ``ball`` holds
unit-ball geometry; ``principles`` holds the theorem harnesses; ``cli``
runs any harness from the command line and writes a JSON report.
"""

from .cover import (BallCover, ExclusionParams, ExclusionReport, Metric, MetricBall, ThetaOracle,
                    content_sum, exclusion_cover, hausdorff_content_upper, vitali_select,
                    witness_radius_search)
from .errors import (DimensionMismatch, DomainError, MixedMetricError, NormalizationError, NotLelongClass,
                     QuadratureDegeneracy)
from .points import POLE, as_point, as_points, is_pole
from .potentials import (AtomicMeasure, FactoredPolynomial, Polynomial, PshOracle, SphereQuadrature,
                         default_quadrature, discrete_potential, from_function, lelong_number,
                         log_poly_potential, poisson_jensen_residual, representation_residual,
                         robin_mean, sphere_mean, theta_from_sphere_means)

__version__ = "0.1.0"

__all__ = [
    "BallCover", "ExclusionParams", "ExclusionReport", "Metric", "MetricBall", "ThetaOracle",
    "content_sum", "exclusion_cover", "hausdorff_content_upper", "vitali_select", "witness_radius_search",
    "DimensionMismatch", "DomainError", "MixedMetricError", "NormalizationError", "NotLelongClass",
    "QuadratureDegeneracy", "POLE", "as_point", "as_points", "is_pole", "AtomicMeasure",
    "FactoredPolynomial", "Polynomial", "PshOracle", "SphereQuadrature", "default_quadrature",
    "discrete_potential", "from_function", "lelong_number", "log_poly_potential",
    "poisson_jensen_residual", "representation_residual", "robin_mean", "sphere_mean",
    "theta_from_sphere_means",
]
