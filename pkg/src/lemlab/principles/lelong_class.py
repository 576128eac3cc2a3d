"""Minimum principle for logarithmic potentials and lemniscate content."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..cover import ExclusionParams, ExclusionReport, Metric, euclidean_paper_bound, exclusion_cover
from ..errors import DomainError
from ..points import as_points, norm, uniform_ball
from ..potentials import PshOracle, SphereQuadrature, check_log_class
from .cartan import lemniscate_grid


def theorem42_harness(V: PshOracle, eta: float, alpha: float, R: float, samples,
                      quad: Optional[SphereQuadrature] = None, slack: float = 0.0,
                      normalization_tol: float = 1e-6, theta_h: float = 0.05) -> ExclusionReport:
    """Euclidean exclusion for a normalized logarithmic potential.

    Runs the engine with expansion 5, ``epsilon = eta / 5`` and
    ``A = alpha epsilon^-alpha``, then checks ``V(z) >= -log(5e/eta) - slack``
    at every good sample.  ``slack`` absorbs quadrature error when
    ``theta`` comes from sphere means.
    """
    if not 0 < eta < 5:
        raise DomainError("eta must lie in (0, 5)")
    if not 0 < alpha <= 2:
        raise DomainError("alpha must lie in (0, 2]")
    pts = as_points(samples, V.dim)
    rm = check_log_class(V, quad, normalization_tol)
    eps = eta / 5
    params = ExclusionParams(eps, alpha, alpha * eps ** -alpha, Metric.EUCLIDEAN)
    theta = V.theta_oracle(Metric.EUCLIDEAN, quad, theta_h)
    rep = exclusion_cover(theta, pts, params, mass_bound=1.0, R=R,
                          paper_bound=euclidean_paper_bound(V.dim, R, eta, alpha))
    good = rep.good_points
    floor = -math.log(5 * math.e / eta)
    vals = V(good) if len(good) else np.zeros(0)
    viol = int(np.sum(vals < floor - slack))
    rep.checks["lower_bound"] = viol == 0
    rep.extras.update({"eta": eta, "alpha": alpha, "R": R, "robin_mean": rm, "lower_bound": floor,
                       "slack": slack, "lower_bound_violations": viol,
                       "min_value_good": float(vals.min()) if len(good) else None,
                       "radius_cap": eta, "max_radius": float(rep.expanded_cover.radii.max())
                       if len(rep.expanded_cover) else 0.0})
    return rep


def corollary43_bound(n: int, R: float, epsilon: float, alpha: float) -> float:
    """``5^(2n-2) (R+5)^(2n-2) (5 e epsilon)^alpha / alpha``."""
    return 5.0 ** (2 * n - 2) * (R + 5) ** (2 * n - 2) * (5 * math.e * epsilon) ** alpha / alpha


def lemniscate_samples(dim: int, R: float, grid: int, seed: int = 0) -> np.ndarray:
    """Grid of the disc ``B_R`` (n = 1) or ``grid`` seeded uniform points (n >= 2)."""
    if dim == 1:
        z = lemniscate_grid(R, grid)
        return z[np.abs(z) <= R][:, None]
    return uniform_ball(np.random.default_rng(seed), grid, dim, R)


def corollary43_harness(V: PshOracle, epsilon: float, alpha: float, R: float, grid: int = 201,
                        quad: Optional[SphereQuadrature] = None, seed: int = 0,
                        samples=None) -> ExclusionReport:
    """Lemniscate ``{V <= log epsilon}`` against its content bound.

    Runs :func:`theorem42_harness` with ``eta = 5 e epsilon`` on grid
    samples of ``B_R`` and checks that every sampled point with
    ``V < log epsilon`` lies in the expanded cover (points with equality
    may be good: the lower bound is then attained exactly).
    """
    if not 0 < epsilon < 1 / math.e:
        raise DomainError("epsilon must lie in (0, 1/e)")
    eta = 5 * math.e * epsilon
    pts = lemniscate_samples(V.dim, R, grid, seed) if samples is None else as_points(samples, V.dim)
    rep = theorem42_harness(V, eta, alpha, R, pts, quad)
    vals = V(pts)
    lem = pts[vals < math.log(epsilon)]
    covered = rep.expanded_cover.contains(lem) if len(lem) else np.zeros(0, dtype=bool)
    rep.paper_bound = corollary43_bound(V.dim, R, epsilon, alpha)
    rep.checks["lemniscate_covered"] = bool(np.all(covered))
    rep.extras.update({"epsilon": epsilon, "lemniscate_points": int(len(lem)),
                       "uncovered_lemniscate_points": int(np.sum(~covered)),
                       "lemniscate_radius_max": float(norm(lem).max()) if len(lem) else None})
    return rep
