"""Cartan discs for polynomial lemniscates and the one-variable minimum modulus."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..cover import BallCover, Metric, MetricBall
from ..errors import DomainError
from ..points import encode_point
from ..potentials import FactoredPolynomial

_TOL = 1e-12


def H_constant(eta: float) -> float:
    """``log(3 e^3 / (2 eta))`` for ``0 < eta < 1``."""
    if not 0 < eta < 1:
        raise DomainError("H_constant needs 0 < eta < 1")
    return math.log(3 * math.e ** 3 / (2 * eta))


def _as_roots(roots) -> np.ndarray:
    if isinstance(roots, FactoredPolynomial):
        return roots.all_roots
    return np.atleast_1d(np.asarray(roots, dtype=complex))


def _candidate_discs(pts: np.ndarray):
    """Smallest discs spanned by single points, pairs and triples.

    Every finite set's smallest enclosing disc is one of these, so scanning
    them decides exactly whether some disc of radius ``r`` holds ``p`` points.
    """
    u = np.unique(pts)
    for a in u:
        yield a, 0.0
    for a, b in itertools.combinations(u, 2):
        yield (a + b) / 2, abs(a - b) / 2
    for a, b, c in itertools.combinations(u, 3):
        d = 2 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
        if abs(d) < 1e-300:
            continue
        aa, bb, cc = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
        ux = (aa * (b.imag - c.imag) + bb * (c.imag - a.imag) + cc * (a.imag - b.imag)) / d
        uy = (aa * (c.real - b.real) + bb * (a.real - c.real) + cc * (b.real - a.real)) / d
        center = complex(ux, uy)
        yield center, abs(a - center)


def cartan_cover(roots, epsilon: float, alpha: float = 1.0) -> BallCover:
    """Classical Cartan grouping of the roots of a monic polynomial.

    With ``lambda(k) = epsilon e^(1/alpha) (k/d)^(1/alpha)``, repeatedly take
    the largest ``p`` such that some disc of radius at most ``lambda(p)``
    holds ``p`` of the remaining roots (counted with multiplicity), remove
    ``p`` of them and record the concentric disc of radius ``lambda(p)`` plus
    the candidate's own radius.  Outside the closed discs every ``k``-th
    nearest root is farther than ``lambda(k)``, so
    ``|P| > prod lambda(k) >= epsilon^d``, and the radii satisfy
    ``sum r^alpha <= e (2 epsilon)^alpha``; for ``alpha = 1`` this is
    ``sum r <= 2 e epsilon``.

    Parameters
    ----------
    roots : array_like or FactoredPolynomial
        Roots repeated according to multiplicity.
    """
    pts = _as_roots(roots)
    d = pts.size
    if d == 0:
        raise DomainError("cartan_cover needs at least one root")
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if not 0 < alpha <= 2:
        raise DomainError("alpha must lie in (0, 2]")
    lam = epsilon * math.e ** (1 / alpha) * (np.arange(d + 1) / d) ** (1 / alpha)
    remaining = pts.copy()
    balls = []
    while remaining.size:
        best = None
        for c, r in _candidate_discs(remaining):
            dist = np.abs(remaining - c)
            count = int(np.sum(dist <= r * (1 + _TOL) + _TOL))
            # largest p <= count with r <= lam[p]
            p = count
            while p > 0 and r > lam[p]:
                p -= 1
            if p > 0 and (best is None or p > best[0] or (p == best[0] and r < best[2])):
                best = (p, c, r)
        p, c, r = best
        order = np.argsort(np.abs(remaining - c), kind="stable")
        remaining = np.delete(remaining, order[:p])
        balls.append(MetricBall(c, float(lam[p] + r), Metric.EUCLIDEAN))
    return BallCover(balls)


def lemniscate_grid(extent: float, resolution: int, center: complex = 0) -> np.ndarray:
    """Square ``resolution x resolution`` grid of complex points."""
    axis = np.linspace(-extent, extent, resolution)
    x, y = np.meshgrid(axis, axis, indexing="xy")
    return (center + x + 1j * y).ravel()


def _log_abs_monic(roots: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros(z.shape)
    with np.errstate(divide="ignore"):
        for a in roots:
            out += np.log(np.abs(z - a))
    return out


def _outside(cover: BallCover, z: np.ndarray) -> np.ndarray:
    if not len(cover):
        return np.ones(z.shape, dtype=bool)
    return ~cover.contains(z[:, None])


def verify_lemniscate_cover(roots, epsilon: float, cover: BallCover, grid_resolution: int = 512,
                            extent: Optional[float] = None) -> bool:
    """``|P(z)| >= epsilon^d`` at every grid point outside the closed discs.

    ``P`` is the monic polynomial with the given roots; the comparison is
    done on ``log|P|``.  The default grid covers the disc of radius 4 or the
    roots' hull plus a margin, whichever is larger.
    """
    pts = _as_roots(roots)
    if len(cover) and cover.metric is not Metric.EUCLIDEAN:
        raise DomainError("lemniscate covers must be Euclidean")
    if extent is None:
        extent = max(4.0, float(np.max(np.abs(pts))) + 2 * math.e * epsilon + 1)
    z = lemniscate_grid(extent, grid_resolution)
    z = z[_outside(cover, z)]
    return bool(np.all(_log_abs_monic(pts, z) >= pts.size * math.log(epsilon)))


@dataclass
class MinModulusReport:
    R: float
    eta: float
    H: float
    log_M: float
    cover: BallCover
    radius_sum: float
    radius_bound: float
    grid_points_checked: int
    violations: int
    min_margin: Optional[float]
    zeros_used: int
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.radius_sum <= self.radius_bound * (1 + 1e-12)

    def to_dict(self) -> dict:
        return {"R": self.R, "eta": self.eta, "H": self.H, "log_M": self.log_M,
                "cover": self.cover.to_list(), "radius_sum": self.radius_sum,
                "radius_bound": self.radius_bound, "grid_points_checked": self.grid_points_checked,
                "violations": self.violations, "min_margin": self.min_margin,
                "zeros_used": self.zeros_used, "pass": self.passed, **self.extras}


def min_modulus_1d(f: FactoredPolynomial, R: float, eta: float, grid: int = 401,
                   boundary_nodes: int = 4096) -> MinModulusReport:
    """Check ``log|f| >= -H(eta) log M_f(2eR)`` on a grid of ``B_R`` outside Cartan discs.

    The discs come from :func:`cartan_cover` on the zeros in ``|z| <= 2R``
    at level ``eta R / e``, so their radii sum to at most ``2 eta R``.  The
    maximum ``M_f(2eR)`` is sampled on the circle, which can only
    underestimate it and so makes the check stricter.  Equality is accepted
    so that ``f = 1`` passes.
    """
    if not 0 < eta < 1:
        raise DomainError("eta must lie in (0, 1)")
    if not R > 0:
        raise DomainError("R must be positive")
    if abs(f(0.0) - 1) > 1e-12:
        raise DomainError("f(0) must equal 1")
    H = H_constant(eta)
    phi = 2 * np.pi * np.arange(boundary_nodes) / boundary_nodes
    log_M = float(np.max(f.log_abs(2 * math.e * R * np.exp(1j * phi))))
    roots = f.all_roots
    near = roots[np.abs(roots) <= 2 * R]
    cover = cartan_cover(near, eta * R / math.e, 1.0) if near.size else BallCover([])
    z = lemniscate_grid(R, grid)
    z = z[np.abs(z) <= R]
    z = z[_outside(cover, z)]
    vals = f.log_abs(z)
    margin = vals + H * log_M
    return MinModulusReport(R, eta, H, log_M, cover, float(cover.radii.sum()) if len(cover) else 0.0,
                            2 * eta * R, int(z.size), int(np.sum(margin < 0)),
                            float(margin.min()) if z.size else None, int(near.size),
                            {"exceptional_centers": [encode_point(b.center) for b in cover]})
