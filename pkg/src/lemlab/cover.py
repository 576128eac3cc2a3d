"""Balls, covers, Vitali selection and the exclusion-ball engine.

Balls are closed throughout: ``z`` lies in ``B(c, r)`` iff ``dist(c, z) <= r``.
Two balls are disjoint iff ``dist(c_i, c_j) > r_i + r_j``.

The exclusion engine classifies sample points by scanning their projective
mass ``theta(z, t)`` against ``A t^alpha`` on small radii, then covers the
violators by a Vitali-expanded disjoint family of witness balls.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._miniball import min_enclosing_ball
from .ball.mobius import invariant_distance
from .errors import DimensionMismatch, DomainError, MixedMetricError
from .points import as_point, as_points, encode_point, from_real, norm, to_real

logger = logging.getLogger(__name__)

R_MIN = 1e-12
DISJOINT_TOL = 1e-12


class Metric(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    INVARIANT = "invariant"


def euclidean_distance(a, b) -> np.ndarray:
    return norm(np.asarray(a) - np.asarray(b))


def distance_for(metric: Metric) -> Callable:
    if metric is Metric.EUCLIDEAN:
        return euclidean_distance
    return invariant_distance


def default_expansion(metric: Metric) -> float:
    return 5.0 if metric is Metric.EUCLIDEAN else 3.0


@dataclass(frozen=True)
class MetricBall:
    center: np.ndarray
    radius: float
    metric: Metric = Metric.EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")
        if self.metric is Metric.INVARIANT:
            if norm(self.center) >= 1.0 or self.radius >= 1.0:
                raise DomainError("pseudo-balls need |center| < 1 and radius < 1")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def to_dict(self) -> dict:
        return {"center": encode_point(self.center), "radius": float(self.radius),
                "metric": self.metric.value}


@dataclass
class BallCover:
    balls: list[MetricBall] = field(default_factory=list)
    delta_cap: Optional[float] = None

    def __post_init__(self):
        if len({b.metric for b in self.balls}) > 1:
            raise MixedMetricError("all balls of a cover must share one metric")
        if self.delta_cap is not None:
            if not self.delta_cap > 0:
                raise DomainError("delta_cap must be positive")
            big = [b.radius for b in self.balls if b.radius > self.delta_cap]
            if big:
                raise DomainError(f"radius {max(big)} exceeds delta_cap {self.delta_cap}")

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    @property
    def metric(self) -> Optional[Metric]:
        return self.balls[0].metric if self.balls else None

    @property
    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls], dtype=float)

    @property
    def centers(self) -> np.ndarray:
        if not self.balls:
            return np.zeros((0, 0), dtype=complex)
        return np.array([b.center for b in self.balls])

    def contains(self, points) -> np.ndarray:
        """Boolean mask: which of ``points`` lie in some ball of the cover."""
        if not self.balls:
            return np.zeros(as_points(points).shape[0], dtype=bool)
        pts = as_points(points, self.balls[0].dim)
        dist = distance_for(self.metric)
        inside = np.zeros(pts.shape[0], dtype=bool)
        for b in self.balls:
            inside |= dist(b.center, pts) <= b.radius
        return inside

    def to_list(self) -> list[dict]:
        return [b.to_dict() for b in self.balls]


def ball_contains(b: MetricBall, z, dist: Callable | None = None) -> bool:
    """Closed-ball membership ``dist(b.center, z) <= b.radius``."""
    z = as_point(z)
    if z.shape != b.center.shape:
        raise DimensionMismatch(f"ball lives in C^{b.dim}, point in C^{z.shape[0]}")
    dist = dist or distance_for(b.metric)
    return bool(dist(b.center, z) <= b.radius)


def content_sum(cover: BallCover | Sequence[MetricBall], p: float) -> float:
    """Power sum of radii, the quantity minimized by Hausdorff content."""
    if not p > 0:
        raise DomainError("content exponent must be positive")
    radii = np.array([b.radius for b in cover], dtype=float)
    return float(np.sum(radii ** p))


def vitali_select(balls: Sequence[MetricBall], expansion: float,
                  dist: Callable | None = None) -> tuple[BallCover, BallCover]:
    """Greedy disjoint subfamily and its ``expansion``-fold dilation.

    Balls are visited by decreasing radius (stable, so ties go to the lower
    index); a ball is kept when it is disjoint from every ball kept so far,
    with a margin of ``DISJOINT_TOL`` so that touching closed balls always
    count as intersecting.
    Each discarded ball then meets a kept ball of radius at least its own,
    so for a metric the dilation by 3 already covers it.
    """
    if expansion < 1:
        raise DomainError("expansion must be >= 1")
    balls = list(balls)
    if not balls:
        return BallCover([]), BallCover([])
    metrics = {b.metric for b in balls}
    if len(metrics) > 1:
        raise MixedMetricError("vitali_select needs balls of a single metric")
    metric = metrics.pop()
    dist = dist or distance_for(metric)
    radii = np.array([b.radius for b in balls])
    centers = np.array([b.center for b in balls])
    order = np.argsort(-radii, kind="stable")
    kept: list[int] = []
    for i in order:
        if kept:
            d = dist(centers[i], centers[kept])
            reach = radii[i] + radii[kept]
            # tangent balls share a point; rounding must not make them disjoint
            if np.any(d <= reach + DISJOINT_TOL * np.maximum(1.0, reach)):
                continue
        kept.append(int(i))
    disjoint = [balls[i] for i in kept]
    expanded = [MetricBall(b.center, b.radius * expansion, metric) for b in disjoint]
    return BallCover(disjoint), BallCover(expanded)


# -- Hausdorff content upper estimate ---------------------------------------

_SCALE_EXPONENTS = range(-40, 21)
_EXACT_CELL_LIMIT = 16


def _cluster_radius(x: np.ndarray, metric: Metric, xs_c: np.ndarray):
    """Center (real coordinates) and radius of a ball around one cluster.

    Exact smallest ball for the Euclidean metric.  For the invariant metric
    the Euclidean center is kept and the radius is the largest pseudo-distance
    to it, which is an upper bound only.
    """
    c, r = min_enclosing_ball(x)
    if metric is Metric.EUCLIDEAN:
        return c, r
    return c, float(np.max(invariant_distance(from_real(c), xs_c)))


def _cell_index(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dense cell labels (in lexicographic key order) and cell sizes."""
    shifted = keys - keys.min(axis=0)
    span = shifted.max(axis=0) + 1
    if np.prod(span.astype(float)) < 2.0 ** 62:
        flat = np.ravel_multi_index(shifted.T, span)
        _, inverse, counts = np.unique(flat, return_inverse=True, return_counts=True)
    else:
        _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    return inverse.ravel(), counts


def _grid_cover(x: np.ndarray, pts: np.ndarray, side: float, offset: float,
                metric: Metric) -> tuple[np.ndarray, np.ndarray]:
    """Group points into axis-aligned cells and cover each cell by one ball.

    Cells with one or two points get their smallest ball.  Larger cells get
    the smallest ball when there are few cells, and otherwise the ball about
    the cell center through the farthest member; both choices only grow
    when points are added, which keeps the estimate monotone.
    """
    keys = np.floor((x - offset) / side).astype(np.int64)
    inverse, counts = _cell_index(keys)
    order = np.argsort(inverse, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    if len(counts) <= _EXACT_CELL_LIMIT or metric is Metric.INVARIANT:
        got = [_cluster_radius(x[order[lo:lo + k]], metric, pts[order[lo:lo + k]])
               for lo, k in zip(starts, counts)]
        return np.array([c for c, _ in got]), np.array([r for _, r in got])
    first = x[order[starts]]
    second = x[order[np.minimum(starts + 1, len(x) - 1)]]
    cell_center = (keys[order[starts]] + 0.5) * side + offset
    far = np.zeros(len(counts))
    np.maximum.at(far, inverse, np.linalg.norm(x - cell_center[inverse], axis=1))
    one, two = counts == 1, counts == 2
    centers = np.where(one[:, None], first, np.where(two[:, None], (first + second) / 2, cell_center))
    radii = np.where(one, 0.0, np.where(two, np.linalg.norm(first - second, axis=1) / 2, far))
    return centers, radii


def hausdorff_content_upper(points, p: float, delta_cap: Optional[float] = None,
                            metric: Metric = Metric.EUCLIDEAN, resolution: float = 0.0,
                            r_min: float = R_MIN) -> tuple[float, BallCover]:
    """Upper bound on ``h^p_delta`` of a point set by an explicit ball cover.

    The point set may stand for a continuum sampled at spacing
    ``resolution``: every ball is then enlarged by ``resolution`` so that the
    cover contains the ``resolution``-neighbourhood of the samples.  With the
    default ``resolution = 0`` the points are taken literally and the
    estimate collapses towards ``len(points) * r_min**p``.

    Candidate covers are the smallest ball around all points plus, for a
    fixed family of dyadic grid sizes and two grid offsets, one ball per
    occupied cell.  The family does not depend on the input, and each cell's
    radius is nondecreasing in the point set, so the returned estimate is
    monotone under adding points (Euclidean metric).  Radii are floored at
    ``r_min``; ties keep the earlier candidate.

    Returns
    -------
    estimate : float
        Power sum of the chosen cover's radii.
    cover : BallCover
    """
    if not p > 0:
        raise DomainError("content exponent must be positive")
    if delta_cap is not None and not delta_cap > 0:
        raise DomainError("delta_cap must be positive")
    if resolution < 0:
        raise DomainError("resolution must be nonnegative")
    pts = as_points(points)
    if pts.shape[0] == 0:
        raise DomainError("hausdorff_content_upper needs at least one point")
    x = to_real(pts)
    cap = np.inf if delta_cap is None else delta_cap

    def finish(centers, radii):
        radii = np.maximum(np.asarray(radii, dtype=float) + resolution, r_min)
        if np.any(radii > cap):
            return None
        return float(np.sum(radii ** p)), centers, radii

    c, r = _cluster_radius(x, metric, pts)
    best = finish(c[None, :], [r])
    for j in _SCALE_EXPONENTS:
        side = 2.0 ** j
        for offset in (0.0, 0.5 * side):
            got = finish(*_grid_cover(x, pts, side, offset, metric))
            if got is not None and (best is None or got[0] < best[0]):
                best = got
    if best is None:
        raise DomainError("no candidate cover respects delta_cap; refine the cap or resolution")
    est, centers, radii = best
    balls = [MetricBall(from_real(c), float(r), metric) for c, r in zip(centers, radii)]
    return est, BallCover(balls, delta_cap)


# -- exclusion-ball engine ---------------------------------------------------

@dataclass(frozen=True)
class ThetaOracle:
    """Projective mass ``t -> theta(z, t)`` seen from many centers at once.

    ``values(points, radii)`` returns an ``(m, T)`` array.  ``jumps(points)``,
    when given, returns an ``(m, K)`` array of radii where ``theta(z, .)``
    may jump (``inf`` for padding); the witness scan then also tests them.
    ``noise`` is the oracle's absolute error floor: a witness needs
    ``theta > A t^alpha + noise``.
    """
    values: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jumps: Optional[Callable[[np.ndarray], np.ndarray]] = None
    provenance: str = "unspecified"
    noise: float = 0.0

    def __call__(self, z, t: float) -> float:
        return float(self.values(as_points(z, None if np.ndim(z) == 0 else len(np.atleast_1d(z))),
                                 np.array([t]))[0, 0])


ZERO_THETA = ThetaOracle(lambda pts, ts: np.zeros((len(pts), len(ts))), provenance="zero")


@dataclass(frozen=True)
class ExclusionParams:
    epsilon: float
    alpha: float
    amplitude: float
    metric: Metric = Metric.EUCLIDEAN
    scan_depth: int = 40
    expansion: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")
        if not 0 < self.alpha <= 2:
            raise DomainError("alpha must lie in (0, 2]")
        if not self.amplitude >= 0:
            raise DomainError("amplitude A must be nonnegative")
        if self.scan_depth < 1:
            raise DomainError("scan_depth must be a positive integer")
        expected = default_expansion(self.metric)
        if self.expansion is None:
            object.__setattr__(self, "expansion", expected)
        elif self.expansion != expected:
            raise DomainError(f"{self.metric.value} metric requires expansion {expected}")

    def scan_radii(self) -> np.ndarray:
        return self.epsilon * 2.0 ** -np.arange(self.scan_depth + 1)


@dataclass
class ExclusionReport:
    good_points: np.ndarray
    bad_points: np.ndarray
    witness_radii: np.ndarray
    selected_disjoint: BallCover
    expanded_cover: BallCover
    content_exponent: float
    content_sum: float
    paper_bound: float
    all_bad_covered: bool
    checks: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """Covering and content conditions, plus any harness-level ``checks``."""
        return bool(self.all_bad_covered and self.content_sum < self.paper_bound
                    and all(self.checks.values()))

    def to_dict(self) -> dict:
        return {
            "good_points": [encode_point(z) for z in self.good_points],
            "bad_points": [{"point": encode_point(z), "witness_radius": float(t)}
                           for z, t in zip(self.bad_points, self.witness_radii)],
            "selected_disjoint": self.selected_disjoint.to_list(),
            "expanded_cover": self.expanded_cover.to_list(),
            "content_exponent": float(self.content_exponent),
            "content_sum": float(self.content_sum),
            "paper_bound": float(self.paper_bound),
            "all_bad_covered": bool(self.all_bad_covered),
            "checks": {k: bool(v) for k, v in sorted(self.checks.items())},
            "pass": self.passed,
            **self.extras,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def witness_radii(theta: ThetaOracle, points, params: ExclusionParams) -> np.ndarray:
    """Vectorized witness search; ``nan`` marks a good point."""
    pts = as_points(points)
    m = pts.shape[0]
    out = np.full(m, np.nan)
    if m == 0:
        return out
    scan = params.scan_radii()
    vals = np.asarray(theta.values(pts, scan), dtype=float)
    hit = vals > params.amplitude * scan ** params.alpha + theta.noise
    has = hit.any(axis=1)
    # scan is decreasing, so the first hit is the largest radius
    out[has] = scan[np.argmax(hit[has], axis=1)]
    if theta.jumps is not None:
        jumps = np.asarray(theta.jumps(pts), dtype=float)
        for i in range(m):
            cand = jumps[i][(jumps[i] > 0) & (jumps[i] <= params.epsilon)]
            if cand.size == 0:
                continue
            cand = np.unique(cand)[::-1]
            v = np.asarray(theta.values(pts[i:i + 1], cand), dtype=float)[0]
            ok = v > params.amplitude * cand ** params.alpha + theta.noise
            if ok.any():
                t = cand[np.argmax(ok)]
                out[i] = t if np.isnan(out[i]) else max(out[i], t)
    return out


def witness_radius_search(theta: ThetaOracle, z, params: ExclusionParams) -> Optional[float]:
    """Largest scanned ``t <= epsilon`` with ``theta(z, t) > A t^alpha``.

    Scanned radii are ``epsilon * 2^-k`` for ``k = 0..scan_depth``, plus the
    oracle's jump radii when it exposes them.  ``None`` means ``z`` is good
    at scan resolution.
    """
    z = as_point(z)
    t = witness_radii(theta, z[None, :], params)[0]
    return None if np.isnan(t) else float(t)


def euclidean_paper_bound(n: int, R: float, eta: float, alpha: float,
                          mass_bound: float = 1.0) -> float:
    """``mass * 5^(2n-2) (R + eta)^(2n-2) eta^alpha / alpha``."""
    return mass_bound * 5.0 ** (2 * n - 2) * (R + eta) ** (2 * n - 2) * eta ** alpha / alpha


def invariant_paper_bound(n: int, eta: float, alpha: float) -> float:
    """``9^(n-1) eta^alpha / alpha``."""
    return 9.0 ** (n - 1) * eta ** alpha / alpha


def exclusion_cover(theta: ThetaOracle, samples, params: ExclusionParams,
                    mass_bound: float = 1.0, R: float = 1.0,
                    paper_bound: Optional[float] = None) -> ExclusionReport:
    """Run the exclusion-ball method on a finite sample.

    Samples are split into good points (no witness radius) and bad points;
    every bad point ``z`` gets the witness ball ``B(z, t_z)``, the family is
    thinned by :func:`vitali_select` and dilated by ``params.expansion``.
    The content is the power sum with exponent ``2n - 2 + alpha``.

    ``paper_bound`` defaults to the Euclidean bound with ``eta = 5 epsilon``
    (scaled by ``mass_bound``) or to the invariant bound with
    ``eta = 3 epsilon``; harnesses with their own bound pass it explicitly.
    """
    pts = as_points(samples)
    n = pts.shape[1]
    if params.metric is Metric.EUCLIDEAN:
        if np.any(norm(pts) > R * (1 + 1e-12)):
            raise DomainError(f"samples must lie in the closed ball of radius {R}")
    elif np.any(norm(pts) >= 1.0):
        raise DomainError("samples must lie in the open unit ball")
    eta = params.expansion * params.epsilon
    if paper_bound is None:
        if params.metric is Metric.EUCLIDEAN:
            paper_bound = euclidean_paper_bound(n, R, eta, params.alpha, mass_bound)
        else:
            paper_bound = invariant_paper_bound(n, eta, params.alpha)
    t = witness_radii(theta, pts, params)
    bad = ~np.isnan(t)
    balls = [MetricBall(z, r, params.metric) for z, r in zip(pts[bad], t[bad])]
    disjoint, expanded = vitali_select(balls, params.expansion)
    p = 2 * n - 2 + params.alpha
    covered = bool(np.all(expanded.contains(pts[bad]))) if bad.any() else True
    logger.debug("exclusion: %d samples, %d bad, %d selected", len(pts), bad.sum(), len(disjoint))
    return ExclusionReport(
        good_points=pts[~bad], bad_points=pts[bad], witness_radii=t[bad],
        selected_disjoint=disjoint, expanded_cover=expanded, content_exponent=p,
        content_sum=content_sum(expanded, p) if len(expanded) else 0.0,
        paper_bound=float(paper_bound), all_bad_covered=covered)
