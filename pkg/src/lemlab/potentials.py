"""Plurisubharmonic test functions and their exact or quadrature oracles.

A :class:`PshOracle` bundles pointwise values with the projective mass
``theta(z, t)`` and the Riesz ball mass.  Discrete logarithmic potentials in
one variable carry exact counting oracles; everything else falls back to
sphere means, with ``theta`` read off as the log-radius derivative of the
mean (the Poisson-Jensen identity ``m(R) - m(r) = int_r^R theta dt/t``).
"""

from __future__ import annotations

import enum
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .cover import Metric, MetricBall, ThetaOracle
from .errors import DomainError, NormalizationError, NotLelongClass, QuadratureDegeneracy
from .points import POLE, as_point, as_points, from_real, norm

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
DEFAULT_NODES_1D = 4096
DEFAULT_NODES_ND = 200_000
MAX_POLE_FRACTION = 0.01
_CHUNK = 2_000_000


class Provenance(str, enum.Enum):
    EXACT_ATOMIC_1D = "exact_atomic_1d"
    EXACT_ATOMIC_GREEN = "exact_atomic_green"
    NUMERIC_SPHERE_MEAN = "numeric_sphere_mean"


def tau_constant(n: int) -> float:
    """Volume of the unit ball of C^(n-1), ``pi^(n-1) / (n-1)!``."""
    return math.pi ** (n - 1) / math.factorial(n - 1)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("LEMLAB_THREADS", "1")))
    except ValueError:
        return 1


def _map_points(fn, m: int) -> list:
    """Apply ``fn`` to ``range(m)`` in order, threaded up to LEMLAB_THREADS."""
    k = min(thread_count(), m)
    if k <= 1:
        return [fn(i) for i in range(m)]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, range(m)))


# -- quadrature ---------------------------------------------------------------

@dataclass(frozen=True)
class SphereQuadrature:
    """Equal-weight nodes on the unit sphere of C^n.

    ``n = 1`` uses equispaced angles.  For ``n >= 2`` the nodes come from a
    scrambled Sobol sequence: the squared moduli ``|zeta_j|^2`` are uniform
    on the simplex (spacings of sorted uniforms) and the phases uniform,
    which is exactly the normalized surface measure.  Each base node is then
    repeated under the rotations ``zeta -> e^(2 pi i k / 4) zeta`` so that
    means of odd and pluriharmonic terms cancel exactly.
    """
    dim: int
    node_count: int
    seed: int
    nodes: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def create(cls, dim: int, node_count: Optional[int] = None, seed: int = DEFAULT_SEED):
        if dim < 1:
            raise DomainError("dimension must be >= 1")
        if node_count is None:
            node_count = DEFAULT_NODES_1D if dim == 1 else DEFAULT_NODES_ND
        if node_count < 4:
            raise DomainError("need at least 4 quadrature nodes")
        if dim == 1:
            phi = 2 * np.pi * np.arange(node_count) / node_count
            nodes = np.exp(1j * phi)[:, None]
        else:
            base = node_count // 4
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # non power-of-two sample sizes
                u = qmc.Sobol(2 * dim - 1, scramble=True, seed=seed).random(base)
            cuts = np.sort(u[:, : dim - 1], axis=1)
            edges = np.concatenate([np.zeros((base, 1)), cuts, np.ones((base, 1))], axis=1)
            mod = np.sqrt(np.diff(edges, axis=1))
            base_nodes = mod * np.exp(2j * np.pi * u[:, dim - 1:])
            base_nodes /= norm(base_nodes)[:, None]
            rot = np.exp(0.5j * np.pi * np.arange(4))
            nodes = (rot[:, None, None] * base_nodes[None]).reshape(-1, dim)
        return cls(dim, nodes.shape[0], seed, nodes)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.node_count, 1.0 / self.node_count)


_QUAD_CACHE: dict = {}


def default_quadrature(dim: int, node_count: Optional[int] = None,
                       seed: int = DEFAULT_SEED) -> SphereQuadrature:
    key = (dim, node_count, seed)
    if key not in _QUAD_CACHE:
        _QUAD_CACHE[key] = SphereQuadrature.create(dim, node_count, seed)
    return _QUAD_CACHE[key]


# -- measures and oracles -----------------------------------------------------

@dataclass(frozen=True)
class AtomicMeasure:
    """Finite sum of weighted point masses in C^n."""
    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if w.size == 0:
            raise DomainError("atomic measure needs at least one atom")
        loc = np.asarray(self.locations, dtype=complex)
        loc = loc.reshape(len(w), -1) if loc.ndim <= 1 else loc
        loc = as_points(loc)
        if loc.shape[0] != w.size:
            raise DomainError("one weight per atom required")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise DomainError("atom weights must be positive and finite")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple]):
        return cls([as_point(a) for a, _ in pairs], [w for _, w in pairs])

    @property
    def dim(self) -> int:
        return self.locations.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def distances(self, points, metric: Metric = Metric.EUCLIDEAN) -> np.ndarray:
        """``(m, K)`` distances from each point to each atom."""
        pts = as_points(points, self.dim)
        if metric is Metric.EUCLIDEAN:
            return norm(pts[:, None, :] - self.locations[None, :, :])
        from .ball.mobius import invariant_distance
        return invariant_distance(pts[:, None, :], self.locations[None, :, :])

    def counting_theta(self, metric: Metric = Metric.EUCLIDEAN) -> ThetaOracle:
        """Exact ``theta(z, t) = sum of weights with dist(a_k, z) <= t``."""
        w = self.weights

        def values(points, radii):
            d = self.distances(points, metric)
            radii = np.asarray(radii, dtype=float)
            return (w[None, None, :] * (d[:, None, :] <= radii[None, :, None])).sum(axis=2)

        return ThetaOracle(values, lambda pts: self.distances(pts, metric),
                           provenance=f"exact-{metric.value}")


@dataclass(frozen=True)
class PshOracle:
    """Evaluation bundle for a plurisubharmonic function on C^n.

    ``func`` maps an ``(m, n)`` array to ``m`` values, with :data:`POLE` at
    logarithmic poles.  ``euclid_theta`` and ``invariant_theta`` hold exact
    projective-mass oracles when known; otherwise sphere means are used.
    """
    dim: int
    func: Callable[[np.ndarray], np.ndarray]
    provenance: Provenance = Provenance.NUMERIC_SPHERE_MEAN
    euclid_theta: Optional[ThetaOracle] = None
    invariant_theta: Optional[ThetaOracle] = None
    measure: Optional[AtomicMeasure] = None
    label: str = ""

    def __call__(self, z):
        """Values at one point (float) or at an ``(m, n)`` array of points."""
        arr = np.asarray(z, dtype=complex)
        single = arr.ndim == 0 or (arr.ndim == 1 and self.dim > 1) or (arr.ndim == 1 and arr.size == 1)
        pts = as_points(arr, self.dim)
        out = np.asarray(self.func(pts), dtype=float)
        return float(out[0]) if single else out

    def theta(self, z, t: float, quad: Optional[SphereQuadrature] = None, h: float = 0.05) -> float:
        if not t > 0:
            raise DomainError("theta needs t > 0")
        if self.euclid_theta is not None:
            return float(self.euclid_theta.values(as_points(as_point(z, self.dim)[None, :]),
                                                  np.array([t]))[0, 0])
        return theta_from_sphere_means(self, z, t, quad, h)

    def mass(self, ball: MetricBall, quad: Optional[SphereQuadrature] = None) -> float:
        """Riesz mass ``mu_V(ball)`` (exact for atomic oracles)."""
        if ball.metric is Metric.EUCLIDEAN:
            if self.euclid_theta is not None and self.dim == 1:
                return self.theta(ball.center, ball.radius)
            return tau_constant(self.dim) * ball.radius ** (2 * self.dim - 2) * \
                self.theta(ball.center, ball.radius, quad)
        if self.invariant_theta is not None and self.dim == 1:
            return float(self.invariant_theta.values(ball.center[None, :], np.array([ball.radius]))[0, 0])
        raise NotImplementedError("numeric invariant ball masses are not implemented")

    def shifted(self, c: float) -> "PshOracle":
        """``V + c``; projective masses are unchanged."""
        f = self.func
        return replace(self, func=lambda pts: f(pts) + c, label=f"{self.label}{c:+.6g}")

    def theta_oracle(self, metric: Metric = Metric.EUCLIDEAN, quad: Optional[SphereQuadrature] = None,
                     h: float = 0.05) -> ThetaOracle:
        """Projective-mass oracle for the exclusion engine."""
        exact = self.euclid_theta if metric is Metric.EUCLIDEAN else self.invariant_theta
        if exact is not None:
            return exact
        return numeric_theta_oracle(self, metric, quad, h)


# -- constructors -------------------------------------------------------------

def _log_abs(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


def discrete_potential(mu: AtomicMeasure, label: str = "") -> PshOracle:
    """``V(z) = sum_k w_k log|z - a_k|``.

    In one variable the Riesz measure is ``mu`` itself, so ``theta`` and the
    ball masses are exact counting sums.  For ``n >= 2`` only values are
    exact and masses go through sphere means.
    """
    loc, w = mu.locations, mu.weights

    def func(pts):
        d = norm(pts[:, None, :] - loc[None, :, :])
        logs = _log_abs(d)
        out = np.where(np.isneginf(logs), 0.0, logs) @ w
        return np.where(np.any(d == 0, axis=1), POLE, out)

    if mu.dim == 1:
        return PshOracle(1, func, Provenance.EXACT_ATOMIC_1D, mu.counting_theta(), None, mu,
                         label or "discrete")
    return PshOracle(mu.dim, func, Provenance.NUMERIC_SPHERE_MEAN, measure=None,
                     label=label or "discrete")


@dataclass(frozen=True)
class FactoredPolynomial:
    """``lead * prod (z - a_k)^(m_k)`` in one variable."""
    roots: np.ndarray
    multiplicities: np.ndarray
    lead: complex = 1.0

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.roots, dtype=complex))
        m = np.atleast_1d(np.asarray(self.multiplicities, dtype=int)) if np.size(self.multiplicities) \
            else np.zeros(0, dtype=int)
        if r.shape != m.shape:
            raise DomainError("one multiplicity per root required")
        if np.any(m < 1):
            raise DomainError("multiplicities must be positive integers")
        if self.lead == 0:
            raise DomainError("zero polynomial")
        object.__setattr__(self, "roots", r)
        object.__setattr__(self, "multiplicities", m)
        object.__setattr__(self, "lead", complex(self.lead))

    @classmethod
    def from_roots(cls, roots, lead: complex = 1.0):
        """Group repeated roots (exact equality) into multiplicities."""
        r = np.atleast_1d(np.asarray(roots, dtype=complex))
        uniq, counts = [], []
        for a in r:
            for i, b in enumerate(uniq):
                if a == b:
                    counts[i] += 1
                    break
            else:
                uniq.append(a)
                counts.append(1)
        return cls(np.array(uniq, dtype=complex), np.array(counts, dtype=int), lead)

    @classmethod
    def normalized_at_zero(cls, roots):
        """Polynomial with the given roots and value 1 at the origin."""
        p = cls.from_roots(roots)
        if np.any(p.roots == 0):
            raise DomainError("a root at 0 cannot give f(0) = 1")
        return replace(p, lead=1.0 / np.prod((-p.roots) ** p.multiplicities))

    @property
    def degree(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def all_roots(self) -> np.ndarray:
        return np.repeat(self.roots, self.multiplicities)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.lead, dtype=complex)
        for a, m in zip(self.roots, self.multiplicities):
            out = out * (z - a) ** m
        return out

    def log_abs(self, z):
        """``log|P(z)|`` computed factor by factor (no overflow for large d)."""
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, np.log(abs(self.lead)))
        for a, m in zip(self.roots, self.multiplicities):
            out = out + m * _log_abs(np.abs(z - a))
        return out


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in several variables as ``{exponent tuple: coefficient}``; evaluation only."""
    terms: dict
    dim: int

    def __post_init__(self):
        terms = {tuple(int(e) for e in k): complex(c) for k, c in self.terms.items() if c != 0}
        if not terms:
            raise DomainError("zero polynomial")
        if any(len(k) != self.dim for k in terms):
            raise DomainError("exponent tuples must have one entry per variable")
        object.__setattr__(self, "terms", terms)

    @property
    def degree(self) -> int:
        return max(sum(k) for k in self.terms)

    def __call__(self, pts):
        pts = as_points(pts, self.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        for k, c in self.terms.items():
            out += c * np.prod(pts ** np.array(k), axis=1)
        return out


def log_poly_potential(poly, normalize: bool = True) -> PshOracle:
    """``(1/d) log|P|`` (or ``log|P|``) as an oracle.

    A :class:`FactoredPolynomial` yields the exact one-variable oracle of the
    discrete potential over its roots, shifted by the log of the leading
    coefficient.  A :class:`Polynomial` in several variables yields values
    only.
    """
    if isinstance(poly, FactoredPolynomial):
        d = poly.degree
        scale = 1.0 / d if (normalize and d > 0) else 1.0
        shift = scale * math.log(abs(poly.lead))
        if d == 0:
            return PshOracle(1, lambda pts: np.full(pts.shape[0], shift), Provenance.EXACT_ATOMIC_1D,
                             ThetaOracle(lambda p, t: np.zeros((len(p), len(t))), provenance="zero"),
                             label="constant")
        mu = AtomicMeasure(poly.roots[:, None], scale * poly.multiplicities)
        base = discrete_potential(mu, label="log_poly")
        return base.shifted(shift) if shift != 0 else base
    if isinstance(poly, Polynomial):
        d = poly.degree
        scale = 1.0 / d if (normalize and d > 0) else 1.0

        def func(pts):
            v = np.abs(poly(pts))
            return np.where(v == 0, POLE, scale * _log_abs(v))

        return PshOracle(poly.dim, func, Provenance.NUMERIC_SPHERE_MEAN, label="log_poly")
    raise TypeError("expected FactoredPolynomial or Polynomial")


def from_function(dim: int, func: Callable, label: str = "") -> PshOracle:
    """Wrap an arbitrary psh function with numeric oracles."""
    return PshOracle(dim, func, Provenance.NUMERIC_SPHERE_MEAN, label=label)


# -- sphere means -------------------------------------------------------------

def _quad(V_dim: int, quad: Optional[SphereQuadrature]) -> SphereQuadrature:
    quad = quad or default_quadrature(V_dim)
    if quad.dim != V_dim:
        raise DomainError(f"quadrature lives in C^{quad.dim}, potential in C^{V_dim}")
    return quad


def _masked_mean(vals: np.ndarray) -> np.ndarray:
    """Mean over the last axis with pole nodes rejected."""
    if np.any(np.isnan(vals)) or np.any(np.isposinf(vals)):
        raise DomainError("potential returned NaN or +inf on a sphere")
    poles = np.isneginf(vals)
    hit = poles.sum(axis=-1)
    if np.any(hit):
        frac = hit.max() / vals.shape[-1]
        logger.info("sphere mean: rejected %d pole nodes (max fraction %.2e)", hit.sum(), frac)
        if frac > MAX_POLE_FRACTION:
            raise QuadratureDegeneracy(f"{frac:.1%} of sphere nodes hit a pole")
    s = np.where(poles, 0.0, vals).sum(axis=-1)
    return s / (vals.shape[-1] - hit)


def sphere_means(V: PshOracle, center, radii, quad: Optional[SphereQuadrature] = None,
                 transform: Optional[Callable] = None) -> np.ndarray:
    """Means of ``V`` over the spheres ``|w - center| = r`` for each radius.

    With ``transform`` the means are of ``V(transform(w))`` instead, which
    is how pulled-back potentials ``V o Phi_z`` are averaged.
    """
    c = as_point(center, V.dim)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= 0):
        raise DomainError("sphere radii must be positive")
    q = _quad(V.dim, quad)
    out = np.empty(radii.size)
    per = max(1, _CHUNK // q.node_count)
    for lo in range(0, radii.size, per):
        r = radii[lo:lo + per]
        pts = (c[None, None, :] + r[:, None, None] * q.nodes[None, :, :]).reshape(-1, V.dim)
        if transform is not None:
            pts = transform(pts)
        vals = np.asarray(V.func(pts), dtype=float).reshape(r.size, q.node_count)
        out[lo:lo + per] = _masked_mean(vals)
    return out


def sphere_mean(V: PshOracle, center, r: float, quad: Optional[SphereQuadrature] = None) -> float:
    """Equal-weight sphere average of ``V`` over ``|w - center| = r``."""
    return float(sphere_means(V, center, [r], quad)[0])


def _central(mean_fn, t: float, h: float, richardson: bool) -> float:
    def d(step):
        lo, hi = mean_fn(np.array([t * math.exp(-step), t * math.exp(step)]))
        return (hi - lo) / (2 * step)

    if richardson:
        return (4 * d(h / 2) - d(h)) / 3
    return d(h)


def theta_from_sphere_means(V: PshOracle, z, t: float, quad: Optional[SphereQuadrature] = None,
                            h: float = 0.05, richardson: bool = False) -> float:
    """Projective mass as the log-radius derivative of sphere means.

    Returns ``(m(t e^h) - m(t e^-h)) / (2h)`` with ``m(s)`` the sphere mean
    around ``z``.  ``richardson=True`` combines steps ``h`` and ``h/2`` to
    cancel the ``h^2`` term.
    """
    if not t > 0 or not h > 0:
        raise DomainError("theta needs t > 0 and h > 0")
    z = as_point(z, V.dim)
    return _central(lambda rs: sphere_means(V, z, rs, quad), t, h, richardson)


def numeric_theta_oracle(V: PshOracle, metric: Metric = Metric.EUCLIDEAN,
                         quad: Optional[SphereQuadrature] = None, h: float = 0.05,
                         noise: float = 1e-9) -> ThetaOracle:
    """``theta`` from sphere means, in either metric.

    ``noise`` is the error floor below which a value is not evidence of
    mass (rounding of a harmonic mean is ~1e-14).
    The invariant version averages ``V o Phi_z`` around the origin; near
    ``t = 1`` the stencil reaches just outside the ball, where ``V`` must
    still be defined.
    """
    from .ball.mobius import moebius_apply
    q = _quad(V.dim, quad)
    ratio = math.exp(h)

    def one(z, radii):
        grid = np.concatenate([radii / ratio, radii * ratio])
        if metric is Metric.EUCLIDEAN:
            m = sphere_means(V, z, grid, q)
        else:
            if np.any(radii > 1):
                raise DomainError("invariant theta needs t <= 1")
            m = sphere_means(V, np.zeros(V.dim), grid, q, transform=lambda w: moebius_apply(z, w))
        k = radii.size
        return (m[k:] - m[:k]) / (2 * h)

    def values(points, radii):
        pts = as_points(points, V.dim)
        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        return np.array(_map_points(lambda i: one(pts[i], radii), pts.shape[0])).reshape(len(pts), -1)

    return ThetaOracle(values, provenance=f"numeric-{metric.value}", noise=noise)


def invariant_theta(V: PshOracle, z, t: float, quad: Optional[SphereQuadrature] = None,
                    h: float = 0.05, richardson: bool = False) -> float:
    """Invariant projective mass ``theta_V(z, t) = theta_{V o Phi_z}(0, t)``."""
    from .ball.mobius import moebius_apply
    z = as_point(z, V.dim)
    if not 0 < t <= 1:
        raise DomainError("invariant theta needs 0 < t <= 1")
    if V.invariant_theta is not None:
        return float(V.invariant_theta.values(z[None, :], np.array([t]))[0, 0])
    zero = np.zeros(V.dim)
    return _central(lambda rs: sphere_means(V, zero, rs, quad, transform=lambda w: moebius_apply(z, w)),
                    t, h, richardson)


# -- Lelong numbers and Robin means -------------------------------------------

@dataclass
class LelongEstimate:
    value: float
    radii: np.ndarray
    ratios: np.ndarray

    def __float__(self):
        return self.value


def sphere_max(V: PshOracle, center, r: float, quad: Optional[SphereQuadrature] = None) -> float:
    """Sampled maximum of ``V`` on ``|w - center| = r``."""
    c = as_point(center, V.dim)
    q = quad or default_quadrature(V.dim, 4096 if V.dim == 1 else 20_000)
    vals = np.asarray(V.func(c[None, :] + r * q.nodes), dtype=float)
    return float(np.max(vals))


def lelong_number(V: PshOracle, a, r_seq: Optional[Sequence[float]] = None,
                  quad: Optional[SphereQuadrature] = None) -> LelongEstimate:
    """Lelong number at ``a`` from ``max_{|z-a|=r} V / log r``.

    The ratios are fitted by ``c + b / log r`` (the form of the error for a
    function with a logarithmic pole plus a bounded part) and the intercept
    ``c`` is the extrapolated value at ``r -> 0``.
    """
    r_seq = np.asarray(r_seq if r_seq is not None else 10.0 ** -np.arange(2, 9), dtype=float)
    if r_seq.size < 3 or np.any(np.diff(r_seq) >= 0) or r_seq[0] >= 1 or r_seq[-1] <= 0:
        raise DomainError("r_seq must be >= 3 decreasing radii in (0, 1)")
    ratios = np.array([sphere_max(V, a, r, quad) / math.log(r) for r in r_seq])
    x = 1.0 / np.log(r_seq)
    if np.all(np.isfinite(ratios)):
        c, _ = np.polynomial.polynomial.polyfit(x, ratios, 1)
    else:
        c = float("nan")
    return LelongEstimate(float(c), r_seq, ratios)


@dataclass
class RobinEstimate:
    value: float
    error: float
    radii: np.ndarray
    values: np.ndarray

    def __float__(self):
        return self.value


def robin_mean(V: PshOracle, R_seq: Sequence[float] = (1e2, 1e3, 1e4),
               quad: Optional[SphereQuadrature] = None, growth_bound: Optional[float] = None,
               slope_tol: float = 0.01) -> RobinEstimate:
    """``sphere_mean(V, 0, R) - log R`` at the largest ``R``.

    The last difference along ``R_seq`` is reported as the error bar.  A
    log-log slope of the means above ``1 + slope_tol``, or a value above
    ``growth_bound``, is read as growth faster than the Lelong class.
    """
    R = np.asarray(R_seq, dtype=float)
    if R.size < 2 or np.any(np.diff(R) <= 0) or R[-1] < 1e3:
        raise DomainError("R_seq must be increasing with max >= 1e3")
    m = sphere_means(V, np.zeros(V.dim), R, quad)
    slope = np.diff(m) / np.diff(np.log(R))
    if np.any(slope > 1 + slope_tol):
        raise NotLelongClass(f"sphere means grow with log-slope {slope.max():.3f} > 1")
    vals = m - np.log(R)
    if growth_bound is not None and np.any(vals > growth_bound):
        raise NotLelongClass(f"sphere means exceed log R + {growth_bound}")
    return RobinEstimate(float(vals[-1]), float(abs(vals[-1] - vals[-2])), R, vals)


def normalize_log_class(V: PshOracle, quad: Optional[SphereQuadrature] = None,
                        tol: float = 1e-12) -> PshOracle:
    """Shift ``V`` by minus its Robin mean so that it lies in the L_og class."""
    rm = robin_mean(V, quad=quad).value
    if abs(rm) <= tol:
        return V
    return V.shifted(-rm)


def check_log_class(V: PshOracle, quad: Optional[SphereQuadrature] = None, tol: float = 1e-6) -> float:
    """Raise :class:`NormalizationError` unless the Robin mean is 0 within ``tol``."""
    rm = robin_mean(V, quad=quad).value
    if abs(rm) > tol:
        raise NormalizationError(f"Robin mean {rm:.3e} is not 0; call normalize_log_class first")
    return rm


# -- Poisson-Jensen checks ----------------------------------------------------

def _atomic_jump_integral(V: PshOracle, z, r: float, R: float) -> float:
    """``int_r^R theta(z, t) dt / t`` for an exact step oracle."""
    d = V.euclid_theta.jumps(z[None, :])[0]
    w = V.measure.weights if V.measure is not None else np.ones_like(d)
    inside = d <= R
    return float(np.sum(w[inside] * np.log(R / np.maximum(d[inside], r))))


def poisson_jensen_residual(V: PshOracle, r: float, R: float, quad: Optional[SphereQuadrature] = None,
                            center=None, h: float = 0.05, richardson: bool = True) -> float:
    """``|m(R) - m(r) - int_r^R theta(t) dt / t|`` around ``center`` (default 0).

    Exact step oracles integrate piecewise in closed form; otherwise the
    sphere-mean ``theta`` is integrated adaptively in ``log t``.  The plain
    central difference has an ``O(h^2)`` bias (``6e-3`` for ``|z|^2`` on
    ``[0.5, 2]`` at ``h = 0.05``), hence Richardson by default.
    """
    if not 0 < r < R:
        raise DomainError("need 0 < r < R")
    z = np.zeros(V.dim, dtype=complex) if center is None else as_point(center, V.dim)
    lhs = float(np.diff(sphere_means(V, z, [r, R], quad))[0])
    if V.euclid_theta is not None and V.euclid_theta.jumps is not None and V.measure is not None:
        rhs = _atomic_jump_integral(V, z, r, R)
    else:
        rhs, _ = integrate.quad(lambda u: theta_from_sphere_means(V, z, math.exp(u), quad, h, richardson),
                                math.log(r), math.log(R), epsabs=1e-10, epsrel=1e-10, limit=50)
    return abs(lhs - rhs)


def representation_residual(V: PshOracle, z, quad: Optional[SphereQuadrature] = None,
                            R_max: Optional[float] = None, check_normalization: bool = True,
                            t_min: float = 1e-6) -> float:
    """Discrepancy between ``V(z)`` and its Stieltjes reconstruction.

    Uses ``m(R) - V(z) = theta(R) log R - int_0^R log t dtheta(t)`` for
    sphere means ``m`` around ``z``.  Exact step oracles turn the Stieltjes
    integral into a finite sum over the jumps; numeric ones integrate by
    parts from ``t_min``, which needs ``theta(z, t_min)`` negligible.
    """
    z = as_point(z, V.dim)
    val = V(z)
    if val == POLE:
        raise DomainError("z is a pole of V")
    if check_normalization:
        check_log_class(V, quad)
    if V.euclid_theta is not None and V.euclid_theta.jumps is not None and V.measure is not None:
        d = V.euclid_theta.jumps(z[None, :])[0]
        R = R_max or 10.0 * max(1.0, float(d.max()))
        inside = d <= R
        w = V.measure.weights
        theta_R = float(w[inside].sum())
        stieltjes = float(np.sum(w[inside] * np.log(d[inside])))
    else:
        R = R_max or 10.0
        theta_R = theta_from_sphere_means(V, z, R, quad)
        # int_0^R log t dtheta = theta(R) log R - int_0^R theta(t) dt / t
        tail, _ = integrate.quad(lambda u: theta_from_sphere_means(V, z, math.exp(u), quad),
                                 math.log(t_min), math.log(R), limit=200, epsabs=1e-13, epsrel=1e-12)
        stieltjes = theta_R * math.log(R) - tail
    recon = sphere_mean(V, z, R, quad) - theta_R * math.log(R) + stieltjes
    return abs(val - recon)


# -- Lelong formula cross-check -----------------------------------------------

def riesz_mass_grid(V: PshOracle, center, r: float, h: float = 0.02) -> float:
    """``mu_V(B(center, r))`` from a finite-difference Laplacian on a cubic grid.

    Coarse and only meant as an independent cross-check of the sphere-mean
    ``theta`` through ``theta = mu / (tau r^(2n-2))``.  ``V`` must be smooth
    on a neighbourhood of the ball.
    """
    c = as_point(center, V.dim)
    d = 2 * V.dim
    k = int(math.ceil(r / h))
    axis = h * np.arange(-k, k + 1)
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    mesh = mesh[np.linalg.norm(mesh, axis=1) <= r]
    lap = np.zeros(len(mesh))
    base = V.func(from_real(mesh) + c)
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        lap += V.func(from_real(mesh + e) + c) + V.func(from_real(mesh - e) + c) - 2 * base
    lap /= h * h
    return float(lap.sum() * h ** d / (2 * math.pi))


def theta_lelong_formula(V: PshOracle, center, r: float, h: float = 0.02) -> float:
    """``theta = mu(B) / (tau_(2n-2) r^(2n-2))`` with the grid Riesz mass."""
    return riesz_mass_grid(V, center, r, h) / (tau_constant(V.dim) * r ** (2 * V.dim - 2))
