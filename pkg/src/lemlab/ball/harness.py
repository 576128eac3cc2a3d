"""Green potentials on the unit ball and the invariant exclusion harnesses."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from ..cover import (ExclusionParams, ExclusionReport, Metric, ThetaOracle, exclusion_cover,
                     invariant_paper_bound)
from ..errors import DomainError
from ..points import POLE, as_point, as_points, norm, uniform_ball
from ..potentials import (AtomicMeasure, PshOracle, Provenance, SphereQuadrature,
                          default_quadrature, invariant_theta, numeric_theta_oracle,
                          sphere_means, tau_constant, theta_from_sphere_means)
from .mobius import green_value, invariant_distance, kappa_constant, moebius_apply, poisson_szego

#: c_1 is exact (projective and Riesz masses agree in one variable), doubled
#: like the numerical estimates.
C_ONE = 2.0


@dataclass(frozen=True)
class GreenPotentialSpec:
    """Poles ``a_k`` in the open ball with weights ``w_k > 0``; may be empty."""
    poles: np.ndarray
    weights: np.ndarray
    dim: int = 1

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        poles = np.asarray(self.poles, dtype=complex).reshape(w.size, self.dim)
        if np.any(w <= 0):
            raise DomainError("pole weights must be positive")
        if w.size and np.any(norm(poles) >= 1):
            raise DomainError("poles must lie strictly inside the unit ball")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "weights", w)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def measure(self) -> Optional[AtomicMeasure]:
        return AtomicMeasure(self.poles, self.weights) if self.weights.size else None


def green_potential(spec: GreenPotentialSpec, z) -> np.ndarray:
    """``sum_k w_k G_{a_k}(z)``; :data:`POLE` exactly at the poles."""
    pts = as_points(z, spec.dim)
    out = np.zeros(pts.shape[0])
    for a, w in zip(spec.poles, spec.weights):
        g = green_value(a, pts)
        out = np.where(np.isneginf(g) | np.isneginf(out), POLE, out + w * np.where(np.isneginf(g), 0, g))
    return out


def green_oracle(spec: GreenPotentialSpec) -> PshOracle:
    """Oracle for an atomic Green potential.

    In one variable the invariant projective mass is the exact count
    ``sum of w_k with d_B(a_k, z) <= t``; in higher dimension it falls
    back to sphere means of the pulled-back potential.
    """
    mu = spec.measure()
    inv = None
    if spec.dim == 1:
        if mu is None:
            inv = ThetaOracle(lambda p, t: np.zeros((len(p), len(t))), provenance="zero")
        else:
            inv = mu.counting_theta(Metric.INVARIANT)
    return PshOracle(spec.dim, lambda pts: green_potential(spec, pts), Provenance.EXACT_ATOMIC_GREEN,
                     None, inv, mu, label="green")


def poisson_szego_integral(V: PshOracle, z, quad: Optional[SphereQuadrature] = None) -> np.ndarray:
    """``P_V(z) = int P(z, zeta) V(zeta) dsigma(zeta)`` for one or many ``z``."""
    q = quad or default_quadrature(V.dim)
    pts = as_points(z, V.dim)
    bv = np.asarray(V.func(q.nodes), dtype=float)
    if np.any(~np.isfinite(bv)):
        raise DomainError("V must be finite on the unit sphere")
    return np.array([np.mean(poisson_szego(p, q.nodes) * bv) for p in pts])


def _green_term(V: PshOracle, z, quad, h: float, t_min: float) -> float:
    """``int_0^1 theta_V(z, t) dt / t`` with invariant theta (Richardson)."""
    f = lambda u: invariant_theta(V, z, math.exp(u), quad, h, richardson=True)
    val, _ = integrate.quad(f, math.log(t_min), 0.0, epsabs=1e-11, epsrel=1e-10, limit=100)
    return val


def jensen_ps_residual(V: PshOracle, z, quad: Optional[SphereQuadrature] = None,
                       h: float = 0.05, t_min: float = 1e-4) -> float:
    """``|V(z) - P_V(z) + int_0^1 theta_V(z, t) dt / t|``.

    ``V`` must be smooth on a neighbourhood of the closed ball: the
    derivative stencil near ``t = 1`` evaluates slightly outside.  Mass
    below ``t_min`` is neglected, which is harmless for smooth ``V``.
    """
    z = as_point(z, V.dim)
    val = V(z)
    if not np.isfinite(val):
        raise DomainError("V must be finite at z")
    pv = float(poisson_szego_integral(V, z, quad)[0])
    return abs(val - pv + _green_term(V, z, quad, h, t_min))


# -- the constant c_n ---------------------------------------------------------

def _sphere_area(n: int) -> float:
    """Surface area of the unit sphere of C^n = R^(2n)."""
    return 2 * math.pi ** n / math.factorial(n - 1)


def _reg_laplacian(x2: np.ndarray, delta: float, d: int) -> np.ndarray:
    """Laplacian in R^d of ``0.5 log(|x|^2 + delta^2)`` as a function of ``|x|^2``."""
    return ((d - 2) * x2 + d * delta ** 2) / (x2 + delta ** 2) ** 2


def pseudo_ball_mass(a, delta: float, z, r: float, quad: SphereQuadrature, radial: int = 32) -> float:
    """Riesz mass of ``0.5 log(|w - a|^2 + delta^2)`` on the pseudo-ball ``omega_z(r)``.

    Pulls the integral back by ``Phi_z``, whose real Jacobian is
    ``((1 - |z|^2) / |1 - <w, z>|^2)^(n+1)``, and integrates over ``B_r``
    in polar form (Gauss-Legendre in the radius, sphere nodes in angle).
    """
    a = as_point(a)
    z = as_point(z, a.size)
    n = a.size
    x, wx = np.polynomial.legendre.leggauss(radial)
    rho = 0.5 * r * (x + 1)
    wrho = 0.5 * r * wx
    total = 0.0
    zz = float(np.sum(np.abs(z) ** 2))
    for rr, wr in zip(rho, wrho):
        w = rr * quad.nodes
        zeta = moebius_apply(z, w)
        jac = ((1 - zz) / np.abs(1 - w @ np.conj(z)) ** 2) ** (n + 1)
        lap = _reg_laplacian(np.sum(np.abs(zeta - a) ** 2, axis=1), delta, 2 * n)
        total += wr * rr ** (2 * n - 1) * np.mean(lap * jac)
    return total * _sphere_area(n) / (2 * math.pi)


def c_n_ratios(n: int, seed: int = 0, trials: int = 12, node_count: int = 20_000,
               z_max: float = 0.5, radii=(1 / 3, 1 / 6, 1 / 12)) -> np.ndarray:
    """Battery of ``theta_V(z, r) r^(2n-2) / mu_V(omega_z(r))`` ratios.

    Test potentials are regularized logarithmic poles
    ``0.5 log(|w - a|^2 + delta^2)`` with the pole placed inside the
    pseudo-ball, where the ratio is largest.
    """
    rng = np.random.default_rng(seed)
    q = SphereQuadrature.create(n, node_count if n > 1 else 1024, seed)
    out = []
    for _ in range(trials):
        z = uniform_ball(rng, 1, n, z_max)[0]
        delta = float(rng.choice([0.02, 0.05, 0.1]))
        for r in radii:
            a = moebius_apply(z, uniform_ball(rng, 1, n, 0.8 * r)[0])
            V = PshOracle(n, lambda p, a=a, d=delta: 0.5 * np.log(np.sum(np.abs(p - a) ** 2, axis=1) + d * d))
            theta = invariant_theta(V, z, r, q, richardson=True)
            out.append(theta * r ** (2 * n - 2) / pseudo_ball_mass(a, delta, z, r, q))
    return np.array(out)


@functools.lru_cache(maxsize=None)
def estimate_c_n(n: int, seed: int = 0) -> float:
    """Empirical constant of the projective-mass comparison, doubled.

    ``n = 1`` is exact: both masses count the same measure, the ratio is 1
    and the doubled constant is 2.
    """
    if n == 1:
        return C_ONE
    return 2.0 * float(np.max(c_n_ratios(n, seed)))


# -- harnesses ----------------------------------------------------------------

def _check_in_ball(samples, dim, radius=1.0):
    pts = as_points(samples, dim)
    if np.any(norm(pts) >= radius):
        raise DomainError(f"samples must lie in the open ball of radius {radius}")
    return pts


def _invariant_report(V: PshOracle, pts, eta, alpha, amplitude, quad, scan_depth=40) -> ExclusionReport:
    params = ExclusionParams(eta / 3, alpha, amplitude, Metric.INVARIANT, scan_depth)
    theta = V.theta_oracle(Metric.INVARIANT, quad)
    return exclusion_cover(theta, pts, params, paper_bound=invariant_paper_bound(V.dim, eta, alpha))


def _theta_at(V: PshOracle, pts, s, quad) -> np.ndarray:
    if len(pts) == 0:
        return np.zeros(0)
    if V.invariant_theta is not None:
        return V.invariant_theta.values(pts, np.array([s]))[:, 0]
    return numeric_theta_oracle(V, Metric.INVARIANT, quad).values(pts, np.array([s]))[:, 0]


def lemma51_harness(spec: GreenPotentialSpec, s: float, eta: float, alpha: float, samples,
                    c_n: Optional[float] = None, quad: Optional[SphereQuadrature] = None,
                    _allow_s_one: bool = False) -> ExclusionReport:
    """Invariant exclusion for a Green potential plus the lower bound at good points.

    Runs the exclusion engine with expansion 3, ``epsilon = eta / 3`` and
    ``A = alpha c_n mu(B) epsilon^-alpha``; checks
    ``G(z) >= -theta(z, s) log(3/eta) - c_n mu(B) log(e/s)`` at every good
    sample.
    """
    if not (0 < s < 1 or (_allow_s_one and s == 1)):
        raise DomainError("lemma51_harness needs 0 < s < 1")
    if not 0 < eta < min(3 * s, 1):
        raise DomainError("need 0 < eta < min(3 s, 1)")
    if not 0 < alpha <= 2:
        raise DomainError("alpha must lie in (0, 2]")
    V = green_oracle(spec)
    pts = _check_in_ball(samples, spec.dim)
    cn = estimate_c_n(spec.dim) if c_n is None else c_n
    mu = spec.total_weight
    eps = eta / 3
    rep = _invariant_report(V, pts, eta, alpha, alpha * cn * mu * eps ** -alpha, quad)
    good = rep.good_points
    bound = -_theta_at(V, good, s, quad) * math.log(3 / eta) - cn * mu * math.log(math.e / s)
    vals = V(good) if len(good) else np.zeros(0)
    viol = int(np.sum(vals < bound))
    rep.checks["lower_bound"] = viol == 0
    rep.extras.update({"c_n_estimate": cn, "s": s, "eta": eta, "alpha": alpha, "mass": mu,
                       "lower_bound_violations": viol,
                       "min_margin": float(np.min(vals - bound)) if len(good) else None})
    return rep


def prop52_harness(spec: GreenPotentialSpec, eta: float, alpha: float, samples,
                   c_n: Optional[float] = None) -> ExclusionReport:
    """Atomic reading of the Cegrell-class bound ``phi >= -log(C / eta)``.

    Runs :func:`lemma51_harness` at ``s = 1``, where ``theta(z, 1)`` is the
    total weight, and emits ``C = 3 exp(c_n mu(B))``.
    """
    if spec.total_weight > 1 + 1e-12:
        raise DomainError("total weight must be <= 1")
    rep = lemma51_harness(spec, 1.0, eta, alpha, samples, c_n, _allow_s_one=True)
    cn = rep.extras["c_n_estimate"]
    C = 3 * math.exp(cn * spec.total_weight)
    good = rep.good_points
    vals = green_potential(spec, good) if len(good) else np.zeros(0)
    viol = int(np.sum(vals < -math.log(C / eta)))
    rep.checks["phi_bound"] = viol == 0
    rep.extras.update({"C": C, "phi_bound_violations": viol})
    return rep


def total_ball_mass(V: PshOracle, quad: Optional[SphereQuadrature] = None) -> float:
    """Riesz mass of the closed unit ball."""
    if V.measure is not None and V.provenance in (Provenance.EXACT_ATOMIC_1D, Provenance.EXACT_ATOMIC_GREEN):
        return float(V.measure.weights[norm(V.measure.locations) <= 1].sum())
    theta = theta_from_sphere_means(V, np.zeros(V.dim), 1.0, quad, richardson=True)
    return tau_constant(V.dim) * max(theta, 0.0)


def theorem53_harness(V: PshOracle, rho: float, s: float, eta: float, alpha: float, samples,
                      c_n: Optional[float] = None, quad: Optional[SphereQuadrature] = None,
                      tol: float = 1e-12) -> ExclusionReport:
    """Poisson-Szego plus Green split of a nonpositive psh function.

    Checks ``P_V(z) >= kappa_n(rho) * mean_sphere V`` at every sample (exact
    on the quadrature nodes since ``V <= 0`` and ``P <= kappa``), runs the
    invariant exclusion on ``theta_V`` and checks the combined lower bound
    ``V(z) >= kappa mean V - theta(z, s) log(3/eta) - c_n mu(B) log(e/s)``
    at the good samples.
    """
    if not 0 < s < 1:
        raise DomainError("need 0 < s < 1")
    if not 0 < eta < min(s, 1 / 3):
        raise DomainError("need 0 < eta < min(s, 1/3)")
    kappa = kappa_constant(rho, V.dim)
    pts = _check_in_ball(samples, V.dim, rho * (1 + 1e-12))
    q = quad or default_quadrature(V.dim)
    bv = np.asarray(V.func(q.nodes), dtype=float)
    sv = np.asarray(V.func(pts), dtype=float)
    if np.any(bv > tol) or np.any(sv > tol):
        raise DomainError("V must be <= 0 on the closed ball")
    bmean = float(np.mean(bv[np.isfinite(bv)]))
    cn = estimate_c_n(V.dim) if c_n is None else c_n
    mu = total_ball_mass(V, quad)
    eps = eta / 3
    rep = _invariant_report(V, pts, eta, alpha, alpha * cn * mu * eps ** -alpha, quad)
    pv = poisson_szego_integral(V, pts, q)
    pv_ok = pv >= kappa * bmean - tol
    good = rep.good_points
    bound = kappa * bmean - _theta_at(V, good, s, quad) * math.log(3 / eta) - cn * mu * math.log(math.e / s)
    vals = V(good) if len(good) else np.zeros(0)
    viol = int(np.sum(vals < bound))
    rep.checks["poisson_minorant"] = bool(np.all(pv_ok))
    rep.checks["lower_bound"] = viol == 0
    rep.extras.update({"kappa": kappa, "rho": rho, "s": s, "eta": eta, "alpha": alpha,
                       "c_n_estimate": cn, "mass": mu, "boundary_mean": bmean,
                       "poisson_violations": int(np.sum(~pv_ok)), "lower_bound_violations": viol})
    return rep
