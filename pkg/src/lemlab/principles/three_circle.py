"""Three-circle maximum and minimum principles on Euclidean balls."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from ..ball.harness import estimate_c_n
from ..ball.mobius import kappa_constant
from ..cover import (BallCover, ExclusionParams, ExclusionReport, Metric, ThetaOracle, exclusion_cover,
                     hausdorff_content_upper, invariant_paper_bound)
from ..errors import DomainError
from ..points import as_point, as_points, norm, to_real
from ..potentials import (AtomicMeasure, PshOracle, Provenance, SphereQuadrature, default_quadrature,
                          lelong_number, numeric_theta_oracle, sphere_means, tau_constant,
                          theta_from_sphere_means)


def nu_constant(sigma: float, tau: float) -> float:
    """``1 / log((1 + sigma tau) / (sigma + tau))``."""
    if not 0 < sigma <= tau < 1:
        raise DomainError("need 0 < sigma <= tau < 1")
    return 1.0 / math.log((1 + sigma * tau) / (sigma + tau))


def rho_constant(sigma: float, tau: float) -> float:
    """``log(tau / sigma) / log(1 / sigma)``."""
    if not 0 < sigma <= tau < 1:
        raise DomainError("need 0 < sigma <= tau < 1")
    return math.log(tau / sigma) / math.log(1 / sigma)


@dataclass(frozen=True)
class ThreeCircleParams:
    sigma: float
    tau: float
    nu: float
    eta: float
    alpha: float
    R: float = 1.0
    patches: int = 1

    def __post_init__(self):
        nu0 = nu_constant(self.sigma, self.tau)
        if not self.nu > nu0:
            raise DomainError(f"nu must exceed nu(sigma, tau) = {nu0:.6g}")
        if not 0 < self.eta < 1 / 3:
            raise DomainError("eta must lie in (0, 1/3)")
        if not 0 < self.alpha <= 2:
            raise DomainError("alpha must lie in (0, 2]")
        if not self.R > 0 or self.patches < 1:
            raise DomainError("need R > 0 and at least one patch")


# -- sups over balls ----------------------------------------------------------

def ball_sup(V: PshOracle, radius: float, quad: Optional[SphereQuadrature] = None,
             refine: bool = True) -> tuple[float, float]:
    """Sup of ``V`` over the closed ball ``B_radius`` and a sampling-slack estimate.

    By the maximum principle the sup is attained on the sphere, which is
    sampled (2^12 nodes at n = 1, 10^5 at n >= 2).  In one variable the best
    node is refined by a bounded scalar search and the slack is 0; otherwise
    the slack is the gap between the full node set and a quarter of it.
    """
    q = quad or default_quadrature(V.dim, 4096 if V.dim == 1 else 100_000)
    vals = np.asarray(V.func(radius * q.nodes), dtype=float)
    best = int(np.argmax(vals))
    top = float(vals[best])
    if V.dim == 1 and refine:
        phi0 = float(np.angle(q.nodes[best, 0]))
        step = 2 * np.pi / q.node_count
        f = lambda p: -float(V.func(np.array([[radius * np.exp(1j * p)]]))[0])
        res = minimize_scalar(f, bounds=(phi0 - step, phi0 + step), method="bounded",
                              options={"xatol": 1e-12})
        return max(top, -float(res.fun)), 0.0
    quarter = float(np.max(vals[: max(1, q.node_count // 4)]))
    return top, top - quarter


@dataclass
class ThreeCircleMaxReport:
    sigma: float
    tau: float
    R: float
    rho: float
    sup_inner: float
    sup_outer: float
    tolerance: float
    violations: int
    max_excess: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "tau": self.tau, "R": self.R, "rho": self.rho,
                "sup_inner": self.sup_inner, "sup_outer": self.sup_outer, "tolerance": self.tolerance,
                "violations": self.violations, "max_excess": self.max_excess, "samples": self.samples,
                "pass": self.passed}


def three_circle_max_check(V: PshOracle, sigma: float, tau: float, R: float, samples,
                           quad: Optional[SphereQuadrature] = None, tol: float = 1e-9) -> ThreeCircleMaxReport:
    """``V(z) <= M(sigma R) + rho (M(R) - M(sigma R))`` on samples of ``B_{tau R}``."""
    rho = rho_constant(sigma, tau)
    pts = as_points(samples, V.dim)
    if np.any(norm(pts) > tau * R * (1 + 1e-12)):
        raise DomainError("samples must lie in B_{tau R}")
    ms, e1 = ball_sup(V, sigma * R, quad)
    m1, e2 = ball_sup(V, R, quad)
    slack = tol + e1 + e2
    excess = V(pts) - (ms + rho * (m1 - ms))
    return ThreeCircleMaxReport(sigma, tau, R, rho, ms, m1, slack, int(np.sum(excess > slack)),
                                float(excess.max()) if len(pts) else -np.inf, len(pts))


# -- Lelong bound -------------------------------------------------------------

@dataclass
class LelongBoundReport:
    estimate: float
    bound: float
    holds: bool
    ratios: list

    def __float__(self):
        return self.estimate

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "bound": self.bound, "holds": self.holds, "ratios": self.ratios}


def lelong_bound_check(u: PshOracle, sigma: float, tau: float, z, tol: float = 0.05,
                       norm_tol: float = 1e-6, r_seq=None) -> LelongBoundReport:
    """Lelong number of ``u`` at ``z`` against ``nu(sigma, tau)``.

    ``u`` must satisfy ``u <= 1`` on the unit ball and ``max u >= 0`` on
    ``B_sigma`` (both checked on the spheres) and ``|z| <= tau``.
    """
    nu = nu_constant(sigma, tau)
    z = as_point(z, u.dim)
    if norm(z) > tau * (1 + 1e-12):
        raise DomainError("z must satisfy |z| <= tau")
    top, e1 = ball_sup(u, 1.0)
    inner, e2 = ball_sup(u, sigma)
    if top > 1 + norm_tol + e1 or inner < -norm_tol - e2:
        raise DomainError(f"normalization violated: sup_B u = {top:.6g}, sup_B_sigma u = {inner:.6g}")
    est = lelong_number(u, z, r_seq)
    return LelongBoundReport(est.value, nu, bool(est.value <= nu + tol), est.ratios.tolist())


# -- minimum principle --------------------------------------------------------

@dataclass
class _Normalized:
    W: PshOracle
    ms: float
    m1: float
    slack: float
    measure: Optional[AtomicMeasure]


def _normalize(V: PshOracle, sigma: float, R: float, quad) -> _Normalized:
    """``W(w) = u(R w) - 1`` with ``u = (V - M_sigma) / (M_1 - M_sigma)``."""
    ms, e1 = ball_sup(V, sigma * R, quad)
    m1, e2 = ball_sup(V, R, quad)
    gap = m1 - ms
    if not gap > 1e-12 * max(1.0, abs(m1)):
        raise DomainError("V is constant on B_R: the normalization divides by zero")
    f = V.func
    W = PshOracle(V.dim, lambda w: (f(R * w) - ms) / gap - 1.0, V.provenance, label="three-circle W")
    mu = None
    if V.measure is not None and V.provenance is Provenance.EXACT_ATOMIC_1D:
        inside = norm(V.measure.locations) < R
        if np.any(inside):
            mu = AtomicMeasure(V.measure.locations[inside] / R, V.measure.weights[inside] / gap)
    return _Normalized(W, ms, m1, e1 + e2, mu)


def three_circle_min_harness(V: PshOracle, params: ThreeCircleParams, samples,
                             quad: Optional[SphereQuadrature] = None, c_n: Optional[float] = None,
                             lb_fraction: float = 0.999, tol: float = 1e-9) -> ExclusionReport:
    """Three-circle minimum principle with a harness-emitted constant ``C``.

    ``V`` is normalized to ``u`` (``u <= 1`` on ``B_R``, ``sup u = 0`` on
    ``B_{sigma R}``) and rescaled to the unit ball, where ``W = u - 1 <= 0``.
    The invariant exclusion of the unit-ball lemma is run on ``W``; ``s`` is
    the largest dyadic radius at which ``theta_W(z, s) <= nu`` at all samples,
    and the constant is ``C = exp(K / nu)`` with
    ``K = 1 + nu log 3 - kappa mean(W) + c_n mu_W(B) log(e / s)``, so that the
    unit-ball bound at good samples reads ``u(z) >= nu log(eta / C)``.

    The content reported is ``sum (R r_j)^(2n-2+alpha)``, an upper bound for
    the Euclidean content since a pseudo-ball of radius ``r`` sits in a
    Euclidean ball of radius ``r``; the bound is
    ``N 9^(n-1) (R e)^(2n-2+alpha) eta^alpha / alpha``.
    """
    p = params
    n = V.dim
    pts = as_points(samples, n)
    if np.any(norm(pts) > p.tau * p.R * (1 + 1e-12)):
        raise DomainError("samples must lie in B_{tau R}")
    nz = _normalize(V, p.sigma, p.R, quad)
    W = nz.W
    w_pts = pts / p.R
    q = quad or default_quadrature(n)
    kappa = kappa_constant(p.tau, n)
    m_W = float(sphere_means(W, np.zeros(n), [1.0], q)[0])
    cn = estimate_c_n(n) if c_n is None else c_n
    if nz.measure is not None:
        theta = nz.measure.counting_theta(Metric.INVARIANT)
        mu = nz.measure.total_mass
        probes = np.vstack([w_pts, nz.measure.locations[norm(nz.measure.locations) <= p.tau]])
    elif V.provenance is Provenance.EXACT_ATOMIC_1D:
        # every atom lies outside B_R: W is harmonic on the ball
        theta = ThetaOracle(lambda a, t: np.zeros((len(a), len(t))), provenance="zero")
        mu = 0.0
        probes = w_pts
    else:
        theta = numeric_theta_oracle(W, Metric.INVARIANT, q)
        mu = tau_constant(n) * max(theta_from_sphere_means(W, np.zeros(n), 1.0, q, richardson=True), 0.0)
        probes = w_pts
    # largest dyadic s with theta_W(., s) <= nu on the probes, subject to eta < 3 s
    s, s_ok = None, False
    for k in range(0, 30):
        cand = 0.5 * 2.0 ** -k
        if cand <= p.eta / 3:
            break
        s = cand
        if len(probes) == 0 or np.max(theta.values(probes, np.array([s]))) <= p.nu:
            s_ok = True
            break
    if s is None:
        raise DomainError("eta too large for any admissible s")
    K0 = 1 + p.nu * math.log(3) - kappa * m_W + cn * mu * math.log(math.e / s)
    C = math.exp(K0 / p.nu)
    eps = p.eta / 3
    params_x = ExclusionParams(eps, p.alpha, p.alpha * cn * mu * eps ** -p.alpha, Metric.INVARIANT)
    rep = exclusion_cover(theta, w_pts, params_x, paper_bound=invariant_paper_bound(n, p.eta, p.alpha))
    good = rep.good_points * p.R
    floor = nz.ms + p.nu * math.log(p.eta / C) * (nz.m1 - nz.ms)
    vals = V(good) if len(good) else np.zeros(0)
    ok = vals >= floor - tol - nz.slack
    frac = float(ok.mean()) if len(good) else 1.0
    theta_s = theta.values(rep.good_points, np.array([s]))[:, 0] if len(good) else np.zeros(0)
    w_bound = kappa * m_W - theta_s * math.log(3 / p.eta) - cn * mu * math.log(math.e / s)
    w_vals = W(rep.good_points) if len(good) else np.zeros(0)
    expo = 2 * n - 2 + p.alpha
    inv_content, inv_bound = rep.content_sum, rep.paper_bound
    rep.content_sum = float(np.sum((p.R * rep.expanded_cover.radii) ** expo)) if len(rep.expanded_cover) else 0.0
    rep.paper_bound = p.patches * 9.0 ** (n - 1) * (p.R * math.e) ** expo * p.eta ** p.alpha / p.alpha
    rep.good_points = good
    rep.bad_points = rep.bad_points * p.R
    rep.checks["eq_lb"] = frac >= lb_fraction
    rep.extras.update({
        "sigma": p.sigma, "tau": p.tau, "nu": p.nu, "nu_sigma_tau": nu_constant(p.sigma, p.tau),
        "eta": p.eta, "alpha": p.alpha, "R": p.R, "s": s, "s_condition_met": s_ok, "C": C,
        "kappa": kappa, "rho": p.tau, "c_n_estimate": cn, "mass": mu, "boundary_mean_W": m_W,
        "sup_inner": nz.ms, "sup_outer": nz.m1, "lower_bound": floor, "eq_lb_fraction": frac,
        "eq_lb_violations": int(np.sum(~ok)), "unit_ball_bound_violations": int(np.sum(w_vals < w_bound - tol)),
        "invariant_content_sum": inv_content, "invariant_paper_bound": inv_bound,
        "cover_scale": p.R})
    return rep


def corollary64_harness(V: PshOracle, eta: float, alpha: float, R: float, samples,
                        quad: Optional[SphereQuadrature] = None, sigma: float = 1e-3,
                        c_n: Optional[float] = None) -> ExclusionReport:
    """``V(z) >= -log(C/eta) max_{B_{2eR}} V`` on ``B_R`` for ``V(0) = 0``.

    Delegates to :func:`three_circle_min_harness` at radius ``2eR`` with
    ``tau = 1/(2e)``, ``sigma = 10^-3`` and ``nu = 1``.  The content bound
    is ``9^(n-1) (R e)^(2n-2+alpha) eta^alpha / alpha`` with the original
    ``R``.
    """
    v0 = V(np.zeros(V.dim))
    if not abs(v0) <= 1e-9:
        raise DomainError(f"V(0) must be 0, got {v0}")
    pts = as_points(samples, V.dim)
    Rt = 2 * math.e * R
    n = V.dim
    expo = 2 * n - 2 + alpha
    bound = 9.0 ** (n - 1) * (R * math.e) ** expo * eta ** alpha / alpha
    top, _ = ball_sup(V, Rt, quad)
    if top <= 1e-12:
        # a psh function with V(0) = 0 = max is constant: nothing to exclude
        rep = ExclusionReport(pts, pts[:0], np.zeros(0), BallCover([]), BallCover([]), expo, 0.0, bound, True)
        rep.extras.update({"R": R, "R_tilde": Rt, "vacuous": True})
        return rep
    params = ThreeCircleParams(sigma, 1 / (2 * math.e), 1.0, eta, alpha, Rt)
    rep = three_circle_min_harness(V, params, pts, quad, c_n)
    C = rep.extras["C"]
    vals = V(rep.good_points) if len(rep.good_points) else np.zeros(0)
    ok = vals >= -math.log(C / eta) * top - 1e-9
    rep.checks["mp2"] = bool(np.all(ok))
    rep.paper_bound = bound
    rep.extras.update({"R": R, "R_tilde": Rt, "max_outer": top, "mp2_violations": int(np.sum(~ok)),
                       "vacuous": False})
    return rep


def _half_spacing(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    d, _ = cKDTree(to_real(pts)).query(to_real(pts), k=2)
    return 0.5 * float(np.median(d[:, 1]))


@dataclass
class EssentialBound:
    value: float
    removed: int
    content: float
    samples: int

    def __float__(self):
        return self.value


def essential_lower_bound(u: PshOracle, p: float, eps_content: float, samples,
                          resolution: Optional[float] = None) -> EssentialBound:
    """Lower approximation of the content-essential infimum of ``u``.

    Samples are removed worst-first (lowest value; ties by index) as long
    as the content estimate of the removed set stays ``<= eps_content``; the
    minimum over the rest is returned.  The removed set only grows with
    ``eps_content``, so the result is nondecreasing in it.

    A finite set has zero content, so every ball is widened by
    ``resolution``; by default half the median nearest-neighbour spacing.
    """
    if eps_content < 0:
        raise DomainError("eps_content must be >= 0")
    pts = as_points(samples, u.dim)
    vals = u(pts)
    order = np.argsort(vals, kind="stable")
    if resolution is None:
        resolution = _half_spacing(pts)

    def content(k):
        return hausdorff_content_upper(pts[order[:k]], p, resolution=resolution)[0] if k else 0.0

    lo, hi = 0, len(pts)
    # content is monotone in k: binary search for the largest admissible prefix
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if content(mid) <= eps_content:
            lo = mid
        else:
            hi = mid - 1
    if lo >= len(pts):
        raise DomainError("every sample was removed; eps_content is too large")
    return EssentialBound(float(vals[order[lo]]), lo, content(lo), len(pts))
