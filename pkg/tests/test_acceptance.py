"""The numbered acceptance battery.

Each test records one PASS/FAIL line through the ``criterion`` fixture; the
lines are repeated in the terminal summary.
"""

import json
import math
import time

import numpy as np
import pytest

from cli_runs import RUNS
from lemlab import cli
from lemlab.ball import kappa_constant, moebius_apply, moebius_ball_radius, poisson_szego
from lemlab.ball.harness import GreenPotentialSpec, lemma51_harness, prop52_harness
from lemlab.points import norm, uniform_ball
from lemlab.potentials import (AtomicMeasure, FactoredPolynomial, SphereQuadrature, default_quadrature,
                               discrete_potential, from_function, log_poly_potential, normalize_log_class,
                               poisson_jensen_residual, representation_residual)
from lemlab.principles import (Disc, PointCloud, Segment, ThreeCircleParams, ball_sup, capacity_1d,
                               cartan_cover, corollary44_check, lelong_bound_check, min_modulus_1d,
                               nu_constant, three_circle_max_check, three_circle_min_harness,
                               theorem42_harness, verify_lemniscate_cover)

pytestmark = pytest.mark.acceptance

SEED = 20240611


def monic_battery(count=100, seed=SEED):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.integers(1, 21))
        yield uniform_ball(rng, d, 1, 2.0)[:, 0]


def normalized_poly_battery(count=50, seed=SEED + 1, degree=8):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        roots = uniform_ball(rng, degree, 1, 2.0)[:, 0]
        yield FactoredPolynomial.normalized_at_zero(roots)


def sphere(rng, k, n):
    g = rng.normal(size=(k, n)) + 1j * rng.normal(size=(k, n))
    return g / norm(g)[:, None]


def test_c01_cartan_boutroux(criterion):
    t0 = time.perf_counter()
    bad_sum = bad_cover = 0
    for roots in monic_battery():
        for eps in (0.05, 0.1, 0.2):
            cov = cartan_cover(roots, eps)
            bad_sum += cov.radii.sum() > 2 * math.e * eps * (1 + 1e-12)
            bad_cover += not verify_lemniscate_cover(roots, eps, cov, 512)
    wall = time.perf_counter() - t0
    criterion(1, "Cartan-Boutroux radius sum and 512x512 lemniscate cover",
              bad_sum == 0 and bad_cover == 0 and wall < 60,
              f"300 runs, sum violations {bad_sum}, cover violations {bad_cover}, {wall:.1f} s")


def test_c02_cartan_alpha(criterion):
    viol = 0
    for roots in monic_battery():
        for eps in (0.05, 0.1, 0.2):
            for alpha in (0.5, 1.0, 2.0):
                cov = cartan_cover(roots, eps, alpha)
                viol += np.sum(cov.radii ** alpha) > math.e * (2 * eps) ** alpha * (1 + 1e-12)
                viol += not verify_lemniscate_cover(roots, eps, cov, 256)
    criterion(2, "Cartan-Boutroux alpha variant", viol == 0, f"900 runs, {viol} violations")


def test_c03_minimum_modulus(criterion):
    viol = checked = 0
    rng = np.random.default_rng(SEED + 3)
    for _ in range(50):
        d = int(rng.integers(1, 13))
        f = FactoredPolynomial.normalized_at_zero(uniform_ball(rng, d, 1, 2.0)[:, 0])
        for eta in (0.1, 0.3):
            rep = min_modulus_1d(f, 1.0, eta)
            viol += rep.violations + (not rep.passed)
            checked += rep.grid_points_checked
    criterion(3, "minimum modulus outside Cartan discs", viol == 0,
              f"100 runs, {checked} grid points, {viol} violations")


def test_c04_theorem42_exact(criterion):
    rng = np.random.default_rng(SEED + 4)
    failures = runs = 0
    for _ in range(100):
        k = int(rng.integers(1, 21))
        w = rng.random(k) + 0.05
        V = discrete_potential(AtomicMeasure(uniform_ball(rng, k, 1, 5.0), w / w.sum()))
        pts = uniform_ball(rng, 1500, 1, 5.0)
        for eta in (0.5, 1.0):
            for alpha in (1.0, 2.0):
                failures += not theorem42_harness(V, eta, alpha, 5.0, pts).passed
                runs += 1
    criterion(4, "Euclidean exclusion, exact atomic battery (n = 1)", failures == 0, f"{runs} runs, {failures} failures")


def test_c05_theorem42_quadrature(criterion):
    t0 = time.perf_counter()
    q = default_quadrature(2, 20_000)
    pts = uniform_ball(np.random.default_rng(SEED + 5), 200, 2, 1.0)

    def log_norm(p):
        with np.errstate(divide="ignore"):
            return np.log(norm(p))

    def log_max(p):
        with np.errstate(divide="ignore"):
            return np.log(np.max(np.abs(p), axis=1))

    # max log|z_j| averages to (log 2 - 1) / 2 on the sphere and is normalized first
    potentials = {"log|z|": from_function(2, log_norm),
                  "max log|z_j|": normalize_log_class(from_function(2, log_max), q)}
    results = {name: theorem42_harness(V, 1.0, 2.0, 1.0, pts, q, slack=1e-2).passed
               for name, V in potentials.items()}
    wall = time.perf_counter() - t0
    criterion(5, "Euclidean exclusion, quadrature oracles (n = 2)", all(results.values()) and wall < 300,
              ", ".join(f"{k}: {'pass' if v else 'fail'}" for k, v in results.items()) + f", {wall:.0f} s")


def test_c06_representation_and_poisson_jensen(criterion):
    rng = np.random.default_rng(SEED + 6)
    rep_max = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 11))
        w = rng.random(k) + 0.05
        V = discrete_potential(AtomicMeasure(uniform_ball(rng, k, 1, 3.0), w / w.sum()))
        rep_max = max(rep_max, representation_residual(V, uniform_ball(rng, 1, 1, 3.0)[0]))
    q = default_quadrature(2)
    radial = [from_function(2, lambda p: np.log(norm(p)))]
    radial += [from_function(2, lambda p, d=d: 0.5 * np.log(norm(p) ** 2 + d * d)) for d in (0.1, 0.3, 0.5)]
    radial.append(from_function(2, lambda p: norm(p) ** 2))
    pj_max = max(poisson_jensen_residual(V, r, R, q) for V in radial for r, R in ((0.2, 1.0), (0.5, 2.0)))
    criterion(6, "representation formula (n = 1) and Poisson-Jensen (n = 2)",
              rep_max <= 1e-8 and pj_max <= 5e-3,
              f"max representation residual {rep_max:.2e}, max Poisson-Jensen residual {pj_max:.2e}")


def test_c07_ball_geometry(criterion):
    rng = np.random.default_rng(SEED + 7)
    inv = 0.0
    for n in (1, 2, 3):
        z, w = uniform_ball(rng, 10_000, n, 0.999), uniform_ball(rng, 10_000, n, 1.0)
        inv = max(inv, float(np.max(np.abs(moebius_apply(z, moebius_apply(z, w)) - w))))
    q1 = SphereQuadrature.create(1, 4096)
    norm1 = max(abs(np.mean(poisson_szego(z, q1.nodes)) - 1) for z in uniform_ball(rng, 50, 1, 0.9))
    q2 = default_quadrature(2)
    norm2 = max(abs(np.sum(q2.weights * poisson_szego(z, q2.nodes)) - 1) for z in uniform_ball(rng, 10, 2, 0.9))
    sup_ok = True
    for n in (1, 2, 3):
        for rho in (0.3, 0.5, 0.9):
            P = poisson_szego(uniform_ball(rng, 5000, n, rho), sphere(rng, 5000, n))
            sup_ok &= bool(P.max() <= kappa_constant(rho, n) * (1 + 1e-12))
    criterion(7, "Moebius involution, kernel normalization, kernel sup",
              inv <= 1e-12 and norm1 <= 1e-10 and norm2 <= 5e-3 and sup_ok,
              f"involution {inv:.1e}, n=1 norm {norm1:.1e}, n=2 norm {norm2:.1e}, sup ok {sup_ok}")


def test_c08_inclusion_identity(criterion):
    rng = np.random.default_rng(SEED + 8)
    worst = -np.inf
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        sigma, tau = rng.uniform(0.01, 0.95, 2)
        z, w = uniform_ball(rng, 1, n, tau)[0], uniform_ball(rng, 1, n, sigma)[0]
        worst = max(worst, float(norm(moebius_apply(z, w)) - moebius_ball_radius(sigma, tau)))
    # the collinear pair z = tau, w = -sigma attains the radius
    gaps = [abs(float(norm(moebius_apply([t], [-s]))) - moebius_ball_radius(s, t))
            for s, t in ((0.1, 0.5), (0.3, 0.3), (0.05, 0.9))]
    criterion(8, "Moebius image of B_sigma inside B_r", worst <= 1e-12 and max(gaps) <= 1e-3,
              f"max excess {worst:.2e}, saturation gap {max(gaps):.1e}")


def test_c09_lemma51_prop52(criterion):
    rng = np.random.default_rng(SEED + 9)
    failures = runs = 0
    for _ in range(100):
        k = int(rng.integers(1, 6))
        poles = uniform_ball(rng, k, 1, 0.9)
        w = rng.random(k) + 0.05
        w = w / w.sum() * rng.uniform(0.3, 1.0)
        spec = GreenPotentialSpec(poles, w)
        near = (poles[:, None, :] + uniform_ball(rng, 20 * k, 1, 0.05).reshape(k, 20, 1)).reshape(-1, 1)
        pts = np.vstack([uniform_ball(rng, 800, 1, 0.99), near[norm(near) < 0.99]])
        for eta in (0.1, 0.3):
            for alpha in (1.0, 2.0):
                failures += not lemma51_harness(spec, 0.5, eta, alpha, pts).passed
                failures += not prop52_harness(spec, eta, alpha, pts).passed
                runs += 2
    criterion(9, "invariant exclusion and Green bound, exact battery", failures == 0,
              f"{runs} runs, {failures} failures")


def _battery_reports():
    sigma, tau = 0.1, 0.5
    nu = nu_constant(sigma, tau)
    params = ThreeCircleParams(sigma, tau, nu + 0.05, 0.1, 1.0, 1.0)
    rng = np.random.default_rng(SEED + 10)
    out = []
    for f in normalized_poly_battery():
        V = log_poly_potential(f)
        pts = uniform_ball(rng, 2000, 1, tau)
        out.append((f, V, pts, three_circle_min_harness(V, params, pts), three_circle_max_check(V, sigma, tau, 1.0, pts)))
    return out


@pytest.fixture(scope="module")
def battery():
    return _battery_reports()


def test_c10_three_circle_minimum(criterion, battery):
    sigma, tau = 0.1, 0.5
    nu = nu_constant(sigma, tau)
    failures = sum(not rep.passed for _, _, _, rep, _ in battery)
    frac = min(rep.extras["eq_lb_fraction"] for _, _, _, rep, _ in battery)
    worst, checked = -np.inf, 0
    for f, V, _, _, _ in battery:
        ms, _ = ball_sup(V, sigma)
        m1, _ = ball_sup(V, 1.0)
        u = from_function(1, lambda p, V=V, ms=ms, m1=m1: (V.func(p) - ms) / (m1 - ms))
        roots = f.roots[np.abs(f.roots) <= tau]
        for a in (roots if roots.size else [0.0]):
            worst = max(worst, lelong_bound_check(u, sigma, tau, a).estimate)
            checked += 1
    criterion(10, "three-circle minimum principle and Lelong bound",
              failures == 0 and worst <= nu + 0.05,
              f"50 potentials, {failures} failures, min lower-bound fraction {frac:.4f}, "
              f"max Lelong estimate {worst:.3f} at {checked} points vs nu {nu:.3f}")


def test_c11_three_circle_maximum(criterion, battery):
    viol = sum(rep.violations for *_, rep in battery)
    excess = max(rep.max_excess for *_, rep in battery)
    criterion(11, "Hadamard three-circle maximum", viol == 0,
              f"50 potentials, {viol} violations, max excess {excess:.2e}")


def test_c12_capacity(criterion):
    circle = PointCloud(np.exp(2j * np.pi * np.arange(4096) / 4096))
    segment = PointCloud(np.linspace(-2, 2, 4001).astype(complex))
    c_circle = capacity_1d(circle).value
    c_seg = capacity_1d(segment).value
    flags = [corollary44_check(K, a).status for K in (Disc(0.1), Segment.centered(0.4)) for a in (0.5, 1.0)]
    ok = 0.95 <= c_circle <= 1.05 and 0.93 <= c_seg <= 1.07 and all(s == "pass" for s in flags)
    criterion(12, "Fekete capacity estimates and content-capacity flags", ok,
              f"circle {c_circle:.4f}, segment [-2, 2] {c_seg:.4f}, flags {flags}")


def test_c13_replay_determinism(criterion, tmp_path, data_dir):
    mismatched = []
    for command, (name, args) in RUNS.items():
        code = cli.main([command, "--input", str(data_dir / name), "--out", str(tmp_path), "--seed", "11", *args])
        path = tmp_path / f"{command}_report.json"
        try:
            again = cli.replay(path)
            same = cli.dumps(again["payload"]) == cli.dumps(json.loads(path.read_text())["payload"])
        except cli.CliError:
            same = False
        if code == 1 or not same:
            mismatched.append(command)
    criterion(13, "replay reproduces every subcommand byte for byte", not mismatched,
              f"{len(RUNS)} subcommands, mismatches {mismatched}")
