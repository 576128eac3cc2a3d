import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lemlab.cover import Metric, MetricBall
from lemlab.errors import DomainError, NormalizationError, NotLelongClass, QuadratureDegeneracy
from lemlab.points import POLE, norm, uniform_ball
from lemlab.potentials import (AtomicMeasure, FactoredPolynomial, Polynomial, Provenance, SphereQuadrature,
                               check_log_class, default_quadrature, discrete_potential, from_function,
                               invariant_theta, lelong_number, log_poly_potential, normalize_log_class,
                               poisson_jensen_residual, representation_residual, robin_mean, sphere_mean,
                               sphere_means, tau_constant, theta_from_sphere_means, theta_lelong_formula)


def log_norm(dim):
    def f(p):
        with np.errstate(divide="ignore"):
            return np.log(norm(p))
    return from_function(dim, f, "log|z|")


def atomic(pairs):
    return discrete_potential(AtomicMeasure([a for a, _ in pairs], [w for _, w in pairs]))


@pytest.fixture(scope="module")
def q2():
    return default_quadrature(2)


# -- quadrature ----------------------------------------------------------------

@pytest.mark.parametrize("dim, nodes", [(1, 64), (2, 4000), (3, 4000)])
def test_quadrature_nodes_on_sphere(dim, nodes):
    q = SphereQuadrature.create(dim, nodes, seed=3)
    assert np.max(np.abs(norm(q.nodes) - 1)) <= 1e-14
    assert q.weights.sum() == pytest.approx(1.0, abs=1e-12)
    again = SphereQuadrature.create(dim, nodes, seed=3)
    assert np.array_equal(q.nodes, again.nodes)


def test_quadrature_moments_n2(q2):
    # E|zeta_1|^2 = 1/2 and E|zeta_1|^4 = 1/3 on S^3
    a = np.abs(q2.nodes[:, 0]) ** 2
    assert a.mean() == pytest.approx(0.5, abs=2e-3)
    assert (a ** 2).mean() == pytest.approx(1 / 3, abs=2e-3)


def test_tau_constant():
    assert tau_constant(1) == 1.0
    assert tau_constant(2) == pytest.approx(math.pi)
    assert tau_constant(3) == pytest.approx(math.pi ** 2 / 2)


# -- constructors --------------------------------------------------------------

def test_discrete_potential_examples():
    V = atomic([(0, 1.0)])
    assert V(math.e) == pytest.approx(1.0)
    assert V(0.0) == POLE
    V2 = atomic([(0, 0.5), (1, 0.5)])
    assert V2.provenance is Provenance.EXACT_ATOMIC_1D
    assert V2.theta(0, 0.5) == 0.5
    assert V2.theta(0, 2) == 1.0
    assert V2.mass(MetricBall(0, 2.0)) == 1.0


def test_empty_measure_and_zero_polynomial():
    with pytest.raises(DomainError):
        AtomicMeasure(np.zeros((0, 1)), [])
    with pytest.raises(DomainError):
        FactoredPolynomial([1.0], [1], lead=0)
    with pytest.raises(DomainError):
        Polynomial({(1, 0): 0}, 2)


def test_log_poly_examples():
    V = log_poly_potential(FactoredPolynomial.from_roots([0, 0, 0]))
    assert V(2.0) == pytest.approx(math.log(2))
    W = log_poly_potential(FactoredPolynomial.from_roots([1, -1]))
    assert W.theta(0, 0.5) == 0
    assert W.theta(1, 0.1) == 0.5
    # the same values as the discrete potential over the roots
    z = np.array([0.3 + 0.2j, 2.0, -1.5j])
    assert np.allclose(W(z), atomic([(1, 0.5), (-1, 0.5)])(z))


def test_multivariate_polynomial_values():
    P = Polynomial({(1, 0): 1.0, (0, 2): -1.0}, 2)
    V = log_poly_potential(P, normalize=False)
    z = np.array([[0.5, 0.3j]])
    assert V(z)[0] == pytest.approx(math.log(abs(0.5 + 0.09)))


def test_factored_polynomial_normalized_at_zero():
    f = FactoredPolynomial.normalized_at_zero([2.0, 1j])
    assert f(0.0) == pytest.approx(1.0)
    assert f.degree == 2
    with pytest.raises(DomainError):
        FactoredPolynomial.normalized_at_zero([0.0])


# -- sphere means and theta ---------------------------------------------------------

def test_sphere_mean_examples(q2):
    assert sphere_mean(atomic([(2.0, 1.0)]), 0, 1.0) == pytest.approx(math.log(2), abs=1e-12)
    assert sphere_mean(atomic([(0, 1.0)]), 0, 5.0) == pytest.approx(math.log(5), abs=1e-12)
    assert sphere_mean(log_norm(2), [0, 0], 1.0, q2) == pytest.approx(0.0, abs=1e-12)


def test_sphere_mean_rejects_pole_nodes():
    # an atom on the circle hits one node, which is dropped
    assert sphere_mean(atomic([(1.0, 1.0)]), 0, 1.0) == pytest.approx(0.0, abs=5e-3)
    bad = from_function(1, lambda p: np.where(p[:, 0].real > 0, POLE, 0.0))
    with pytest.raises(QuadratureDegeneracy):
        sphere_mean(bad, 0, 1.0)


def test_theta_from_sphere_means_examples(q2):
    assert theta_from_sphere_means(log_norm(1), 0, 0.3) == pytest.approx(1.0, abs=1e-10)
    V = from_function(1, lambda p: np.log(np.abs(p[:, 0] - 1)))
    assert theta_from_sphere_means(V, 0, 0.5) == pytest.approx(0.0, abs=1e-10)
    assert theta_from_sphere_means(log_norm(2), [0, 0], 0.5, q2) == pytest.approx(1.0, abs=2e-3)


def test_theta_lelong_formula_cross_check():
    # smooth radial V = log(|z|^2 + 1/4) in C^2; both routes give the projective mass
    V = from_function(2, lambda p: np.log(norm(p) ** 2 + 0.25))
    q = default_quadrature(2, 20_000)
    a = theta_from_sphere_means(V, [0, 0], 0.5, q, richardson=True)
    b = theta_lelong_formula(V, [0, 0], 0.5, h=0.05)
    assert a == pytest.approx(b, rel=0.05)


def test_invariant_theta_green_examples():
    from lemlab.ball.harness import GreenPotentialSpec, green_oracle
    G0 = green_oracle(GreenPotentialSpec([0.0], [1.0]))
    assert invariant_theta(G0, 0, 0.3) == 1
    G = green_oracle(GreenPotentialSpec([0.5], [1.0]))
    assert invariant_theta(G, 0, 0.4) == 0
    assert invariant_theta(G, 0, 0.6) == 1


@given(st.integers(0, 10_000))
def test_theta_nondecreasing_and_bounded(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 8))
    w = rng.random(k) + 0.1
    V = discrete_potential(AtomicMeasure(uniform_ball(rng, k, 1, 2.0), w))
    z = uniform_ball(rng, 1, 1, 2.0)[0]
    ts = np.sort(rng.random(20) * 4)
    th = V.euclid_theta.values(z[None, :], ts)[0]
    assert np.all(np.diff(th) >= 0)
    assert np.all(th <= w.sum() + 1e-12)


def test_numeric_theta_nondecreasing_n2():
    q = default_quadrature(2, 20_000)
    V = from_function(2, lambda p: 0.5 * np.log(np.abs(p[:, 0] - 0.3) ** 2 + np.abs(p[:, 1]) ** 2 + 1e-2))
    th = [theta_from_sphere_means(V, [0.1, 0], t, q) for t in (0.05, 0.1, 0.2, 0.4, 0.8)]
    assert np.all(np.diff(th) >= -1e-3)


@given(st.integers(0, 10_000))
def test_sphere_mean_nondecreasing_in_radius(seed):
    rng = np.random.default_rng(seed)
    V = discrete_potential(AtomicMeasure(uniform_ball(rng, 4, 1, 1.0), rng.random(4) + 0.1))
    a = uniform_ball(rng, 1, 1, 1.0)[0]
    r = np.linspace(0.05, 3, 25) + 1e-3 * rng.random()
    # keep circles away from the atoms, where the node rule loses accuracy
    d = np.abs(V.measure.locations[:, 0] - a[0])
    r = r[np.min(np.abs(r[:, None] - d[None, :]), axis=1) > 0.02]
    m = sphere_means(V, a, r)
    assert np.all(np.diff(m) >= -1e-9)


# -- Lelong numbers and Robin means ------------------------------------------------

def test_lelong_number_examples():
    assert lelong_number(atomic([(0, 2.0)]), 0).value == pytest.approx(2, abs=0.05)
    assert lelong_number(atomic([(1, 1.0)]), 0).value == pytest.approx(0, abs=0.05)
    V = log_poly_potential(FactoredPolynomial.from_roots([0, 0, 1]))
    assert lelong_number(V, 0).value == pytest.approx(2 / 3, abs=0.05)


@given(st.integers(0, 10_000))
def test_lelong_zero_where_finite(seed):
    rng = np.random.default_rng(seed)
    V = discrete_potential(AtomicMeasure(uniform_ball(rng, 3, 1, 1.0), [0.2, 0.3, 0.5]))
    a = uniform_ball(rng, 1, 1, 1.0)[0]
    if np.min(np.abs(V.measure.locations[:, 0] - a[0])) > 0.05:
        assert abs(lelong_number(V, a).value) <= 0.05


def test_robin_mean_examples():
    assert robin_mean(log_norm(1)).value == pytest.approx(0, abs=1e-9)
    V2 = from_function(1, lambda p: np.log(2 * np.abs(p[:, 0])))
    assert robin_mean(V2).value == pytest.approx(math.log(2), abs=1e-9)
    rng = np.random.default_rng(5)
    P = FactoredPolynomial.from_roots(uniform_ball(rng, 6, 1, 2.0)[:, 0])
    assert robin_mean(log_poly_potential(P)).value == pytest.approx(0, abs=1e-6)


def test_robin_mean_c2(q2):
    assert robin_mean(log_norm(2), quad=q2).value == pytest.approx(0, abs=1e-9)
    # log max |z_j| on S^3 averages to (log 2 - 1) / 2
    V = from_function(2, lambda p: np.log(np.max(np.abs(p), axis=1)))
    assert robin_mean(V, quad=q2).value == pytest.approx((math.log(2) - 1) / 2, abs=2e-3)


def test_robin_mean_detects_fast_growth():
    with pytest.raises(NotLelongClass):
        robin_mean(from_function(1, lambda p: np.abs(p[:, 0]) ** 2))


def test_normalize_log_class_examples():
    V2 = from_function(1, lambda p: np.log(2 * np.abs(p[:, 0])))
    W = normalize_log_class(V2)
    assert W(0.7) == pytest.approx(math.log(0.7), abs=1e-9)
    L = log_norm(1)
    assert normalize_log_class(L) is L
    P = FactoredPolynomial.from_roots([1, -1], lead=3)
    V = log_poly_potential(P)
    assert normalize_log_class(V)(2.0) == pytest.approx(0.5 * math.log(3), abs=1e-9)
    # idempotent
    W2 = normalize_log_class(normalize_log_class(V))
    assert W2(0.3) == pytest.approx(normalize_log_class(V)(0.3), abs=1e-9)
    with pytest.raises(NormalizationError):
        check_log_class(V)


# -- Poisson-Jensen and the representation formula ------------------------------------

def test_poisson_jensen_examples(q2):
    assert poisson_jensen_residual(log_norm(1), 0.1, 1.0) <= 1e-10
    assert poisson_jensen_residual(atomic([(0.5, 0.5), (-0.5, 0.5)]), 0.1, 2.0) <= 1e-8
    assert poisson_jensen_residual(log_norm(2), 0.5, 1.0, q2) <= 5e-3


def test_poisson_jensen_radial_battery_n2(q2):
    for delta in (0.1, 0.3):
        V = from_function(2, lambda p, d=delta: 0.5 * np.log(norm(p) ** 2 + d * d))
        assert poisson_jensen_residual(V, 0.2, 1.0, q2) <= 5e-3


def test_representation_examples():
    assert representation_residual(log_norm(1), 1.0) <= 1e-10
    assert representation_residual(log_norm(1), 0.6j) <= 1e-10
    assert representation_residual(atomic([(1, 0.5), (-1, 0.5)]), 0) <= 1e-8
    V = atomic([(0.3, 1.0)])
    assert V(0.0) == pytest.approx(math.log(0.3))
    assert representation_residual(V, 0) <= 1e-8
    with pytest.raises(DomainError):
        representation_residual(V, 0.3)


@given(st.integers(0, 10_000))
def test_representation_atomic_battery(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 10))
    w = rng.random(k) + 0.05
    V = discrete_potential(AtomicMeasure(uniform_ball(rng, k, 1, 3.0), w / w.sum()))
    z = uniform_ball(rng, 1, 1, 3.0)[0]
    assert representation_residual(V, z) <= 1e-8


def test_invariant_theta_domain():
    with pytest.raises(DomainError):
        invariant_theta(log_norm(1), 0, 1.5)


def test_metric_enum_values():
    assert Metric("euclidean") is Metric.EUCLIDEAN
