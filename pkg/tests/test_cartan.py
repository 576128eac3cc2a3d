import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemlab.cover import BallCover, Metric, MetricBall
from lemlab.errors import DomainError
from lemlab.points import uniform_ball
from lemlab.potentials import FactoredPolynomial
from lemlab.principles import H_constant, cartan_cover, min_modulus_1d, verify_lemniscate_cover


def cover_of(*pairs):
    return BallCover([MetricBall(c, r, Metric.EUCLIDEAN) for c, r in pairs])


def test_H_examples():
    assert H_constant(0.5) == pytest.approx(math.log(3) + 3, abs=1e-12)
    assert H_constant(1 - 1e-12) == pytest.approx(math.log(1.5) + 3, abs=1e-9)
    assert H_constant(0.1) == pytest.approx(math.log(15) + 3, abs=1e-12)
    with pytest.raises(DomainError):
        H_constant(0.0)


def test_cartan_multiple_root():
    for eps in (0.05, 0.3):
        cov = cartan_cover([0, 0, 0, 0], eps)
        assert len(cov) == 1
        assert abs(complex(cov.balls[0].center[0])) <= 1e-12
        assert cov.balls[0].radius <= 2 * math.e * eps


def test_cartan_roots_of_unity():
    d, eps = 7, 0.02
    roots = np.exp(2j * np.pi * np.arange(d) / d)
    cov = cartan_cover(roots, eps)
    assert len(cov) == d
    assert cov.radii.sum() <= 2 * math.e * eps
    assert verify_lemniscate_cover(roots, eps, cov, 512)


def test_verify_examples():
    assert verify_lemniscate_cover([0, 0], 0.5, cover_of((0, 0.5)), 201)
    assert not verify_lemniscate_cover([0, 0], 0.5, cover_of((0, 0.3)), 201, extent=2.0)
    assert verify_lemniscate_cover([1], 0.1, cover_of((1, 0.1)), 201)


@settings(max_examples=30)
@given(st.integers(0, 10_000), st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([0.05, 0.1, 0.2]))
def test_cartan_bounds_random(seed, alpha, eps):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 21))
    roots = uniform_ball(rng, d, 1, 2.0)[:, 0]
    cov = cartan_cover(roots, eps, alpha)
    assert np.sum(cov.radii ** alpha) <= math.e * (2 * eps) ** alpha * (1 + 1e-12)
    assert verify_lemniscate_cover(roots, eps, cov, 128)


def test_min_modulus_examples():
    one = FactoredPolynomial(np.zeros(0), np.zeros(0))
    rep = min_modulus_1d(one, 1.0, 0.3)
    assert rep.passed and len(rep.cover) == 0
    f = FactoredPolynomial([1.0], [1], lead=-1)
    rep = min_modulus_1d(f, 1.0, 0.1)
    assert rep.passed and len(rep.cover) == 1
    assert abs(complex(rep.cover.balls[0].center[0]) - 1) <= rep.cover.balls[0].radius
    g = FactoredPolynomial([1.0, 2.0], [1, 1], lead=0.5)
    rep = min_modulus_1d(g, 1.0, 0.2)
    assert rep.passed and rep.radius_sum <= 0.4
    with pytest.raises(DomainError):
        min_modulus_1d(FactoredPolynomial([1.0], [1]), 1.0, 0.2)
