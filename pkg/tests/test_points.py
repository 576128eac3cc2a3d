import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lemlab._miniball import min_enclosing_ball
from lemlab.errors import DimensionMismatch, DomainError
from lemlab.points import (POLE, as_point, as_points, decode_point, encode_point, from_real, is_pole, norm,
                           to_real, uniform_ball)


def test_as_points_shapes():
    assert as_points(0.5).shape == (1, 1)
    assert as_points([1, 2, 3]).shape == (3, 1)
    assert as_points([1, 2], dim=2).shape == (1, 2)
    with pytest.raises(DimensionMismatch):
        as_points(np.zeros((3, 2)), dim=3)
    with pytest.raises(DomainError):
        as_points([np.nan])
    with pytest.raises(DimensionMismatch):
        as_point(np.zeros((2, 2)))


def test_pole_sentinel():
    assert is_pole(POLE) and not is_pole(-1e300)


def test_encoding_roundtrip():
    z = np.array([1 + 2j, -0.5j])
    assert encode_point(z) == [[1.0, 2.0], [0.0, -0.5]]
    assert np.array_equal(decode_point(encode_point(z)), z)
    assert decode_point([0.3, 0.2])[0] == 0.3 + 0.2j
    assert decode_point(2.0)[0] == 2.0


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_real_roundtrip_and_ball_sampling(seed, n):
    pts = uniform_ball(np.random.default_rng(seed), 50, n, 2.5)
    assert np.array_equal(from_real(to_real(pts)), pts)
    assert np.all(norm(pts) < 2.5)


@given(st.integers(0, 10_000), st.integers(1, 200), st.integers(1, 4))
def test_min_enclosing_ball_encloses_and_is_tight(seed, m, d):
    x = np.random.default_rng(seed).standard_normal((m, d))
    c, r = min_enclosing_ball(x)
    dist = np.linalg.norm(x - c, axis=1)
    assert np.all(dist <= r * (1 + 1e-9) + 1e-12)
    # the smallest ball is never larger than the ball about the centroid
    assert r <= np.max(np.linalg.norm(x - x.mean(axis=0), axis=1)) * (1 + 1e-9) + 1e-12
    # and at least half the diameter
    if m > 1:
        diam = max(np.linalg.norm(x[i] - x[j]) for i in range(min(m, 30)) for j in range(min(m, 30)))
        assert r >= diam / 2 * (1 - 1e-9)


def test_min_enclosing_ball_examples():
    c, r = min_enclosing_ball(np.array([[0.0, 0.0], [2.0, 0.0]]))
    assert np.allclose(c, [1, 0]) and r == pytest.approx(1)
    c, r = min_enclosing_ball(np.array([[1.0, 0.0], [-0.5, 3 ** 0.5 / 2], [-0.5, -(3 ** 0.5) / 2], [0, 0]]))
    assert np.allclose(c, [0, 0], atol=1e-12) and r == pytest.approx(1)
