"""Points of C^n as complex numpy arrays, plus the pole sentinel."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, DomainError

#: Value taken by a potential at one of its logarithmic poles.  It is only
#: ever compared against (``is_pole``) or masked out before a reduction.
POLE = float("-inf")


def is_pole(values):
    return np.isneginf(values)


def as_point(z, dim: int | None = None) -> np.ndarray:
    """Coerce a scalar or sequence to a 1-D complex coordinate vector."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a single point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("point coordinates must be finite")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"expected a point of C^{dim}, got C^{arr.shape[0]}")
    return arr


def as_points(zs, dim: int | None = None) -> np.ndarray:
    """Coerce input to an ``(m, n)`` complex array.

    A 1-D input is read as ``m`` points of C when ``dim`` is 1 or None,
    and as a single point otherwise.
    """
    arr = np.asarray(zs, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if dim is None or dim == 1:
            arr = arr.reshape(-1, 1)
        else:
            arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected an (m, n) array of points, got {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatch(f"expected points of C^{dim}, got C^{arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("point coordinates must be finite")
    return arr


def norm(zs) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(zs) ** 2, axis=-1))


def to_real(zs: np.ndarray) -> np.ndarray:
    """(m, n) complex -> (m, 2n) real, real parts first."""
    return np.concatenate([zs.real, zs.imag], axis=-1)


def from_real(xs: np.ndarray) -> np.ndarray:
    n = xs.shape[-1] // 2
    return xs[..., :n] + 1j * xs[..., n:]


def encode_point(z) -> list[list[float]]:
    """JSON form of a point: one ``[re, im]`` pair per coordinate."""
    return [[float(c.real), float(c.imag)] for c in np.atleast_1d(z)]


def decode_point(obj) -> np.ndarray:
    """Inverse of :func:`encode_point`; also accepts a bare ``[re, im]`` or number."""
    if isinstance(obj, (int, float)):
        return np.array([complex(obj)])
    if len(obj) == 2 and all(isinstance(c, (int, float)) for c in obj):
        return np.array([complex(obj[0], obj[1])])
    return np.array([complex(c[0], c[1]) for c in obj])


def uniform_ball(rng: np.random.Generator, m: int, dim: int, radius: float = 1.0) -> np.ndarray:
    """``m`` points drawn uniformly from the Euclidean ball of C^dim."""
    g = rng.standard_normal((m, 2 * dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * rng.random(m) ** (1.0 / (2 * dim))
    return from_real(g * rad[:, None])
