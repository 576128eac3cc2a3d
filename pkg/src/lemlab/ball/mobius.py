"""Automorphisms of the unit ball of C^n and the quantities built on them.

The involution swapping ``z`` and the origin is written in projection form

    Phi_z(w) = (z - P_z w - s_z Q_z w) / (1 - <w, z>),

with ``P_z`` the orthogonal projection onto the complex line through ``z``,
``Q_z = I - P_z`` and ``s_z = sqrt(1 - |z|^2)``.  For ``z = 0`` this is
``w -> -w``, whose modulus is that of the identity.

All functions broadcast over leading axes: a point is the last axis.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..points import POLE, norm

BOUNDARY_TOL = 1e-10


def _inner(a, b):
    """<a, b> = sum a_j conj(b_j) over the last axis."""
    return np.sum(a * np.conj(b), axis=-1)


def moebius_apply(z, w) -> np.ndarray:
    """Evaluate ``Phi_z(w)``.

    Parameters
    ----------
    z : (..., n) complex
        Base point, strictly inside the ball.
    w : (..., n) complex
        Point of the closed ball (values slightly outside are tolerated as
        long as the denominator stays away from 0).
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zz = _inner(z, z).real
    if np.any(zz >= 1.0):
        raise DomainError("Moebius base point must satisfy |z| < 1")
    wz = _inner(w, z)[..., None]
    # unit direction of z, scaled first so that tiny |z| does not underflow
    big = np.max(np.abs(z), axis=-1, keepdims=True)
    u = z / np.where(big > 0, big, 1.0)
    un = np.sqrt(_inner(u, u).real)[..., None]
    u = u / np.where(un > 0, un, 1.0)
    # z - P_z w written as P_z (z - w) so that w = z cancels exactly
    along = u * _inner(z - w, u)[..., None]
    across = w - _inner(w, u)[..., None] * u
    s = np.sqrt(1.0 - zz)[..., None]
    return (along - s * across) / (1.0 - wz)


def invariant_distance(z, w) -> np.ndarray:
    """Pseudo-hyperbolic distance ``|Phi_z(w)|`` (Moebius-invariant)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(norm(w) >= 1.0):
        raise DomainError("invariant distance needs both points in the open ball")
    return _exact_zero(z, w, norm(moebius_apply(z, w)))


def _exact_zero(z, w, d):
    """Set ``d`` to 0 where ``w == z`` bit for bit (rounding leaves ~1e-17)."""
    same = np.all(np.asarray(z) == np.asarray(w), axis=-1)
    out = np.where(same, 0.0, d)
    return out[()] if out.ndim == 0 else out


def bergman_distance(z, w) -> np.ndarray:
    """Bergman distance recovered from ``d_B = tanh(rho / sqrt(n + 1))``."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    return np.arctanh(invariant_distance(z, w)) * np.sqrt(n + 1)


def green_value(z, w) -> np.ndarray:
    """Pluricomplex Green function ``log |Phi_z(w)|`` with pole at ``z``.

    Returns :data:`~lemlab.points.POLE` where ``w == z``.
    """
    d = np.asarray(_exact_zero(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex),
                               norm(moebius_apply(z, w))))
    with np.errstate(divide="ignore"):
        out = np.where(d > 0, np.log(np.where(d > 0, d, 1.0)), POLE)
    return out[()] if out.ndim == 0 else out


def poisson_szego(z, zeta) -> np.ndarray:
    """Poisson-Szego kernel ``(1 - |z|^2)^n / |1 - <z, zeta>|^(2n)``."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    n = z.shape[-1]
    if np.any(np.abs(norm(zeta) - 1.0) > BOUNDARY_TOL):
        raise DomainError("Poisson-Szego kernel needs |zeta| = 1")
    zz = np.sum(np.abs(z) ** 2, axis=-1)
    if np.any(zz >= 1.0):
        raise DomainError("Poisson-Szego kernel needs |z| < 1")
    return (1.0 - zz) ** n / np.abs(1.0 - _inner(z, zeta)) ** (2 * n)


def kappa_constant(rho: float, n: int) -> float:
    """``((1 + rho) / (1 - rho))^n``, the sup of the kernel over ``|z| <= rho``."""
    if not 0.0 < rho < 1.0:
        raise DomainError("kappa_constant needs 0 < rho < 1")
    return ((1.0 + rho) / (1.0 - rho)) ** n


def moebius_ball_radius(sigma: float, tau: float) -> float:
    """Radius ``r`` with ``Phi_z(B_r) ⊇ B_sigma`` for every ``|z| <= tau``."""
    return (sigma + tau) / (1.0 + sigma * tau)
