"""Invariant geometry of the unit ball and its exclusion harnesses.

Only the Moebius layer is imported here, since :mod:`lemlab.cover` depends
on it; the harnesses live in :mod:`lemlab.ball.harness`.
"""

from .mobius import (bergman_distance, green_value, invariant_distance, kappa_constant,
                     moebius_apply, moebius_ball_radius, poisson_szego)

__all__ = ["bergman_distance", "green_value", "invariant_distance", "kappa_constant",
           "moebius_apply", "moebius_ball_radius", "poisson_szego"]
