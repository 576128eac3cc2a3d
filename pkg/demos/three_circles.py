"""Three circles for normalized logarithmic potentials.

For V = (1/d) log|P| with P(0) = 1 the maximum over B_tau is controlled by
the maxima over B_sigma and B_1, the Lelong numbers in B_tau stay below
nu(sigma, tau), and away from a small exceptional set the minimum is
controlled too.  The script runs the three checks over a small battery.

    python demos/three_circles.py
"""

import numpy as np

from lemlab.points import uniform_ball
from lemlab.potentials import FactoredPolynomial, from_function, log_poly_potential
from lemlab.principles import (ThreeCircleParams, ball_sup, lelong_bound_check, nu_constant, rho_constant,
                               three_circle_max_check, three_circle_min_harness)

sigma, tau = 0.1, 0.5
nu = nu_constant(sigma, tau)
print(f"sigma {sigma}, tau {tau}: rho = {rho_constant(sigma, tau):.4f}, nu = {nu:.4f}")
params = ThreeCircleParams(sigma, tau, nu + 0.05, 0.1, 1.0)

rng = np.random.default_rng(1)
print(f"{'deg':>4} {'max ok':>7} {'min ok':>7} {'excluded':>9} {'C':>10} {'max Lelong':>11}")
for trial in range(8):
    d = int(rng.integers(2, 10))
    f = FactoredPolynomial.normalized_at_zero(uniform_ball(rng, d, 1, 1.5)[:, 0])
    V = log_poly_potential(f)
    pts = uniform_ball(rng, 3000, 1, tau)
    mx = three_circle_max_check(V, sigma, tau, 1.0, pts)
    mn = three_circle_min_harness(V, params, pts)
    ms, m1 = ball_sup(V, sigma)[0], ball_sup(V, 1.0)[0]
    u = from_function(1, lambda p, V=V, ms=ms, m1=m1: (V.func(p) - ms) / (m1 - ms))
    inside = f.roots[np.abs(f.roots) <= tau]
    lel = max((lelong_bound_check(u, sigma, tau, a).estimate for a in inside), default=0.0)
    print(f"{d:4d} {str(mx.passed):>7} {str(mn.passed):>7} {len(mn.bad_points):9d} "
          f"{mn.extras['C']:10.3g} {lel:11.3f}")
