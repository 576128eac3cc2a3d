"""Logarithmic capacity from Fekete points.

The transfinite diameters d_k of k-point Fekete sets decrease to the
capacity like k^(1/(k-1)); the estimator fits that tail.  Known values:
1 for the unit circle, L/4 for a segment of length L.

    python demos/capacity_fekete.py
"""

import numpy as np

from lemlab.principles import Disc, PointCloud, Segment, capacity_1d, corollary44_check

sets = {
    "unit circle": (PointCloud(np.exp(2j * np.pi * np.arange(4096) / 4096)), 1.0),
    "segment [-2, 2]": (PointCloud(np.linspace(-2, 2, 4001).astype(complex)), 1.0),
    "ellipse a=1, b=0.5": (PointCloud(np.cos(t := 2 * np.pi * np.arange(4096) / 4096) + 0.5j * np.sin(t)),
                           0.75),
}
for name, (K, exact) in sets.items():
    est = capacity_1d(K)
    diam = ", ".join(f"{d:.4f}" for d in est.extras["diameters"])
    print(f"{name:20s} estimate {est.value:.4f} (exact {exact}), d_k = {diam}")

print()
for K in (Disc(0.1), Segment.centered(0.4)):
    for alpha in (0.5, 1.0):
        rep = corollary44_check(K, alpha)
        print(f"{K!r:40s} alpha {alpha}: content <= {rep.lhs_upper:.4f}, bound {rep.rhs:.4f}: {rep.status}")
