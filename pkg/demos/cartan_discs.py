"""Cartan discs around the zeros of a random polynomial.

Outside the discs the monic polynomial stays above eps^d, and the radii sum
to at most 2 e eps.  The script prints both facts for a few eps and writes
an SVG of the discs with the lemniscate grid next to it.

    python demos/cartan_discs.py [out_dir]
"""

import math
import sys
from pathlib import Path

import numpy as np

from lemlab.artifacts import write_cover_svg, write_grid_csv
from lemlab.points import uniform_ball
from lemlab.principles import cartan_cover, verify_lemniscate_cover

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo-out")
out.mkdir(parents=True, exist_ok=True)

rng = np.random.default_rng(3)
roots = uniform_ball(rng, 12, 1, 1.5)[:, 0]
# a cluster of three roots, so that one disc has to swallow several
roots[:3] = 0.6 + 0.02 * np.exp(2j * np.pi * np.arange(3) / 3)

print(f"{'eps':>6} {'discs':>6} {'sum r':>8} {'2 e eps':>8}  lemniscate covered")
for eps in (0.02, 0.05, 0.1, 0.2):
    cov = cartan_cover(roots, eps)
    ok = verify_lemniscate_cover(roots, eps, cov, 512)
    print(f"{eps:6.2f} {len(cov):6d} {cov.radii.sum():8.4f} {2 * math.e * eps:8.4f}  {ok}")

eps = 0.1
cov = cartan_cover(roots, eps)
d = roots.size


def normalized(z):
    with np.errstate(divide="ignore"):
        return np.sum(np.log(np.abs(z[:, :1] - roots[None, :])), axis=1) / d


write_grid_csv(out / "cartan_grid.csv", normalized, 2.0, 128, cov)
write_cover_svg(out / "cartan_cover.svg", cov, 2.1, roots)
print(f"wrote {out / 'cartan_cover.svg'} and {out / 'cartan_grid.csv'}")
