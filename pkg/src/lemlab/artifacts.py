"""Plot data written next to a report: a lemniscate grid CSV and a cover SVG."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .cover import BallCover, Metric


def _disc_in_plane(center: complex, radius: float, metric: Metric) -> tuple:
    """Euclidean center and radius of a ball of C drawn in the plane.

    A pseudo-hyperbolic disc ``{|Phi_c(w)| < r}`` is the Euclidean disc with
    center ``c (1 - r^2) / (1 - r^2 |c|^2)`` and radius
    ``r (1 - |c|^2) / (1 - r^2 |c|^2)``.
    """
    if metric is Metric.EUCLIDEAN:
        return center, radius
    q = 1 - radius ** 2 * abs(center) ** 2
    return center * (1 - radius ** 2) / q, radius * (1 - abs(center) ** 2) / q


def write_grid_csv(path, values: Callable, extent: float, resolution: int,
                   cover: Optional[BallCover] = None, center: complex = 0j) -> Path:
    """Rows ``x, y, value, in_exceptional`` on a square grid of C."""
    axis = np.linspace(-extent, extent, resolution)
    x, y = np.meshgrid(axis, axis, indexing="xy")
    z = (center + x + 1j * y).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.asarray(values(z[:, None]), dtype=float)
    inside = np.zeros(z.size, bool)
    if cover is not None and len(cover):
        ok = np.abs(z) < 1 if cover.metric is Metric.INVARIANT else np.ones(z.size, bool)
        inside[ok] = cover.contains(z[ok][:, None])
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "value", "in_exceptional"])
        for zi, vi, bi in zip(z, v, inside):
            w.writerow([repr(float(zi.real)), repr(float(zi.imag)), repr(float(vi)), int(bi)])
    return path


def write_cover_svg(path, cover: BallCover, extent: float, points=None, size: int = 512,
                    unit_circle: bool = False) -> Path:
    """Inline-written SVG of the discs of a planar cover.

    Euclidean discs are solid, invariant discs dashed; both carry the metric
    as their ``class`` attribute.
    """
    scale = size / (2 * extent)

    def px(z):
        return (z.real + extent) * scale, (extent - z.imag) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           "<style>.euclidean{fill:#4a7ab533;stroke:#1f4e89;stroke-width:1}"
           ".invariant{fill:#c9503333;stroke:#8a2b17;stroke-width:1;stroke-dasharray:4 2}"
           ".frame{fill:none;stroke:#777;stroke-width:1}.sample{fill:#222}</style>"]
    if unit_circle:
        cx, cy = px(0j)
        out.append(f'<circle class="frame" cx="{cx:.3f}" cy="{cy:.3f}" r="{scale:.3f}"/>')
    for b in cover:
        c, r = _disc_in_plane(complex(np.ravel(b.center)[0]), b.radius, b.metric)
        cx, cy = px(c)
        out.append(f'<circle class="{b.metric.value}" cx="{cx:.3f}" cy="{cy:.3f}" r="{r * scale:.3f}"/>')
    if points is not None:
        for z in np.ravel(points):
            cx, cy = px(z)
            out.append(f'<circle class="sample" cx="{cx:.3f}" cy="{cy:.3f}" r="1.5"/>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
