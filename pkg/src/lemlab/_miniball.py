"""Smallest enclosing Euclidean ball of a real point set.

Welzl's recursion on a small working set, driven by an outer pivoting loop
that adds the farthest point until every point is enclosed.  The working set
stays small, so the recursion is cheap even for 10^4 points.
"""

from __future__ import annotations

import numpy as np

_REL = 1e-12


def _circumball(support: list[np.ndarray]) -> tuple[np.ndarray, float]:
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    q = np.array([p - p0 for p in support[1:]])
    gram = q @ q.T
    lam = np.linalg.lstsq(gram, 0.5 * np.diag(gram), rcond=None)[0]
    c = p0 + lam @ q
    r = max(float(np.linalg.norm(p - c)) for p in support)
    return c, r


def _inside(p, c, r) -> bool:
    return float(np.linalg.norm(p - c)) <= r * (1 + _REL) + 1e-300


def _welzl(pts: list[np.ndarray], boundary: list[np.ndarray], dim: int):
    if not pts or len(boundary) == dim + 1:
        if not boundary:
            return np.zeros(dim), -1.0
        return _circumball(boundary)
    p = pts[-1]
    c, r = _welzl(pts[:-1], boundary, dim)
    if r >= 0 and _inside(p, c, r):
        return c, r
    return _welzl(pts[:-1], boundary + [p], dim)


def min_enclosing_ball(x: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and radius of the smallest ball containing the rows of ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] == 0:
        raise ValueError("empty point set")
    if x.shape[0] == 1:
        return x[0].copy(), 0.0
    dim = x.shape[1]
    work = [x[0], x[int(np.argmax(np.linalg.norm(x - x[0], axis=1)))]]
    while True:
        c, r = _welzl(list(work), [], dim)
        d = np.linalg.norm(x - c, axis=1)
        far = int(np.argmax(d))
        if d[far] <= r * (1 + _REL) + 1e-300:
            return c, float(max(r, d[far]))
        work.append(x[far])
