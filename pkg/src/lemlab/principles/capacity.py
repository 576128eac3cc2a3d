"""Logarithmic capacity in the plane and the capacity-content comparison."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ..cover import hausdorff_content_upper
from ..errors import DomainError


class CapacityMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    FEKETE = "fekete"


@dataclass(frozen=True)
class Disc:
    radius: float
    center: complex = 0j

    def sample(self, m: int) -> np.ndarray:
        """Square grid of roughly ``m`` points inside the closed disc, and its spacing."""
        k = max(2, int(math.sqrt(4 * m / math.pi)))
        axis = np.linspace(-self.radius, self.radius, k)
        x, y = np.meshgrid(axis, axis)
        z = (x + 1j * y).ravel()
        return self.center + z[np.abs(z) <= self.radius], axis[1] - axis[0]


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    @classmethod
    def centered(cls, length: float):
        return cls(-length / 2, length / 2)

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    def sample(self, m: int):
        t = np.linspace(0, 1, m)
        return self.a + t * (self.b - self.a), self.length / (m - 1)


@dataclass(frozen=True)
class BallCn:
    """Closed ball of radius ``r`` in C^n; ``C_log = r`` via ``log+|z/r|``."""
    radius: float
    dim: int = 2


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray


SetDescriptor = Union[Disc, Segment, BallCn, PointCloud]


@dataclass
class CapacityEstimate:
    value: float
    method: CapacityMethod
    node_count: int = 0
    uncertainty: float = 0.0
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method.value, "node_count": self.node_count,
                "uncertainty": self.uncertainty, **self.extras}


def _log_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(a[:, None] - b[None, :]))


def leja_points(cloud: np.ndarray, k: int) -> np.ndarray:
    """Greedy Leja sequence: each new point maximizes the product of distances."""
    idx = [int(np.argmax(np.abs(cloud - cloud.mean())))]
    score = np.zeros(cloud.size)
    with np.errstate(divide="ignore"):
        for _ in range(k - 1):
            score += np.log(np.abs(cloud - cloud[idx[-1]]))
            score[idx] = -np.inf
            idx.append(int(np.argmax(score)))
    return np.array(idx)


def fekete_indices(cloud: np.ndarray, k: int, sweeps: int = 50) -> np.ndarray:
    """Indices of ``k`` cloud points locally maximizing the Vandermonde product.

    Starts from Leja points and swaps single points for better cloud points
    until a full sweep brings no improvement.
    """
    idx = leja_points(cloud, k)
    L = _log_dist(cloud, cloud[idx])
    for _ in range(sweeps):
        improved = False
        for j in range(k):
            others = np.delete(np.arange(k), j)
            gain = L[:, others].sum(axis=1)
            gain[idx] = -np.inf
            cur = L[idx[j], others].sum()
            best = int(np.argmax(gain))
            if gain[best] > cur + 1e-13:
                idx[j] = best
                L[:, j] = _log_dist(cloud, cloud[best:best + 1])[:, 0]
                improved = True
        if not improved:
            break
    return idx


def transfinite_diameter(points: np.ndarray) -> float:
    """``(prod_{i<j} |x_i - x_j|)^(2 / (k (k - 1)))``."""
    k = points.size
    L = _log_dist(points, points)[np.triu_indices(k, 1)]
    return float(math.exp(L.mean()))


def _fekete_estimate(cloud: np.ndarray, ks: Sequence[int]) -> CapacityEstimate:
    cloud = np.unique(np.asarray(cloud, dtype=complex).ravel())
    if cloud.size < 2:
        return CapacityEstimate(0.0, CapacityMethod.FEKETE, int(cloud.size), 0.0)
    ks = [k for k in ks if k <= cloud.size]
    if not ks:
        ks = [cloud.size]
    d = np.array([transfinite_diameter(cloud[fekete_indices(cloud, k)]) for k in ks])
    k = np.array(ks, dtype=float)
    # log d_k = log C + a log(k)/(k-1) + b/(k-1)
    if len(ks) >= 3:
        A = np.column_stack([np.ones_like(k), np.log(k) / (k - 1), 1 / (k - 1)])
        full = np.linalg.lstsq(A, np.log(d), rcond=None)[0][0]
        tail = np.linalg.lstsq(A[1:], np.log(d[1:]), rcond=None)[0][0] if len(ks) >= 4 else full
        value, unc = math.exp(full), abs(math.exp(full) - math.exp(tail))
    else:
        value, unc = float(d[-1]), float(abs(d[-1] - d[0]))
    return CapacityEstimate(value, CapacityMethod.FEKETE, int(ks[-1]), unc,
                            {"k": list(map(int, ks)), "diameters": d.tolist()})


def capacity_1d(K: SetDescriptor, ks: Sequence[int] = (16, 24, 32, 48, 64)) -> CapacityEstimate:
    """Logarithmic capacity of a compact set.

    Discs, segments and balls of C^n use closed forms.  Point clouds use
    Fekete points for each ``k`` in ``ks`` and extrapolate the diameters
    ``d_k`` with the fit ``log d_k = log C + a log(k)/(k-1) + b/(k-1)``;
    the uncertainty is the change when the smallest ``k`` is dropped.
    """
    if isinstance(K, Disc):
        return CapacityEstimate(float(K.radius), CapacityMethod.CLOSED_FORM)
    if isinstance(K, Segment):
        return CapacityEstimate(K.length / 4, CapacityMethod.CLOSED_FORM)
    if isinstance(K, BallCn):
        return CapacityEstimate(float(K.radius), CapacityMethod.CLOSED_FORM)
    if isinstance(K, PointCloud):
        pts = np.asarray(K.points, dtype=complex)
        if pts.ndim == 2:
            if pts.shape[1] != 1:
                raise DomainError("point-cloud capacity is implemented in C only")
            pts = pts[:, 0]
        if pts.size == 0:
            raise DomainError("empty set")
        return _fekete_estimate(pts, ks)
    raise TypeError(f"unsupported set descriptor {type(K).__name__}")


@dataclass
class Corollary44Report:
    alpha: float
    lhs_upper: float
    rhs: float
    capacity: CapacityEstimate
    status: str

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "lhs_upper": self.lhs_upper, "rhs": self.rhs,
                "capacity": self.capacity.to_dict(), "status": self.status}


def corollary44_check(K: SetDescriptor, alpha: float, samples: int = 4000,
                      capacity: Optional[CapacityEstimate] = None) -> Corollary44Report:
    """One-sided check ``h^alpha(K) <= (1/alpha) (5 e C_log(K))^alpha`` in C.

    The left side is the content estimate of a sample of ``K`` whose balls
    are widened by the sample spacing, so it bounds the content of ``K``
    itself from above.  A failure is reported as ``"inconclusive"``: the
    estimate is not the infimum.
    """
    if not 0 < alpha <= 2:
        raise DomainError("alpha must lie in (0, 2]")
    if isinstance(K, PointCloud):
        pts, spacing = np.asarray(K.points, dtype=complex).ravel(), 0.0
    elif isinstance(K, (Disc, Segment)):
        pts, spacing = K.sample(samples)
    else:
        raise TypeError("corollary44_check works with planar sets")
    if np.any(np.abs(pts) > 1 + 1e-12):
        raise DomainError("K must lie in the closed unit disc")
    lhs, _ = hausdorff_content_upper(pts, alpha, resolution=spacing)
    cap = capacity or capacity_1d(K)
    rhs = (5 * math.e * cap.value) ** alpha / alpha
    return Corollary44Report(alpha, lhs, rhs, cap, "pass" if lhs <= rhs else "inconclusive")
