"""JSON input documents: measures, polynomials, Green potentials and planar sets.

Accepted top-level shapes (``dimension`` defaults to 1)::

    {"dimension": 1, "atoms": [{"location": [re, im], "weight": w}, ...]}
    {"poly": {"factors": [{"root": [re, im], "multiplicity": m}], "lead": [re, im]},
     "normalize": true}
    {"poly": {"terms": [{"exponent": [1, 0], "coefficient": [re, im]}]}, "dimension": 2}
    {"builtin": "log_norm" | "log_max" | "re_z" | "zero", "dimension": 2}
    {"domain": "unit-ball", "dimension": 1, "poles": [{"location": ..., "weight": w}]}
    {"set": {"kind": "disc", "radius": r, "center": [re, im]}}
    {"set": {"kind": "segment", "a": [re, im], "b": [re, im]}}
    {"set": {"kind": "cloud", "points": [[re, im], ...]}}

A location in C^n is a list of ``[re, im]`` pairs; in C a bare
``[re, im]`` pair or a real number is also accepted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .ball.harness import GreenPotentialSpec, green_oracle
from .errors import DomainError
from .points import decode_point, norm
from .potentials import (AtomicMeasure, FactoredPolynomial, Polynomial, PshOracle, discrete_potential,
                         from_function, log_poly_potential)
from .principles.capacity import Disc, PointCloud, Segment

BUILTINS = ("log_norm", "log_max", "re_z", "zero")


@dataclass
class Problem:
    """Everything a harness may need from one input document."""
    document: dict
    dim: int
    potential: Optional[PshOracle] = None
    polynomial: Optional[FactoredPolynomial] = None
    green: Optional[GreenPotentialSpec] = None
    capacity_set: object = None
    kind: str = ""

    @property
    def singular_points(self) -> np.ndarray:
        """Atoms, roots or poles as an ``(m, n)`` array (empty if none)."""
        if self.polynomial is not None:
            return self.polynomial.roots[:, None]
        if self.green is not None:
            return self.green.poles
        if self.potential is not None and self.potential.measure is not None:
            return self.potential.measure.locations
        if self.kind == "builtin" and self.document.get("builtin") in ("log_norm", "log_max"):
            return np.zeros((1, self.dim), dtype=complex)
        return np.zeros((0, self.dim), dtype=complex)


def _complex(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    raise DomainError(f"cannot read a complex number from {obj!r}")


def _location(obj, dim: int) -> np.ndarray:
    z = decode_point(obj)
    if z.size != dim:
        raise DomainError(f"location {obj!r} has {z.size} coordinates, expected {dim}")
    return z


def _builtin(name: str, dim: int) -> PshOracle:
    if name == "log_norm" and dim == 1:
        # log|z| is the potential of a unit atom at 0; the exact oracle is much faster
        return discrete_potential(AtomicMeasure(np.zeros((1, 1)), np.ones(1)), label=name)
    if name == "log_norm":
        def f(p):
            with np.errstate(divide="ignore"):
                return np.log(norm(p))
    elif name == "log_max":
        def f(p):
            with np.errstate(divide="ignore"):
                return np.log(np.max(np.abs(p), axis=1))
    elif name == "re_z":
        def f(p):
            return p[:, 0].real
    elif name == "zero":
        def f(p):
            return np.zeros(p.shape[0])
    else:
        raise DomainError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")
    return from_function(dim, f, label=name)


def _poly(doc: dict, dim: int) -> tuple:
    if "factors" in doc:
        if dim != 1:
            raise DomainError("factored polynomials live in one variable")
        roots = [_complex(f["root"]) for f in doc["factors"]]
        mult = [int(f.get("multiplicity", 1)) for f in doc["factors"]]
        return FactoredPolynomial(np.array(roots, dtype=complex), np.array(mult, dtype=int),
                                  _complex(doc.get("lead", 1.0))), None
    if "terms" in doc:
        terms = {tuple(t["exponent"]): _complex(t["coefficient"]) for t in doc["terms"]}
        return None, Polynomial(terms, dim)
    raise DomainError("poly needs 'factors' or 'terms'")


def parse_problem(doc: dict) -> Problem:
    """Build the oracles described by one input document."""
    if not isinstance(doc, dict):
        raise DomainError("input document must be a JSON object")
    dim = int(doc.get("dimension", 1))
    if dim < 1:
        raise DomainError("dimension must be >= 1")
    if "set" in doc:
        s = doc["set"]
        kind = s.get("kind")
        if kind == "disc":
            K = Disc(float(s["radius"]), _complex(s.get("center", 0.0)))
        elif kind == "segment":
            K = Segment(_complex(s["a"]), _complex(s["b"]))
        elif kind == "cloud":
            K = PointCloud(np.array([_complex(p) for p in s["points"]], dtype=complex))
        else:
            raise DomainError(f"unknown set kind {kind!r}")
        return Problem(doc, 1, capacity_set=K, kind="set")
    if doc.get("domain") == "unit-ball":
        poles = doc.get("poles", [])
        locs = np.array([_location(p["location"], dim) for p in poles], dtype=complex).reshape(-1, dim)
        w = np.array([float(p["weight"]) for p in poles])
        spec = GreenPotentialSpec(locs, w, dim)
        return Problem(doc, dim, potential=green_oracle(spec), green=spec, kind="green")
    if "atoms" in doc:
        atoms = doc["atoms"]
        if not atoms:
            raise DomainError("atoms list is empty")
        locs = np.array([_location(a["location"], dim) for a in atoms], dtype=complex)
        w = np.array([float(a["weight"]) for a in atoms])
        mu = AtomicMeasure(locs, w)
        return Problem(doc, dim, potential=discrete_potential(mu, label="atoms"), kind="atoms")
    if "poly" in doc:
        fp, mp = _poly(doc["poly"], dim)
        normalize = bool(doc.get("normalize", True))
        V = log_poly_potential(fp if fp is not None else mp, normalize=normalize)
        return Problem(doc, dim, potential=V, polynomial=fp, kind="poly")
    if "builtin" in doc:
        return Problem(doc, dim, potential=_builtin(doc["builtin"], dim), kind="builtin")
    raise DomainError("input needs one of 'atoms', 'poly', 'builtin', 'set' or domain 'unit-ball'")


def load_document(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON ({exc})") from None
