"""Translation-invariant hyperplane measures.

A driving measure assigns to every cell ``C`` its hitting mass
``Λ([C])`` (the split rate of the cell) and samples hyperplanes from the
normalized restriction ``Λ_C``.  Three families are provided:

* :class:`DiscreteMeasure` -- finitely many normal directions with positive
  weights, Lebesgue measure on offsets.  Masses are exact rationals.
* :class:`IsotropicMeasure` -- uniform direction on ``[0, π)`` with density
  ``ρ`` (plane only).  Masses are floats.
* :class:`LebesguePoints` -- Lebesgue measure on the line.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import cos, hypot, pi, sin

import numpy as np
from gmpy2 import mpq

from .geometry import (
    ConvexPolytope,
    Direction,
    Hyperplane,
    Q,
    Scalar,
    format_scalar,
    support_interval,
)

# integer resolution of sampled isotropic normals
ISOTROPIC_NORMAL_BITS = 32


def dyadic_uniform(rng: np.random.Generator) -> Scalar:
    """Exact dyadic rational on ``[0, 1)`` with 53 fractional bits."""
    # Generator.random() is (uint64 >> 11) * 2**-53, so the float is exact
    return mpq(rng.random())


def _open_unit(rng: np.random.Generator) -> Scalar:
    u = dyadic_uniform(rng)
    while u == 0:
        u = dyadic_uniform(rng)
    return u


class DrivingMeasure:
    """Common interface; see the concrete subclasses."""

    dim: int
    exact: bool = True

    def mass(self, C: ConvexPolytope):
        raise NotImplementedError

    def sample(self, C: ConvexPolytope, rng: np.random.Generator) -> Hyperplane:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class DiscreteMeasure(DrivingMeasure):
    """``Λ = Σ_i w_i · (Lebesgue on offsets of hyperplanes with normal u_i)``.

    Offsets are measured along the canonical integer normal of each
    direction, so ``Λ([C]) = Σ_i w_i (hi_i - lo_i)`` with ``(lo_i, hi_i)`` the
    support interval of ``C`` in direction ``u_i``.
    """

    directions: tuple  # ((Direction, weight), ...)

    def __post_init__(self):
        if not self.directions:
            raise ValueError("discrete measure needs at least one direction")
        dims = {d.dim for d, _ in self.directions}
        if len(dims) != 1:
            raise ValueError("directions of mixed dimension")
        for _, w in self.directions:
            if not w > 0:
                raise ValueError("direction weights must be positive")
        seen = [d for d, _ in self.directions]
        if len(set(seen)) != len(seen):
            raise ValueError("duplicate direction in discrete measure")
        if dims == {2} and len(seen) < 2:
            # all hyperplanes parallel to one line gives unbounded cells
            raise ValueError("a planar discrete measure needs two non-parallel directions")

    @classmethod
    def of(cls, pairs) -> "DiscreteMeasure":
        return cls(tuple((d if isinstance(d, Direction) else Direction.of(*d), Q(w)) for d, w in pairs))

    @property
    def dim(self) -> int:
        return self.directions[0][0].dim

    def mass(self, C: ConvexPolytope) -> Scalar:
        total = mpq(0)
        for u, w in self.directions:
            lo, hi = support_interval(C, u)
            total += w * (hi - lo)
        return total

    def sample(self, C: ConvexPolytope, rng: np.random.Generator) -> Hyperplane:
        spans = []
        total = mpq(0)
        for u, w in self.directions:
            lo, hi = support_interval(C, u)
            total += w * (hi - lo)
            spans.append((total, u, lo, hi))
        if len(spans) == 1:
            _, u, lo, hi = spans[0]
        else:
            target = dyadic_uniform(rng) * total
            for cum, u, lo, hi in spans:
                if target < cum:
                    break
        return Hyperplane(u, lo + _open_unit(rng) * (hi - lo))

    def to_spec(self) -> dict:
        return {
            "kind": "discrete",
            "directions": [[str(c) for c in u.components] for u, _ in self.directions],
            "weights": [format_scalar(w) for _, w in self.directions],
        }


def axis_measure(weight=1) -> DiscreteMeasure:
    """Axis-parallel lines in the plane with equal weights (the default)."""
    return _axis_measure(Q(weight))


@lru_cache(maxsize=64)
def _axis_measure(w) -> DiscreteMeasure:
    return DiscreteMeasure(((Direction((1, 0)), w), (Direction((0, 1)), w)))


@dataclass(frozen=True)
class LebesguePoints(DrivingMeasure):
    """Lebesgue measure on the line: ``Λ([C])`` is the length of ``C``."""

    dim: int = 1

    def mass(self, C: ConvexPolytope) -> Scalar:
        return C.measure

    def sample(self, C: ConvexPolytope, rng: np.random.Generator) -> Hyperplane:
        lo, hi = C.vertices[0][0], C.vertices[1][0]
        return Hyperplane(Direction((1,)), lo + _open_unit(rng) * (hi - lo))

    def to_spec(self) -> dict:
        return {"kind": "lebesgue1d"}


@dataclass(frozen=True)
class IsotropicMeasure(DrivingMeasure):
    """Motion-invariant line measure ``ρ dθ dp`` with ``θ`` uniform on ``[0, π)``.

    ``Λ([C]) = ρ · perimeter(C)`` by the Cauchy formula.  Sampled normals are
    rounded to integer vectors of about 32 bits so that the split geometry
    stays exact; only the masses are floating point.
    """

    density: float = 1.0
    dim: int = 2
    exact = False

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError("isotropic density must be positive")

    def mass(self, C: ConvexPolytope) -> float:
        if C.dim != 2:
            raise ValueError("isotropic measure is planar")
        return self.density * C.perimeter

    def sample(self, C: ConvexPolytope, rng: np.random.Generator) -> Hyperplane:
        pts = [(float(x), float(y)) for x, y in C.vertices]
        diam = max(hypot(p[0] - q[0], p[1] - q[1]) for p in pts for q in pts)
        while True:
            theta = rng.random() * pi
            c, s = cos(theta), sin(theta)
            proj = [c * x + s * y for x, y in pts]
            if rng.random() * diam < max(proj) - min(proj):
                break
        scale = 1 << ISOTROPIC_NORMAL_BITS
        u = Direction.of(round(c * scale), round(s * scale))
        lo, hi = support_interval(C, u)
        return Hyperplane(u, lo + _open_unit(rng) * (hi - lo))

    def to_spec(self) -> dict:
        return {"kind": "isotropic", "density": repr(self.density)}


def lambda_of(measure: DrivingMeasure, C: ConvexPolytope):
    """Hitting mass ``Λ([C])``."""
    return measure.mass(C)


def sample_hitting(measure: DrivingMeasure, C: ConvexPolytope, rng: np.random.Generator) -> Hyperplane:
    """Draw a hyperplane from ``Λ_C``; it always cuts the interior of ``C``."""
    return measure.sample(C, rng)


def hits_interior(H: Hyperplane, C: ConvexPolytope) -> bool:
    lo, hi = support_interval(C, H.normal)
    return lo < H.offset < hi


def sample_hitting_by_rejection(measure: DrivingMeasure, W: ConvexPolytope, C: ConvexPolytope, rng):
    """Reference sampler: draw from ``Λ_W`` until the hyperplane hits ``C``.

    Kept to validate :func:`sample_hitting` against the textbook rejection
    construction; requires ``C ⊆ W``.  Returns ``(hyperplane, tries)``.
    """
    tries = 0
    while True:
        tries += 1
        H = measure.sample(W, rng)
        if hits_interior(H, C):
            return H, tries


def measure_from_spec(spec: dict, dim: int = 2) -> DrivingMeasure:
    """Build a measure from a config mapping (``kind`` plus parameters)."""
    kind = spec.get("kind", "axis")
    if kind == "axis":
        m = axis_measure(spec.get("weight", 1))
    elif kind == "discrete":
        dirs = spec.get("directions")
        if not dirs:
            raise ValueError("measure.directions: required for kind 'discrete'")
        weights = spec.get("weights", [1] * len(dirs))
        if len(weights) != len(dirs):
            raise ValueError("measure.weights: length must match measure.directions")
        m = DiscreteMeasure.of(zip([tuple(d) for d in dirs], weights))
    elif kind == "isotropic":
        m = IsotropicMeasure(float(spec.get("density", 1.0)))
    elif kind == "lebesgue1d":
        m = LebesguePoints()
    else:
        raise ValueError(f"measure.kind: unknown kind {kind!r}")
    if m.dim != dim:
        raise ValueError(f"measure.kind: {kind!r} is {m.dim}-dimensional, config says {dim}")
    return m
