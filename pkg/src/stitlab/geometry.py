"""Exact convex polytopes in dimension 1 and 2.

Coordinates are ``gmpy2.mpq`` rationals throughout.  A polytope is stored in
canonical form: in the plane the vertices run counterclockwise starting from
the lexicographically smallest one, on the line the vertices are ``(lo,), (hi,)``.
Two polytopes are therefore equal as point sets iff their vertex tuples are
equal, which is what makes tessellation equality testable exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import atan2, gcd, hypot, pi
from numbers import Rational
from typing import Iterable, Optional

import gmpy2
from gmpy2 import mpq


class cached_property:
    """Lock-free ``functools.cached_property``; polytopes are immutable."""

    def __init__(self, func):
        self.func = func
        self.name = func.__name__
        self.__doc__ = func.__doc__

    def __get__(self, obj, owner=None):
        if obj is None:
            return self
        value = obj.__dict__[self.name] = self.func(obj)
        return value

Scalar = type(mpq(0))
Point = tuple

ZERO = mpq(0)
ONE = mpq(1)


def Q(value) -> Scalar:
    """Coerce ``value`` to an exact rational.

    Accepts ints, mpq, Fraction, floats (converted exactly) and strings of the
    form ``"p/q"``, ``"p"`` or a finite decimal such as ``"0.25"``.
    """
    if isinstance(value, Scalar):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, gmpy2.mpz(0).__class__)):
        return mpq(value)
    if isinstance(value, Fraction) or isinstance(value, Rational):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite scalar {value!r}")
        return mpq(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            if int(den) == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return mpq(int(num), int(den))
        return mpq(Fraction(text))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")


def format_scalar(x: Scalar) -> str:
    """Lossless ``"numerator/denominator"`` text for ``x``."""
    return f"{x.numerator}/{x.denominator}"


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@dataclass(frozen=True)
class Direction:
    """Normal direction of a hyperplane, reduced to coprime integers.

    The first nonzero component is positive, so the representation is
    unique for each class of parallel hyperplanes.
    """

    components: tuple

    @classmethod
    def of(cls, *vector) -> "Direction":
        if len(vector) == 1 and isinstance(vector[0], (tuple, list)):
            vector = tuple(vector[0])
        qs = [Q(v) for v in vector]
        if all(q == 0 for q in qs):
            raise ValueError("direction must be nonzero")
        den = 1
        for q in qs:
            den = den * int(q.denominator) // gcd(den, int(q.denominator))
        ints = [int(q * den) for q in qs]
        g = 0
        for i in ints:
            g = gcd(g, abs(i))
        ints = [i // g for i in ints]
        first = next(i for i in ints if i != 0)
        if first < 0:
            ints = [-i for i in ints]
        return cls(tuple(ints))

    @property
    def dim(self) -> int:
        return len(self.components)

    def dot(self, point) -> Scalar:
        if len(self.components) == 1:
            return self.components[0] * point[0]
        return self.components[0] * point[0] + self.components[1] * point[1]


@dataclass(frozen=True)
class Hyperplane:
    """The set ``{x : <normal, x> = offset}``."""

    normal: Direction
    offset: Scalar

    @classmethod
    def through(cls, normal, offset) -> "Hyperplane":
        """Build a hyperplane from an arbitrary (unreduced) normal vector."""
        raw = [Q(c) for c in (normal.components if isinstance(normal, Direction) else normal)]
        d = Direction.of(*raw)
        # rescale the offset by the factor taking raw -> d
        i = next(k for k, c in enumerate(raw) if c != 0)
        factor = mpq(d.components[i]) / raw[i]
        return cls(d, Q(offset) * factor)

    @property
    def dim(self) -> int:
        return self.normal.dim

    def side(self, point) -> int:
        v = self.normal.dot(point) - self.offset
        return (v > 0) - (v < 0)


def _canonical_rotation(verts: list) -> tuple:
    i = min(range(len(verts)), key=lambda k: verts[k])
    return tuple(verts[i:] + verts[:i])


class ConvexPolytope:
    """Compact convex polytope with nonempty interior in dimension 1 or 2.

    Instances are immutable; use :meth:`from_vertices` for untrusted input.
    """

    __slots__ = ("dim", "vertices", "__dict__")

    def __init__(self, dim: int, vertices: tuple):
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "vertices", vertices)

    def __setattr__(self, name, value):
        raise AttributeError("ConvexPolytope is immutable")

    @classmethod
    def from_vertices(cls, points: Iterable) -> "ConvexPolytope":
        """Validate and canonicalize a vertex list.

        In the plane the points must already be in convex position (either
        orientation); duplicates and collinear-redundant points are removed.
        """
        pts = [tuple(Q(c) for c in (p if isinstance(p, (tuple, list)) else (p,))) for p in points]
        if not pts:
            raise ValueError("empty vertex list")
        dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise ValueError("mixed dimensions in vertex list")
        if dim == 1:
            lo, hi = min(pts), max(pts)
            if not lo < hi:
                raise ValueError("interval must have positive length")
            return cls(1, (lo, hi))
        if dim != 2:
            raise ValueError(f"unsupported dimension {dim}")
        dedup = []
        for p in pts:
            if not dedup or dedup[-1] != p:
                dedup.append(p)
        while len(dedup) > 1 and dedup[0] == dedup[-1]:
            dedup.pop()
        if _signed_area2(dedup) < 0:
            dedup.reverse()
        # drop collinear-redundant vertices
        changed = True
        while changed and len(dedup) >= 3:
            changed = False
            n = len(dedup)
            for i in range(n):
                a, b, c = dedup[i - 1], dedup[i], dedup[(i + 1) % n]
                if _cross(a[0], a[1], b[0], b[1], c[0], c[1]) == 0:
                    del dedup[i]
                    changed = True
                    break
        if len(dedup) < 3:
            raise ValueError("polygon must have positive area")
        n = len(dedup)
        for i in range(n):
            a, b, c = dedup[i - 1], dedup[i], dedup[(i + 1) % n]
            if _cross(a[0], a[1], b[0], b[1], c[0], c[1]) <= 0:
                raise ValueError("vertices are not in strictly convex position")
        # a star-shaped but self-overlapping turn sequence would also pass the
        # local test; total turning must be one revolution
        if _winding_turns(dedup) != 1:
            raise ValueError("vertices are not in strictly convex position")
        return cls(2, _canonical_rotation(dedup))

    @classmethod
    def box(cls, x0, y0, x1, y1) -> "ConvexPolytope":
        return cls.from_vertices([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    @classmethod
    def interval(cls, lo, hi) -> "ConvexPolytope":
        return cls.from_vertices([(lo,), (hi,)])

    def __eq__(self, other):
        if not isinstance(other, ConvexPolytope):
            return NotImplemented
        return self.dim == other.dim and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.dim, self.vertices))

    def __repr__(self):
        pts = ", ".join("(" + ", ".join(format_scalar(c) for c in v) + ")" for v in self.vertices)
        return f"ConvexPolytope[{self.dim}]({pts})"

    @cached_property
    def key(self) -> bytes:
        return canonical_key(self)

    @cached_property
    def measure(self) -> Scalar:
        """Length (dim 1) or area (dim 2), exact."""
        if self.dim == 1:
            return self.vertices[1][0] - self.vertices[0][0]
        return _signed_area2(self.vertices) / 2

    @cached_property
    def perimeter(self) -> float:
        """Boundary length in the plane (floating point); 2 in dim 1 (two endpoints)."""
        if self.dim == 1:
            return 2.0
        v = self.vertices
        n = len(v)
        return sum(
            hypot(float(v[(i + 1) % n][0] - v[i][0]), float(v[(i + 1) % n][1] - v[i][1]))
            for i in range(n)
        )

    @cached_property
    def bbox(self) -> tuple:
        if self.dim == 1:
            return (self.vertices[0][0], self.vertices[1][0])
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    @cached_property
    def _edge_halfplanes(self) -> tuple:
        # (nx, ny, c) with interior on the side nx*x + ny*y <= c
        v = self.vertices
        n = len(v)
        out = []
        for i in range(n):
            (ax, ay), (bx, by) = v[i], v[(i + 1) % n]
            nx, ny = by - ay, ax - bx
            out.append((nx, ny, nx * ax + ny * ay))
        return tuple(out)

    def contains_point(self, point, strict: bool = False) -> bool:
        if self.dim == 1:
            lo, hi = self.vertices[0][0], self.vertices[1][0]
            x = point[0]
            return lo < x < hi if strict else lo <= x <= hi
        x, y = point
        for nx, ny, c in self._edge_halfplanes:
            s = nx * x + ny * y - c
            if s > 0 or (strict and s == 0):
                return False
        return True

    @cached_property
    def is_box(self) -> bool:
        """True for an interval or an axis-parallel rectangle."""
        if self.dim == 1:
            return True
        x0, y0, x1, y1 = self.bbox
        return len(self.vertices) == 4 and all(x in (x0, x1) and y in (y0, y1) for x, y in self.vertices)

    def contains(self, other: "ConvexPolytope") -> bool:
        """Closed containment ``other ⊆ self``."""
        a, b = self.bbox, other.bbox
        h = len(a) // 2
        if any(b[i] < a[i] for i in range(h)) or any(b[i] > a[i] for i in range(h, 2 * h)):
            return False
        if self.is_box:
            return True
        return all(self.contains_point(p) for p in other.vertices)

    def contains_origin(self, strict: bool = True) -> bool:
        return self.contains_point((ZERO,) * self.dim, strict=strict)


def _signed_area2(verts) -> Scalar:
    n = len(verts)
    s = ZERO
    for i in range(n):
        (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def _winding_turns(verts) -> int:
    # every turn is a strict left turn, so the exterior angles sum to 2*pi*k
    n = len(verts)
    total = 0.0
    for i in range(n):
        (ax, ay), (bx, by), (cx, cy) = verts[i - 1], verts[i], verts[(i + 1) % n]
        ux, uy = float(bx - ax), float(by - ay)
        vx, vy = float(cx - bx), float(cy - by)
        total += atan2(ux * vy - uy * vx, ux * vx + uy * vy)
    return round(total / (2 * pi))


def _make(dim: int, verts: list) -> ConvexPolytope:
    # trusted constructor: verts already strictly convex, CCW
    if dim == 1:
        return ConvexPolytope(1, tuple(verts))
    return ConvexPolytope(2, _canonical_rotation(verts))


def _split_polygon(verts, nx, ny, c):
    """Return the vertex lists of the ``<= c`` and ``>= c`` sides (either may be None)."""
    s = [nx * x + ny * y - c for x, y in verts]
    has_neg = any(v < 0 for v in s)
    has_pos = any(v > 0 for v in s)
    if not has_pos:
        return list(verts), None
    if not has_neg:
        return None, list(verts)
    neg, pos = [], []
    n = len(verts)
    for i in range(n):
        cur, sc = verts[i], s[i]
        j = (i + 1) % n
        sn = s[j]
        if sc <= 0:
            neg.append(cur)
        if sc >= 0:
            pos.append(cur)
        if (sc < 0 < sn) or (sn < 0 < sc):
            t = sc / (sc - sn)
            nxt = verts[j]
            p = (cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1]))
            neg.append(p)
            pos.append(p)
    return neg, pos


def clip(P: ConvexPolytope, H: Hyperplane):
    """Split ``P`` by ``H`` into the closed sides ``<= offset`` and ``>= offset``.

    A side with empty interior is returned as ``None``.
    """
    if P.dim != H.dim:
        raise ValueError("dimension mismatch between polytope and hyperplane")
    if P.dim == 1:
        lo, hi = P.vertices[0][0], P.vertices[1][0]
        x = H.offset / H.normal.components[0]
        if x <= lo:
            return None, P
        if x >= hi:
            return P, None
        return _make(1, [(lo,), (x,)]), _make(1, [(x,), (hi,)])
    nx, ny = H.normal.components
    neg, pos = _split_polygon(P.vertices, nx, ny, H.offset)
    if neg is None:
        return None, P
    if pos is None:
        return P, None
    return _make(2, neg), _make(2, pos)


def support_interval(P: ConvexPolytope, u: Direction) -> tuple:
    """``(min, max)`` of ``<u, x>`` over ``P``, exact."""
    comps = u.components
    if P.dim == 1:
        lo, hi = P.vertices[0][0] * comps[0], P.vertices[1][0] * comps[0]
        return (lo, hi) if lo <= hi else (hi, lo)
    a, b = comps
    if b == 0:
        x0, _, x1, _ = P.bbox
        return x0 * a, x1 * a
    if a == 0:
        _, y0, _, y1 = P.bbox
        return y0 * b, y1 * b
    values = [a * x + b * y for x, y in P.vertices]
    return min(values), max(values)


def scale_polytope(P: ConvexPolytope, c) -> ConvexPolytope:
    """The polytope ``cP = {c x : x in P}``."""
    c = Q(c)
    if c == 0:
        raise ValueError("scale factor must be nonzero")
    if c == 1:
        return P
    if P.dim == 1:
        a, b = P.vertices[0][0] * c, P.vertices[1][0] * c
        return _make(1, [(min(a, b),), (max(a, b),)])
    # a point reflection keeps the orientation in the plane
    return _make(2, [(x * c, y * c) for x, y in P.vertices])


def canonical_key(P: ConvexPolytope) -> bytes:
    # str(mpq) is canonical ("p/q" in lowest terms, "p" for integers)
    if P.dim == 1:
        body = f"{P.vertices[0][0]};{P.vertices[1][0]}"
    else:
        body = ";".join(f"{x},{y}" for x, y in P.vertices)
    return f"{P.dim}|{body}".encode("ascii")


def intersect(P: ConvexPolytope, K: ConvexPolytope) -> Optional[ConvexPolytope]:
    """``P ∩ K`` if it has nonempty interior, else ``None``."""
    if P.dim != K.dim:
        raise ValueError("dimension mismatch")
    if P.dim == 1:
        lo = max(P.vertices[0][0], K.vertices[0][0])
        hi = min(P.vertices[1][0], K.vertices[1][0])
        if not lo < hi:
            return None
        if lo == P.vertices[0][0] and hi == P.vertices[1][0]:
            return P
        return _make(1, [(lo,), (hi,)])
    px0, py0, px1, py1 = P.bbox
    kx0, ky0, kx1, ky1 = K.bbox
    if px1 <= kx0 or kx1 <= px0 or py1 <= ky0 or ky1 <= py0:
        return None
    verts = list(P.vertices)
    touched = False
    for nx, ny, c in K._edge_halfplanes:
        neg, pos = _split_polygon(verts, nx, ny, c)
        if neg is None:
            return None
        if pos is not None:
            verts = neg
            touched = True
    if not touched:
        return P
    if len(verts) < 3 or _signed_area2(verts) == 0:
        return None
    return _make(2, verts)


def min_gauge(W: ConvexPolytope, C: ConvexPolytope) -> Scalar:
    """Minimum over ``x in C`` of the gauge ``min{s >= 0 : x in sW}``.

    ``W`` must contain the origin in its interior.  ``C ∩ sW`` has nonempty
    interior exactly when ``s`` exceeds this value.
    """
    if W.dim == 1:
        lo, hi = W.vertices[0][0], W.vertices[1][0]
        c0, c1 = C.vertices[0][0], C.vertices[1][0]
        if c0 <= 0 <= c1:
            return ZERO

        def g(x):
            return x / hi if x >= 0 else x / lo

        return min(g(c0), g(c1))
    if C.contains_origin(strict=False):
        return ZERO
    hp = W._edge_halfplanes
    wv = W.vertices

    def gauge(x, y):
        return max((nx * x + ny * y) / c for nx, ny, c in hp)

    candidates = list(C.vertices)
    cv = C.vertices
    n = len(cv)
    for vx, vy in wv:
        for i in range(n):
            (px, py), (qx, qy) = cv[i], cv[(i + 1) % n]
            cp = vx * py - vy * px
            cq = vx * qy - vy * qx
            if (cp < 0 < cq) or (cq < 0 < cp):
                t = cp / (cp - cq)
                x, y = px + t * (qx - px), py + t * (qy - py)
                if x * vx + y * vy > 0:
                    candidates.append((x, y))
    return min(gauge(x, y) for x, y in candidates)


def unit_width(P: ConvexPolytope, u: Direction) -> float:
    """Width of ``P`` measured along the unit vector parallel to ``u``."""
    lo, hi = support_interval(P, u)
    norm = hypot(*[float(c) for c in u.components])
    return float(hi - lo) / norm
