"""Iteration (nesting) of tessellations and rescale-and-restrict."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

from .geometry import ConvexPolytope, Q, intersect, scale_polytope
from .tessellation import Tessellation


def enumerate_cells(T: Tessellation) -> list:
    """``[(1, origin cell), (2, ...), ...]`` in canonical order."""
    return list(enumerate(T.cells, start=1))


class TessellationVector:
    """A sequence ``(R^1, R^2, ...)`` of tessellations of one window.

    Components come from an explicit ``head`` list, then from ``tail(m)``
    for ``m > len(head)``; tail values are memoized.  Subclasses may override
    :meth:`for_cell` to pick a component from the cell itself rather than its
    position in the enumeration.
    """

    def __init__(self, head: Sequence[Tessellation] = (), tail: Optional[Callable[[int], Tessellation]] = None):
        self.head = tuple(head)
        self.tail = tail
        self._tail_cache: dict = {}

    @classmethod
    def trivial(cls, window: ConvexPolytope) -> "TessellationVector":
        T = Tessellation.trivial(window)
        return cls((), lambda m: T)

    def __getitem__(self, m: int) -> Tessellation:
        if m < 1:
            raise IndexError("components are indexed from 1")
        if m <= len(self.head):
            return self.head[m - 1]
        if self.tail is None:
            raise IndexError(f"vector has only {len(self.head)} components")
        try:
            return self._tail_cache[m]
        except KeyError:
            R = self._tail_cache[m] = self.tail(m)
            return R

    def for_cell(self, index: int, cell: ConvexPolytope) -> Tessellation:
        return self[index]


def refine_cell(C: ConvexPolytope, R: Tessellation) -> list:
    """Cells ``C ∩ D`` for ``D ∈ R`` with nonempty interior."""
    if R.is_trivial:
        return [C]
    out = []
    for D in R.cells:
        piece = intersect(C, D)
        if piece is not None:
            out.append(piece)
    return out


def iterate(T: Tessellation, R: TessellationVector) -> Tessellation:
    """``T ⊞ R``: cell ``k`` of ``T`` is cut along the cells of component ``k``."""
    cells = []
    for k, C in enumerate_cells(T):
        comp = R.for_cell(k, C)
        if comp.window != T.window:
            raise ValueError(f"component for cell {k} tessellates {comp.window!r}, expected {T.window!r}")
        cells.extend(refine_cell(C, comp))
    return Tessellation(T.window, cells)


def nested_iterate(T: Tessellation, vectors: Sequence[TessellationVector]) -> Tessellation:
    """``(((T ⊞ R_1) ⊞ R_2) ... ⊞ R_k)``; the fold is left-nested."""
    for R in vectors:
        T = iterate(T, R)
    return T


def rescale_restrict(T: Tessellation, a, W: ConvexPolytope) -> Tessellation:
    """``aT ∧ W``: scale every cell by ``a`` and intersect with ``W``.

    ``W`` must lie inside the scaled window ``a·T.window``.  Any ``a >= 1`` is
    accepted; ``a = 1`` is a plain restriction.
    """
    a = Q(a)
    if not a >= 1:
        raise ValueError("scale factor must be at least 1")
    if a == 1:
        if W == T.window:
            return T
        return T.restrict(W)
    if not scale_polytope(T.window, a).contains(W):
        raise ValueError("target window is not covered by the scaled tessellation")
    if T.is_trivial:
        return Tessellation.trivial(W)
    # pre-filter on bounding boxes in unscaled coordinates
    b = 1 / a
    d = W.dim
    wb = W.bbox
    lo = [x * b for x in wb[:d]]
    hi = [x * b for x in wb[d:]]
    cells = []
    for C in T.cells:
        cb = C.bbox
        if any(cb[i] >= hi[i] or cb[d + i] <= lo[i] for i in range(d)):
            continue
        piece = intersect(scale_polytope(C, a), W)
        if piece is not None:
            cells.append(piece)
    return Tessellation(W, cells)
