"""Finite tessellations of a convex window."""

from __future__ import annotations

from functools import cached_property
from typing import Iterable

from .geometry import ConvexPolytope, intersect


def _enumeration_order(cells) -> tuple:
    if len(cells) == 1:
        return tuple(cells)
    by_key = sorted(cells, key=lambda c: c.key)
    first = None
    for c in by_key:
        if c.contains_origin(strict=True):
            first = c
            break
    if first is None:
        # origin on a boundary (or outside the window): smallest key touching it
        for c in by_key:
            if c.contains_origin(strict=False):
                first = c
                break
    if first is None:
        return tuple(by_key)
    return (first,) + tuple(c for c in by_key if c is not first)


class Tessellation:
    """Interior-disjoint convex cells covering ``window``.

    ``cells`` is always in canonical enumeration order: the cell containing
    the origin comes first, the remaining ones follow in ascending
    :func:`~stitlab.geometry.canonical_key` order.  Equality is exact.
    """

    __slots__ = ("window", "cells", "__dict__")

    def __init__(self, window: ConvexPolytope, cells: Iterable[ConvexPolytope]):
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "cells", _enumeration_order(list(cells)))

    def __setattr__(self, name, value):
        raise AttributeError("Tessellation is immutable")

    @classmethod
    def trivial(cls, window: ConvexPolytope) -> "Tessellation":
        return cls(window, (window,))

    def __eq__(self, other):
        if not isinstance(other, Tessellation):
            return NotImplemented
        return self.window == other.window and self.cells == other.cells

    def __hash__(self):
        return hash((self.window, self.cells))

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __repr__(self):
        return f"Tessellation({len(self.cells)} cells in {self.window!r})"

    @property
    def dim(self) -> int:
        return self.window.dim

    @property
    def is_trivial(self) -> bool:
        return len(self.cells) == 1

    @property
    def origin_cell(self) -> ConvexPolytope:
        return self.cells[0]

    @cached_property
    def keys(self) -> tuple:
        return tuple(c.key for c in self.cells)

    @cached_property
    def interior_boundary_length(self) -> float:
        """Length of ``∂T ∩ Int(W)``; in dimension 1 the number of cut points."""
        if self.dim == 1:
            return float(len(self.cells) - 1)
        return (sum(c.perimeter for c in self.cells) - self.window.perimeter) / 2

    def boundary_misses(self, region: ConvexPolytope) -> bool:
        """True iff ``∂T ∩ Int(region) = ∅`` for a convex ``region ⊆ window``.

        A connected open set avoids the boundary exactly when it lies inside
        a single cell.
        """
        return any(c.contains(region) for c in self.cells)

    def restrict(self, sub: ConvexPolytope) -> "Tessellation":
        """``T ∧ sub`` for a convex ``sub`` inside the window."""
        if not self.window.contains(sub):
            raise ValueError("restriction window is not inside the tessellated window")
        out = []
        for c in self.cells:
            piece = intersect(c, sub)
            if piece is not None:
                out.append(piece)
        return Tessellation(sub, out)

    def check_partition(self) -> None:
        """Raise ``AssertionError`` unless the cells partition the window exactly."""
        total = sum((c.measure for c in self.cells), start=type(self.window.measure)(0))
        assert total == self.window.measure, "cell measures do not sum to the window's"
        for c in self.cells:
            assert self.window.contains(c), "cell sticks out of the window"
        cells = self.cells
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                assert intersect(cells[i], cells[j]) is None, "cells overlap"
