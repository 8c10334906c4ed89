import numpy as np
import pytest

from stitlab.geometry import ConvexPolytope, Hyperplane, Q, clip
from stitlab.iteration import enumerate_cells
from stitlab.stit import sample_final
from stitlab.tessellation import Tessellation

HALF = Q("1/2")


def _cut(W, normal, offset):
    low, high = clip(W, Hyperplane.through(normal, offset))
    return Tessellation(W, [low, high])


def test_enumeration_puts_origin_cell_first(unit_box):
    T = _cut(unit_box, (1, 0), Q(1) / 4)
    assert T.origin_cell.contains_origin()
    rev = Tessellation(unit_box, list(reversed(T.cells)))
    assert rev.cells == T.cells
    assert enumerate_cells(Tessellation.trivial(unit_box)) == [(1, unit_box)]


def test_origin_on_boundary_uses_smallest_touching_key(unit_box):
    T = _cut(unit_box, (1, 0), 0)
    first = T.cells[0]
    assert first.contains_origin(strict=False)
    assert first.key == min(c.key for c in T.cells)


def test_equality_is_exact(unit_box):
    a = _cut(unit_box, (1, 0), Q(1) / 4)
    b = _cut(unit_box, (1, 0), Q(1) / 4)
    c = _cut(unit_box, (1, 0), Q(1) / 4 + Q(f"1/{10**30}"))
    assert a == b and hash(a) == hash(b)
    assert a != c


def test_boundary_length_and_partition(unit_box, axis):
    T = _cut(unit_box, (1, 0), Q(1) / 4)
    assert T.interior_boundary_length == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        sample_final(unit_box, axis, 3.0, rng).check_partition()


def test_boundary_misses(unit_box):
    T = _cut(unit_box, (1, 0), Q(1) / 4)
    inner = ConvexPolytope.box(-Q(1) / 4, -Q(1) / 4, Q(1) / 4, Q(1) / 4)
    assert T.boundary_misses(inner)
    assert not T.boundary_misses(ConvexPolytope.box(0, 0, HALF, HALF))


def test_restrict(unit_box):
    T = _cut(unit_box, (1, 0), Q(1) / 4)
    inner = ConvexPolytope.box(-Q(1) / 8, -Q(1) / 8, Q(1) / 8, Q(1) / 8)
    assert T.restrict(inner).is_trivial
    with pytest.raises(ValueError):
        T.restrict(ConvexPolytope.box(0, 0, 2, 2))
