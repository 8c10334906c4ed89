"""Scalar summaries of a tessellation used by the distribution tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..tessellation import Tessellation


@dataclass(frozen=True)
class SummaryStatistic:
    name: str
    extract: Callable[[Tessellation], float]
    discrete: bool

    def __call__(self, T: Tessellation):
        return self.extract(T)


cell_count = SummaryStatistic("cell_count", lambda T: len(T.cells), True)
interior_boundary_length = SummaryStatistic("interior_boundary_length", lambda T: T.interior_boundary_length, False)
trivial_indicator = SummaryStatistic("trivial_indicator", lambda T: int(T.is_trivial), True)
origin_cell_area = SummaryStatistic("origin_cell_area", lambda T: float(T.origin_cell.measure), False)

STATISTICS = {s.name: s for s in (cell_count, interior_boundary_length, trivial_indicator, origin_cell_area)}
