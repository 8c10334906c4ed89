"""Markov jump simulation of a STIT tessellation restricted to a window.

Every living cell ``C`` carries an independent exponential lifetime with
rate ``Λ([C])``, drawn when the cell is born.  When it expires the cell is
split by a hyperplane drawn from ``Λ_C`` and both children start their own
clocks.  By memorylessness this is the same law as the construction with one
global clock array and a minimum over cells.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import ConvexPolytope, Hyperplane, clip
from .measure import DrivingMeasure
from .tessellation import Tessellation

DEFAULT_EVENT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """Raised when a run would need more split events than allowed."""


def as_rng(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, (int, np.integer)):
        return np.random.default_rng(int(stream))
    raise TypeError("stream must be a numpy Generator or an integer seed")


@dataclass(frozen=True)
class JumpEvent:
    time: float
    parent_key: bytes
    hyperplane: Hyperplane
    child_keys: tuple


@dataclass(frozen=True)
class SimRun:
    window: ConvexPolytope
    measure: DrivingMeasure
    t_end: float
    seed: Optional[int]
    events: tuple = field(repr=False)
    final: Tessellation = field(repr=False)
    # death time drawn at birth for every living cell, by cell key
    clocks: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def event_count(self) -> int:
        return len(self.events)


def _split(C: ConvexPolytope, measure: DrivingMeasure, rng):
    while True:
        H = measure.sample(C, rng)
        low, high = clip(C, H)
        # a supporting hyperplane (offset on a vertex) does not split; redraw
        if low is not None and high is not None:
            return H, low, high


def _rate(C: ConvexPolytope, measure) -> float:
    # windows are reused across many runs, so remember the last measure's mass
    hit = C.__dict__.get("_rate")
    if hit is not None and hit[0] is measure:
        return hit[1]
    r = float(measure.mass(C))
    C.__dict__["_rate"] = (measure, r)
    return r


def _simulate(cells, t0: float, t_end: float, measure, rng, budget: int, events, clocks=None):
    # events=None skips the log; the random draws are the same either way
    heap = []
    seq = 0
    for C in cells:
        if clocks is not None and C.key in clocks:
            death = clocks[C.key]
        else:
            death = t0 + rng.standard_exponential() / _rate(C, measure)
        heap.append((death, seq, C))
        seq += 1
    if len(heap) == 1 and heap[0][0] > t_end:
        return [heap[0][2]], {heap[0][2].key: heap[0][0]}
    heapq.heapify(heap)
    splits = len(events) if events is not None else 0
    while heap and heap[0][0] <= t_end:
        t, _, C = heapq.heappop(heap)
        H, low, high = _split(C, measure, rng)
        splits += 1
        if events is not None:
            events.append(JumpEvent(t, C.key, H, (low.key, high.key)))
        if splits > budget:
            raise BudgetExceeded(f"more than {budget} split events before time {t_end}")
        for child in (low, high):
            rate = float(measure.mass(child))
            heapq.heappush(heap, (t + rng.standard_exponential() / rate, seq, child))
            seq += 1
    return [C for _, _, C in heap], {C.key: d for d, _, C in heap}


def _check_run(window, measure, t_end, budget):
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if window.dim != measure.dim:
        raise ValueError("measure and window dimensions differ")
    _check_budget(window, measure, t_end, budget)


def _check_budget(window, measure, t_end, budget):
    expected_first = t_end * _rate(window, measure)
    if expected_first > budget:
        raise BudgetExceeded(
            f"t_end * Λ([W]) = {expected_first:.3g} exceeds the event budget {budget}"
        )


def run(
    window: ConvexPolytope,
    measure: DrivingMeasure,
    t_end: float,
    stream,
    *,
    budget: int = DEFAULT_EVENT_BUDGET,
) -> SimRun:
    """Simulate ``Y ∧ window`` on ``[0, t_end]`` starting from ``{window}``."""
    _check_run(window, measure, t_end, budget)
    seed = int(stream) if isinstance(stream, (int, np.integer)) else None
    rng = as_rng(stream)
    events: list = []
    cells, clocks = _simulate([window], 0.0, float(t_end), measure, rng, budget, events)
    return SimRun(window, measure, float(t_end), seed, tuple(events), Tessellation(window, cells), clocks)


def sample_final(window, measure, t_end, stream, *, budget: int = DEFAULT_EVENT_BUDGET) -> Tessellation:
    """``Y_{t_end} ∧ window`` without keeping the event log; equals ``run(...).final``."""
    _check_run(window, measure, t_end, budget)
    cells, _ = _simulate([window], 0.0, float(t_end), measure, as_rng(stream), budget, None)
    return Tessellation(window, cells)


def continue_run(r: SimRun, t_more: float, stream, *, budget: int = DEFAULT_EVENT_BUDGET) -> SimRun:
    """Extend ``r`` by ``t_more``.

    Living cells keep the lifetimes drawn at their birth; ``stream`` supplies
    the randomness for every split and every cell born after ``r.t_end``.
    """
    if not t_more > 0:
        raise ValueError("t_more must be positive")
    rng = as_rng(stream)
    events = list(r.events)
    t_end = r.t_end + float(t_more)
    cells, clocks = _simulate(r.final.cells, r.t_end, t_end, r.measure, rng, budget, events, r.clocks)
    return SimRun(r.window, r.measure, t_end, r.seed, tuple(events), Tessellation(r.window, cells), clocks)


def replay(window: ConvexPolytope, events, until: float = float("inf")) -> Tessellation:
    """Apply logged events with ``time <= until`` to ``{window}``."""
    cells = {window.key: window}
    for e in events:
        if e.time > until:
            break
        C = cells.pop(e.parent_key)
        low, high = clip(C, e.hyperplane)
        if low is None or high is None or (low.key, high.key) != tuple(e.child_keys):
            raise ValueError(f"event at t={e.time} does not reproduce its logged children")
        cells[low.key] = low
        cells[high.key] = high
    return Tessellation(window, cells.values())


def snapshot(r: SimRun, t: float) -> Tessellation:
    """Right-continuous state ``Y_t ∧ W`` for ``0 < t <= t_end``."""
    if not 0 < t <= r.t_end:
        raise ValueError(f"snapshot time {t} outside (0, {r.t_end}]")
    if t == r.t_end:
        return r.final
    return replay(r.window, r.events, until=t)


def total_rate(T: Tessellation, measure: DrivingMeasure):
    """``Σ_{C ∈ T} Λ([C])``, the rate of the next split from state ``T``."""
    return sum((measure.mass(C) for C in T.cells), start=measure.mass(T.cells[0]) * 0)
