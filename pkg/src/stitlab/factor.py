"""Coupling from the past for the renormalized chain.

The input is a :class:`~stitlab.streams.RandomnessField`: at every time
``n`` it holds an i.i.d. family of ``Y_1 ∧ W`` samples.  Starting from the
trivial tessellation at time ``-N`` and applying

    value(n+1) = (a · value(n) ⊞ (a/(a-1)) R_n) ∧ W

gives ``phi^N``.  Deeper starts reuse the same field, and once the values
coalesce they no longer depend on ``N``.

Components are picked per cell.  In ``indexed`` mode cell ``k`` of the
enumeration takes component ``k``.  In ``keyed`` mode (the default) a cell
takes the component named by its *germ*: its trace on the smallest
shrunken window ``a^{-m} W`` it reaches into.  The origin cell always takes
component 1.  Two tessellations that agree on ``a^{-m} W`` therefore refine
their common cells with identical randomness, which makes the coupling of
two iterations pathwise rather than only in law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .geometry import ConvexPolytope, intersect, min_gauge, scale_polytope
from .iteration import TessellationVector, iterate, rescale_restrict
from .renorm import RenormConfig, z_trajectory
from .stit import sample_final
from .streams import RandomnessField
from .tessellation import Tessellation

ORIGIN_TAG = ("index", 1)
MODES = ("keyed", "indexed")


def germ_tag(C: ConvexPolytope, W: ConvexPolytope, a) -> tuple:
    """Component name for cell ``C`` of a tessellation of ``W``."""
    if C.contains_origin(strict=True):
        return ORIGIN_TAG
    g = min_gauge(W, C)
    if g == 0:
        # origin on the cell boundary; a null event for continuous offsets
        return ("cell", C.key)
    m = 0
    s = 1 / a
    while g < s:
        m += 1
        s /= a
    inner = scale_polytope(W, a**-m) if m else W
    return ("germ", m, intersect(C, inner).key)


class ComponentSource:
    """Components ``R^tag_n`` read from a field, raw and prepared for use."""

    def __init__(self, field: RandomnessField, cfg: RenormConfig):
        self.field = field
        self.cfg = cfg

    def raw(self, n: int, tag: tuple) -> Tessellation:
        """``R^tag_n``, a ``Y_1 ∧ W`` sample."""
        cfg = self.cfg

        def draw(n, _):
            rng = self.field.stream(n, "component", *tag)
            return sample_final(cfg.window, cfg.measure, 1.0, rng, budget=cfg.budget)

        return self.field.memo(n, ("raw", cfg, tag), draw)

    def scaled(self, n: int, tag: tuple) -> Tessellation:
        """``(a/(a-1)) R^tag_n ∧ W``."""
        cfg = self.cfg

        def build(n, _):
            return rescale_restrict(self.raw(n, tag), cfg.b, cfg.window)

        return self.field.memo(n, ("scaled", cfg, tag), build)


def _component_tag(k: int, C: ConvexPolytope, cfg: RenormConfig, mode: str) -> tuple:
    if mode == "indexed":
        return ("index", k)
    return germ_tag(C, cfg.window, cfg.a)


class FieldVector(TessellationVector):
    """The vector ``(a/(a-1)) R_n ∧ W`` at one time index."""

    def __init__(self, source: ComponentSource, n: int, mode: str = "keyed"):
        super().__init__()
        if mode not in MODES:
            raise ValueError(f"unknown component mode {mode!r}")
        self.source, self.n, self.mode = source, n, mode

    def __getitem__(self, m: int) -> Tessellation:
        return self.source.scaled(self.n, ("index", m))

    def for_cell(self, index: int, cell: ConvexPolytope) -> Tessellation:
        return self.source.scaled(self.n, _component_tag(index, cell, self.source.cfg, self.mode))


def field_step(T: Tessellation, n: int, source: ComponentSource, mode: str = "keyed") -> Tessellation:
    """``(a T ⊞ (a/(a-1)) R_n) ∧ W``, the value at ``n + 1`` from the value ``T`` at ``n``."""
    cfg = source.cfg
    return iterate(rescale_restrict(T, cfg.a, cfg.window), FieldVector(source, n, mode))


@dataclass(frozen=True)
class PhiRun:
    depth: int
    horizon: int
    values: dict  # n -> Tessellation for n in [-depth, horizon]
    # largest field time read before each value was complete (None: nothing read)
    reads: dict = field(repr=False, default_factory=dict)

    def window_values(self, lo: int = 0, hi: Optional[int] = None) -> tuple:
        hi = self.horizon if hi is None else hi
        return tuple(self.values[n] for n in range(lo, hi + 1))

    def anticipation_ok(self) -> bool:
        """Each value depends only on field times strictly before its own."""
        return all(r is None or r < n for n, r in self.reads.items())


def phi_run(field: RandomnessField, N: int, L: int, cfg: RenormConfig, mode: str = "keyed") -> PhiRun:
    """``phi^N_n`` for ``n`` in ``[-N, L]``."""
    if N < 0 or L < 0:
        raise ValueError("depth and horizon must be nonnegative")
    source = ComponentSource(field, cfg)
    start = len(field.accesses)

    def latest():
        seen = field.accesses[start:]
        return max(seen) if seen else None

    T = Tessellation.trivial(cfg.window)
    values = {-N: T}
    reads = {-N: latest()}
    for n in range(-N, L):
        T = field_step(T, n, source, mode)
        values[n + 1] = T
        reads[n + 1] = latest()
    return PhiRun(N, L, values, reads)


@dataclass(frozen=True)
class Certificate:
    depth: int
    range: int
    conditions: dict  # k -> bool for k in [-range+1, 0]

    @property
    def verdict(self) -> bool:
        return all(self.conditions.values())


def certificate_condition(source: ComponentSource, N: int, k: int) -> bool:
    """``∂R^1_{-N+k-1}`` misses the interior of ``a^k W``."""
    cfg = source.cfg
    R = source.raw(-N + k - 1, ORIGIN_TAG)
    return R.origin_cell.contains(scale_polytope(cfg.window, cfg.a**k))


def certificate_check(field: RandomnessField, N: int, K: int, cfg: RenormConfig) -> Certificate:
    """Sufficient condition for ``phi^{N'} = phi^N`` on ``n >= -N``, all ``N < N' <= N + K``.

    If the value at time ``-N+k-1`` has no boundary inside ``a^{k-1} W`` and
    ``C_k`` holds, the value at ``-N+k`` has no boundary inside ``a^k W``: the
    origin cell, the only cell reaching the shrunken window, is refined by
    component 1.  Any deeper start is trivial at ``-N-K``, so induction over
    ``k = -K+1, ..., 0`` makes it trivial at ``-N`` as well.
    """
    if K < 1:
        raise ValueError("certificate range must be at least 1")
    source = ComponentSource(field, cfg)
    conds = {k: certificate_condition(source, N, k) for k in range(-K + 1, 1)}
    return Certificate(N, K, conds)


def certified_range(field: RandomnessField, N: int, cfg: RenormConfig, cap: int) -> int:
    """Largest ``K <= cap`` whose certificate at depth ``N`` holds (0 if none)."""
    source = ComponentSource(field, cfg)
    K = 0
    while K < cap and certificate_condition(source, N, -K):
        K += 1
    return K


class CFTPNonTermination(RuntimeError):
    """No stopping depth within the cap; ``report`` holds what was tried."""

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class CFTPResult:
    values: dict  # n -> Tessellation for n in [0, L]
    memory_length: int
    certified_range: Optional[int]
    per_depth_equal: dict  # depth -> equal to the previous tried depth on [0, L]
    depths: tuple
    certified: bool

    def to_report(self) -> dict:
        return {
            "memory_length": self.memory_length,
            "certified_range": self.certified_range,
            "certified": self.certified,
            "depths": list(self.depths),
            "per_depth_equal": {str(k): v for k, v in self.per_depth_equal.items()},
        }


def doubling(max_depth: int) -> list:
    out, N = [], 1
    while N <= max_depth:
        out.append(N)
        N *= 2
    return out


def cftp_sample(field: RandomnessField, cfg: RenormConfig, L: int = 0, schedule: Optional[Sequence[int]] = None,
                certify: bool = False, max_depth: int = 64, certificate_range: int = 40) -> CFTPResult:
    """Run ``phi^N`` at increasing depths on one field until the output on ``[0, L]`` is settled.

    Without ``certify`` the search stops at the first scheduled depth whose
    output equals the previous depth's (default schedule 1, 2, 4, ...).  This
    rule is a heuristic: agreement of two depths does not prove agreement
    with all deeper ones.

    With ``certify`` the search stops at the first depth (default schedule
    1, 2, 3, ...) whose certificate holds over ``certificate_range`` deeper
    starts.  The next depth is run as a live check of the guarantee and its
    agreement is recorded in ``per_depth_equal``.
    """
    if schedule is None:
        schedule = list(range(1, max_depth + 1)) if certify else doubling(max_depth)
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or not schedule or schedule[0] < 0:
        raise ValueError("schedule must be a nonempty increasing sequence of depths")
    equal: dict = {}
    tried: list = []

    def report():
        return {"depths": list(tried), "per_depth_equal": dict(equal), "max_depth": max_depth,
                "certify": certify}

    if certify:
        for N in schedule:
            if N > max_depth:
                break
            tried.append(N)
            K = certified_range(field, N, cfg, certificate_range)
            if K < certificate_range:
                continue
            run = phi_run(field, N, L, cfg)
            check = phi_run(field, N + 1, L, cfg)
            equal[N + 1] = run.window_values() == check.window_values()
            return CFTPResult({n: run.values[n] for n in range(L + 1)}, N, K, equal, tuple(tried), True)
        raise CFTPNonTermination(f"no certified depth up to {max_depth}", report())

    prev = None
    for N in schedule:
        if N > max_depth:
            break
        tried.append(N)
        vals = phi_run(field, N, L, cfg).window_values()
        if prev is not None:
            equal[N] = vals == prev
            if equal[N]:
                return CFTPResult(dict(zip(range(L + 1), vals)), N, None, equal, tuple(tried), False)
        prev = vals
    raise CFTPNonTermination(f"outputs did not stabilize up to depth {max_depth}", report())


@dataclass(frozen=True)
class VChainRun:
    depth: int
    horizon: int
    values: dict  # n -> Tessellation, pre-history included
    provenance: tuple = ()


def v_chain(field: RandomnessField, M: int, L: int, cfg: RenormConfig, stream, pre_steps: int = 0,
            mode: str = "keyed") -> VChainRun:
    """Stationary start at ``-M`` driven by the field afterwards.

    Values at ``n <= -M`` are an ordinary chain trajectory ending at ``-M``
    (``pre_steps`` extra states before it); from ``-M`` on the same recursion
    as :func:`phi_run` is applied with the field's components.
    """
    if M < 0 or L < 0:
        raise ValueError("depth and horizon must be nonnegative")
    pre = z_trajectory(cfg, pre_steps, stream, first_index=-M - pre_steps)
    values = dict(pre.values)
    source = ComponentSource(field, cfg)
    T = values[-M]
    for n in range(-M, L):
        T = field_step(T, n, source, mode)
        values[n + 1] = T
    return VChainRun(M, L, values, pre.provenance)


def coupled_from(v: VChainRun, phi: PhiRun, first: int) -> bool:
    """``V_n = phi_n`` for every ``n`` in ``[first, horizon]``."""
    hi = min(v.horizon, phi.horizon)
    return all(v.values[n] == phi.values[n] for n in range(first, hi + 1))
