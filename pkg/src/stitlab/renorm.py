"""The renormalized chain ``Z_n = a^n Y_{a^n}`` seen through a window.

One step of the chain scales the current tessellation by ``a``, restricts it
to ``W`` and refines every cell by an independent copy of
``(a/(a-1)) Y_1``.  By scaling invariance, ``(a/(a-1)) Y_1`` restricted to a
cell ``C`` has the law of ``Y_{(a-1)/a}`` restricted to ``C``, so each cell is
refined by a short STIT run on the cell itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, sqrt
from typing import Optional

import numpy as np

from .geometry import ConvexPolytope, Q, Scalar, scale_polytope
from .iteration import rescale_restrict
from .measure import DrivingMeasure
from .stit import DEFAULT_EVENT_BUDGET, as_rng, sample_final
from .streams import replica_rng
from .tessellation import Tessellation


@dataclass(frozen=True)
class RenormConfig:
    a: Scalar
    window: ConvexPolytope
    measure: DrivingMeasure
    budget: int = DEFAULT_EVENT_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "a", Q(self.a))
        if not self.a > 1:
            raise ValueError("a: the scale factor must be strictly greater than 1")
        if not self.window.contains_origin(strict=True):
            raise ValueError("window: the origin must lie in the interior of the window")
        if self.window.dim != self.measure.dim:
            raise ValueError("measure: dimension differs from the window's")
        if not self.measure.mass(self.window) > 0:
            raise ValueError("measure: the window has zero hitting mass")

    @property
    def b(self) -> Scalar:
        """Scale ``a/(a-1)`` of the refining copies."""
        return self.a / (self.a - 1)

    @property
    def refine_time(self) -> float:
        """STIT time equivalent to one ``(a/(a-1)) Y_1`` refinement."""
        return float(1 - 1 / self.a)

    @property
    def window_mass(self):
        return self.measure.mass(self.window)


@dataclass(frozen=True)
class ZTrajectory:
    values: dict  # n -> Tessellation
    provenance: tuple = field(default=())  # per-step integer seeds, step 0 is the start

    @property
    def indices(self) -> list:
        return sorted(self.values)

    def __getitem__(self, n: int) -> Tessellation:
        return self.values[n]


def sample_Z0(cfg: RenormConfig, stream) -> Tessellation:
    """One draw of ``Y_1 ∧ W``."""
    return sample_final(cfg.window, cfg.measure, 1.0, stream, budget=cfg.budget)


def refine(T: Tessellation, cfg: RenormConfig, rng) -> Tessellation:
    """Refine every cell of ``T`` by an independent ``(a/(a-1)) Y_1`` copy."""
    t = cfg.refine_time
    cells = []
    for C in T.cells:
        cells.extend(sample_final(C, cfg.measure, t, rng, budget=cfg.budget).cells)
    return Tessellation(T.window, cells)


def z_step(Z: Tessellation, cfg: RenormConfig, stream) -> Tessellation:
    """Draw ``Z_{n+1}`` given ``Z_n = Z``."""
    if Z.window != cfg.window:
        raise ValueError("state does not tessellate the configured window")
    rng = as_rng(stream)
    return refine(rescale_restrict(Z, cfg.a, cfg.window), cfg, rng)


def z_trajectory(cfg: RenormConfig, n_steps: int, stream, start: Optional[Tessellation] = None,
                 first_index: int = 0) -> ZTrajectory:
    """``Z_0, ..., Z_{n_steps}`` (indices shifted by ``first_index``).

    Step ``j`` runs on its own integer seed, recorded in ``provenance``; seed
    0 draws the start unless ``start`` is given.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    rng = as_rng(stream)
    seeds = tuple(int(s) for s in rng.integers(0, 2**63, size=n_steps + 1))
    Z = sample_Z0(cfg, seeds[0]) if start is None else start
    values = {first_index: Z}
    for j in range(1, n_steps + 1):
        Z = z_step(Z, cfg, seeds[j])
        values[first_index + j] = Z
    return ZTrajectory(values, seeds)


def scaled_direct(cfg: RenormConfig, t, stream) -> Tessellation:
    """``t Y_t ∧ W``, simulated in ``t^{-1} W`` and scaled back up."""
    t = Q(t)
    small = scale_polytope(cfg.window, 1 / t)
    Y = sample_final(small, cfg.measure, float(t), stream, budget=cfg.budget)
    return rescale_restrict(Y, t, cfg.window)


def atom_probability(T: Tessellation, cfg: RenormConfig) -> float:
    """``P(Z_{n+1} = aZ_n ∧ W | Z_n = T)``.

    No refining copy may cut any cell of ``aT ∧ W``; each cell ``C`` survives
    the time ``(a-1)/a`` unsplit with probability ``exp(-(a-1)/a · Λ([C]))``.
    """
    base = rescale_restrict(T, cfg.a, cfg.window)
    total = sum(float(cfg.measure.mass(C)) for C in base.cells)
    return exp(-cfg.refine_time * total)


def trivial_in(T: Tessellation, region: ConvexPolytope) -> bool:
    """``T ∧ region`` is the one-cell tessellation."""
    return T.boundary_misses(region)


def mixing_covariance_exact(sub_mass: float, a: float, lag: int) -> float:
    """``P(A ∩ σ^t A) - P(A)^2`` for ``A = {Z_0 trivial in W_0}``.

    ``Z_t ∧ W_0`` is trivial iff ``Z_0`` is trivial on ``a^{-t} W_0`` and no
    refinement in between cuts ``W_0``; this yields the closed form
    ``e^{-2Λ_0}(e^{a^{-t} Λ_0} - 1)`` with ``Λ_0 = Λ([W_0])``.
    """
    return exp(-2 * sub_mass) * (exp(sub_mass * a ** (-lag)) - 1)


@dataclass(frozen=True)
class CovarianceEstimate:
    lag: int
    n: int
    p_a: float
    p_b: float
    p_ab: float
    estimate: float
    stderr: float


def covariance_estimate(indicators_a, indicators_b, lag: int) -> CovarianceEstimate:
    """Plug-in ``P̂(A ∩ B) - P̂(A)P̂(B)`` with a delta-method standard error."""
    A = np.asarray(indicators_a, dtype=float)
    B = np.asarray(indicators_b, dtype=float)
    n = len(A)
    pa, pb = A.mean(), B.mean()
    pab = (A * B).mean()
    # influence function of (pab - pa*pb)
    psi = A * B - pb * A - pa * B
    se = sqrt(psi.var(ddof=1) / n) if n > 1 else float("inf")
    return CovarianceEstimate(lag, n, pa, pb, pab, pab - pa * pb, se)


def mixing_indicators(cfg: RenormConfig, sub_window: ConvexPolytope, lag: int, n: int, seed: int,
                      spawn=None):
    """Indicator pairs ``(1{Z_0 ∈ A}, 1{Z_lag ∈ A})`` over ``n`` replicas."""
    spawn = spawn or (lambda i: replica_rng(seed, "mixing", lag, i))
    first, last = [], []
    for i in range(n):
        traj = z_trajectory(cfg, lag, spawn(i))
        first.append(trivial_in(traj[0], sub_window))
        last.append(trivial_in(traj[lag], sub_window))
    return first, last
