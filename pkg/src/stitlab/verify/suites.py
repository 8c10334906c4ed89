"""Named verification batteries.

Each suite draws every replica from ``replica_rng(seed, suite, check, i)``, so
a suite is a pure function of ``(seed, scale)``.  Three scales exist:
``full`` (the sizes of the acceptance battery), ``quick`` (1000 replicas for
statistical checks) and ``smoke`` (tiny sizes, for plumbing and
reproducibility only; its statistical verdicts carry no weight).
"""

from __future__ import annotations

import gc
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from math import exp, sqrt
from typing import Optional

import numpy as np
from scipy import stats

from ..factor import (
    CFTPNonTermination,
    ComponentSource,
    certificate_check,
    cftp_sample,
    coupled_from,
    field_step,
    phi_run,
    v_chain,
)
from ..geometry import ConvexPolytope, Direction, Hyperplane, Q, clip, scale_polytope, support_interval
from ..iteration import TessellationVector, iterate, nested_iterate, rescale_restrict
from ..measure import DiscreteMeasure, IsotropicMeasure, LebesguePoints, axis_measure, dyadic_uniform
from ..renorm import (
    RenormConfig,
    atom_probability,
    covariance_estimate,
    mixing_covariance_exact,
    mixing_indicators,
    sample_Z0,
    scaled_direct,
    z_step,
    z_trajectory,
)
from ..stit import continue_run, run, sample_final, snapshot
from ..streams import RandomnessField, replica_rng
from ..tessellation import Tessellation
from .report import CheckRecord, TestReport
from .statistics import cell_count, interior_boundary_length, origin_cell_area
from .stats import (
    DEFAULT_ALPHA,
    bound_check,
    exact_check,
    goodness_of_fit,
    ks_uniform,
    proportion_test,
    trend_check,
    two_sample_values,
)

SUITES = (
    "holding", "poisson1d", "homogeneity", "scaling", "iterate", "iterate22", "lemma_fundadef",
    "coupling_elemental1", "stationarity", "mixing_decay", "atom", "factor_propf2", "factor_certificate",
)

DEFAULT_SEED = 20240917

HALF = Q("1/2")
UNIT_BOX = ConvexPolytope.box(-HALF, -HALF, HALF, HALF)  # axis mass 2
SMALL_BOX = ConvexPolytope.box(Q("-1/10"), Q("-1/10"), Q("1/10"), Q("1/10"))  # axis mass 2/5
ZERO_ONE = ConvexPolytope.box(0, 0, 1, 1)

# replica counts per scale; keys are read by the suites below
SIZES = {
    "full": dict(stat=10_000, prop=100_000, holding_runs=2_000, exact=100, clips=10_000, homog=1_000,
                 mix=10_000, atom=10_000, cftp=10_000, cftp_terminate=1_000, cert_k=100_000,
                 soundness=100, coupling=1_000, hitting=2_000, audit=100, shift=20),
    "quick": dict(stat=1_000, prop=2_000, holding_runs=300, exact=20, clips=1_000, homog=200,
                  mix=1_000, atom=1_000, cftp=1_000, cftp_terminate=100, cert_k=2_000,
                  soundness=20, coupling=200, hitting=500, audit=20, shift=5),
    "smoke": dict(stat=60, prop=100, holding_runs=20, exact=5, clips=200, homog=50,
                  mix=40, atom=60, cftp=30, cftp_terminate=20, cert_k=100,
                  soundness=5, coupling=20, hitting=60, audit=5, shift=2),
}


@dataclass
class SuiteConfig:
    seed: Optional[int] = DEFAULT_SEED
    scale: str = "full"
    alpha: float = DEFAULT_ALPHA
    fresh_seed: bool = False
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scale not in SIZES:
            raise ValueError(f"scale: unknown scale {self.scale!r} (choose from {sorted(SIZES)})")
        if self.fresh_seed:
            self.seed = int(np.random.SeedSequence().entropy % 2**63)
        if self.seed is None:
            self.seed = DEFAULT_SEED

    def size(self, name: str) -> int:
        return int(self.overrides.get(name, SIZES[self.scale][name]))

    @property
    def min_replicas(self) -> int:
        return 1 if self.scale == "smoke" else 1000


class _Ctx:
    def __init__(self, name: str, cfg: SuiteConfig, report: TestReport):
        self.name, self.cfg, self.report = name, cfg, report
        self._mark = time.perf_counter()

    def rng(self, check: str, i: int, *more):
        return replica_rng(self.cfg.seed, self.name, check, i, *more)

    def seed_int(self, check: str, i: int) -> int:
        return int(self.rng(check, i).integers(0, 2**63))

    def add(self, rec: CheckRecord) -> CheckRecord:
        now = time.perf_counter()
        self.report.timings[rec.check] = now - self._mark
        self._mark = now
        return self.report.add(rec)

    def proportion(self, outcomes, p0, check, target):
        return self.add(proportion_test(outcomes, len(outcomes), p0, check=check, target=target,
                                        min_replicas=self.cfg.min_replicas))

    def two_sample(self, a, b, check, target, *, discrete=True, categorical=False):
        return self.add(two_sample_values(a, b, discrete=discrete, categorical=categorical,
                                          alpha=self.cfg.alpha, check=check, target=target,
                                          min_replicas=self.cfg.min_replicas))


# ---------------------------------------------------------------- stit_sim


def holding_uniforms(r) -> list:
    """Probability-integral transforms of the inter-event times of one run.

    Given the state after event ``i-1`` with total rate ``λ`` and remaining
    horizon ``c``, the next gap ``Δ`` (conditioned on occurring before the
    horizon) has distribution function ``(1 - e^{-λΔ}) / (1 - e^{-λc})``.
    """
    measure = r.measure
    cells = {r.window.key: r.window}
    rate = float(measure.mass(r.window))
    prev = 0.0
    out = []
    for e in r.events:
        gap, rest = e.time - prev, r.t_end - prev
        out.append(-np.expm1(-rate * gap) / -np.expm1(-rate * rest))
        C = cells.pop(e.parent_key)
        low, high = clip(C, e.hyperplane)
        cells[low.key], cells[high.key] = low, high
        rate += float(measure.mass(low)) + float(measure.mass(high)) - float(measure.mass(C))
        prev = e.time
    return out


def suite_holding(ctx: _Ctx):
    cfg = ctx.cfg
    n = cfg.size("prop")
    m = axis_measure()
    outcomes = [run(ZERO_ONE, m, 1.0, ctx.rng("trivial_t1", i)).final.is_trivial for i in range(n)]
    ctx.proportion(outcomes, exp(-2.0), "trivial_t1", "P(Y_1 ∧ [0,1]^2 trivial) = exp(-t Λ([W])), t = 1")

    for label, W, measure, t in (("axis", UNIT_BOX, m, 2.0), ("isotropic", UNIT_BOX, IsotropicMeasure(0.5), 3.0)):
        u = []
        for i in range(cfg.size("holding_runs")):
            u.extend(holding_uniforms(run(W, measure, t, ctx.rng(f"holding_{label}", i))))
        rec = ks_uniform(u, cfg.alpha, check=f"holding_ks_{label}",
                         target="inter-event time given state ~ Exponential(total rate)")
        rec.details["runs"] = cfg.size("holding_runs")
        ctx.add(rec)

    # replay and snapshot consistency on logged runs
    bad = 0
    for i in range(cfg.size("exact")):
        r = run(UNIT_BOX, m, 2.0, ctx.rng("replay", i))
        times = [e.time for e in r.events]
        ok = all(a < b for a, b in zip(times, times[1:]))
        ok &= snapshot(r, r.t_end) == r.final
        if r.events:
            first = r.events[0].time
            ok &= snapshot(r, first / 2) == Tessellation.trivial(UNIT_BOX)
            ok &= len(snapshot(r, first)) == 2
        bad += not ok
    ctx.add(exact_check(bad, cfg.size("exact"), check="replay_snapshot",
                        target="event log replays to the final state; snapshots are right-continuous"))


def suite_poisson1d(ctx: _Ctx):
    n = ctx.cfg.size("stat")
    W = ConvexPolytope.interval(-HALF, HALF)
    leb = LebesguePoints()
    counts = [len(sample_final(W, leb, 5.0, ctx.rng("poisson", i))) - 1 for i in range(n)]
    observed = [sum(1 for c in counts if c == k) for k in range(15)] + [sum(1 for c in counts if c >= 15)]
    probs = list(stats.poisson.pmf(np.arange(15), 5.0)) + [float(stats.poisson.sf(14, 5.0))]
    labels = [str(k) for k in range(15)] + ["15+"]
    ctx.add(goodness_of_fit(observed, probs, labels, ctx.cfg.alpha, check="cut_count_poisson5",
                            target="cut points on a unit interval at t = 5 ~ Poisson(5)"))


# ---------------------------------------------------------------- geometry / measures


def _random_direction(rng, span=6) -> Direction:
    while True:
        v = rng.integers(-span, span + 1, size=2)
        if v[0] or v[1]:
            return Direction.of(int(v[0]), int(v[1]))


def _random_cut(P: ConvexPolytope, rng) -> Hyperplane:
    u = _random_direction(rng)
    lo, hi = support_interval(P, u)
    return Hyperplane(u, lo + dyadic_uniform(rng) * (hi - lo))


def _random_polygon(rng, cuts: int = 4) -> ConvexPolytope:
    x0, y0 = (Q(int(v)) / 8 for v in rng.integers(-16, 0, size=2))
    w, h = (Q(int(v)) / 8 for v in rng.integers(1, 24, size=2))
    P = ConvexPolytope.box(x0, y0, x0 + w, y0 + h)
    for _ in range(cuts):
        low, high = clip(P, _random_cut(P, rng))
        parts = [p for p in (low, high) if p is not None]
        P = max(parts, key=lambda p: p.measure)
    return P


def clip_measure_failures(n: int, rng) -> int:
    """Random clip operations whose two sides do not add up to the input area."""
    bad = 0
    P = _random_polygon(rng)
    for i in range(n):
        if i % 25 == 0:
            P = _random_polygon(rng)
        H = _random_cut(P, rng)
        low, high = clip(P, H)
        total = (low.measure if low is not None else 0) + (high.measure if high is not None else 0)
        bad += total != P.measure
        parts = [p for p in (low, high) if p is not None]
        P = parts[int(rng.integers(len(parts)))]
    return bad


def suite_homogeneity(ctx: _Ctx):
    cfg = ctx.cfg
    rng = ctx.rng("clip", 0)
    n_clip = cfg.size("clips")
    ctx.add(exact_check(clip_measure_failures(n_clip, rng), n_clip, check="clip_preserves_measure",
                        target="area(low) + area(high) = area(P), exact"))

    n = cfg.size("homog")
    discrete = [axis_measure(), DiscreteMeasure.of([((1, 0), 1), ((1, 1), "1/3"), ((1, -2), "5/2")])]
    bad = 0
    worst_iso = 0.0
    iso = IsotropicMeasure(1.7)
    rng = ctx.rng("homog", 0)
    leb = LebesguePoints()
    for i in range(n):
        W = _random_polygon(rng)
        c = Q(int(rng.integers(1, 200))) / int(rng.integers(1, 50))
        cW = scale_polytope(W, c)
        for m in discrete:
            bad += m.mass(cW) != c * m.mass(W)
        lo = Q(int(rng.integers(-100, 100))) / 7
        I = ConvexPolytope.interval(lo, lo + Q(int(rng.integers(1, 100))) / 11)
        bad += leb.mass(scale_polytope(I, c)) != c * leb.mass(I)
        ref = float(c) * iso.mass(W)
        worst_iso = max(worst_iso, abs(iso.mass(cW) - ref) / ref)
    ctx.add(exact_check(bad, n, check="homogeneity_exact",
                        target="Λ([cW]) = cΛ([W]) exactly for discrete and 1-d Lebesgue measures"))
    ctx.add(bound_check(worst_iso, 0.0, 1e-12, check="homogeneity_isotropic", n=n,
                        target="max relative error of Λ([cW]) / (cΛ([W])) - 1 for the isotropic measure"))


# ---------------------------------------------------------------- scaling and iteration


def _cfg_unit(a=2) -> RenormConfig:
    return RenormConfig(Q(a), UNIT_BOX, axis_measure())


def suite_scaling(ctx: _Ctx):
    n = ctx.cfg.size("stat")
    cfg = _cfg_unit()
    base = [sample_Z0(cfg, ctx.rng("base", i)) for i in range(n)]
    for t in (2, 4):
        scaled = [scaled_direct(cfg, t, ctx.rng(f"scaled_{t}", i)) for i in range(n)]
        ctx.two_sample([cell_count(T) for T in scaled], [cell_count(T) for T in base],
                       f"cell_count_t{t}", f"cell count of t·Y_t ∧ W vs Y_1 ∧ W, t = {t}")
        ctx.two_sample([interior_boundary_length(T) for T in scaled], [interior_boundary_length(T) for T in base],
                       f"boundary_length_t{t}", f"interior boundary length of t·Y_t ∧ W vs Y_1 ∧ W, t = {t}",
                       discrete=False)


def _y_vector(W, measure, s, rng) -> TessellationVector:
    return TessellationVector((), lambda m: sample_final(W, measure, s, rng))


def suite_iterate(ctx: _Ctx):
    cfg = ctx.cfg
    n = cfg.size("stat")
    W, m = UNIT_BOX, axis_measure()
    bad_trivial = bad_single = 0
    for i in range(cfg.size("exact")):
        rng = ctx.rng("identities", i)
        T = sample_final(W, m, 2.0, rng)
        bad_trivial += iterate(T, TessellationVector.trivial(W)) != T
        R = _y_vector(W, m, 1.0, rng)
        bad_single += iterate(Tessellation.trivial(W), R) != R[1]
    ctx.add(exact_check(bad_trivial, cfg.size("exact"), check="identity_trivial_vector", target="T ⊞ (W, W, ...) = T"))
    ctx.add(exact_check(bad_single, cfg.size("exact"), check="identity_single_cell", target="{W} ⊞ R = R^1"))

    nested, direct, continued = [], [], []
    for i in range(n):
        rng = ctx.rng("nested", i)
        nested.append(iterate(sample_final(W, m, 1.0, rng), _y_vector(W, m, 1.0, rng)))
        direct.append(sample_final(W, m, 2.0, ctx.rng("direct", i)))
        continued.append(continue_run(run(W, m, 1.0, ctx.rng("cont", i)), 1.0, ctx.rng("cont_more", i)).final)
    ctx.two_sample([len(T) for T in nested], [len(T) for T in direct], "iterate_cell_count",
                   "cell count of Y_1 ⊞ Y'_1 vs Y_2")
    ctx.two_sample([interior_boundary_length(T) for T in nested], [interior_boundary_length(T) for T in direct],
                   "iterate_boundary_length", "interior boundary length of Y_1 ⊞ Y'_1 vs Y_2", discrete=False)
    ctx.two_sample([len(T) for T in continued], [len(T) for T in direct], "continue_cell_count",
                   "cell count of a run continued from t = 1 to 2 vs a run to t = 2")


def suite_iterate22(ctx: _Ctx):
    n = ctx.cfg.size("stat")
    W, m = UNIT_BOX, axis_measure()
    direct, nested = [], []
    for i in range(n):
        r = run(W, m, 2.0, ctx.rng("direct", i))
        direct.append((len(snapshot(r, 1.0)), len(r.final)))
        rng = ctx.rng("nested", i)
        first = sample_final(W, m, 0.5, rng)
        # the second coordinate extends the first one, with the same first vector
        R1 = _y_vector(W, m, 0.5, rng)
        A = iterate(first, R1)
        B = nested_iterate(first, [R1, _y_vector(W, m, 1.0, rng)])
        nested.append((len(A), len(B)))
    ctx.two_sample(direct, nested, "joint_cell_counts",
                   "(count Y_1, count Y_2) vs nested (Y_½ ⊞ Y'_½, (Y_½ ⊞ Y'_½) ⊞ Y''_1)", categorical=True)


# ---------------------------------------------------------------- certificate probabilities


def suite_lemma_fundadef(ctx: _Ctx):
    n = ctx.cfg.size("prop")
    a = Q(2)
    K = 20
    for mass, W in (("0.4", SMALL_BOX), ("2", UNIT_BOX)):
        lam = float(axis_measure().mass(W))
        regions = {k: scale_polytope(W, a**k) for k in range(-K + 1, 1)}
        hits = {k: [] for k in (0, -1, -2)}
        joint = []
        for i in range(n):
            rng = ctx.rng(f"lambda{mass}", i)
            R = sample_final(W, axis_measure(), 1.0, rng)
            for k in hits:
                hits[k].append(R.origin_cell.contains(regions[k]))
            ok = hits[0][-1]
            k = -1
            # independent copies for the deeper conditions; stop at the first failure
            while ok and k > -K:
                R = sample_final(W, axis_measure(), 1.0, rng)
                ok = R.origin_cell.contains(regions[k])
                k -= 1
            joint.append(ok)
        for k in (0, -1, -2):
            ctx.proportion(hits[k], exp(-(2.0**k) * lam), f"single_k{k}_lambda{mass}",
                           f"P(∂R ∩ Int(a^k W) = ∅) = exp(-a^k Λ([W])), a = 2, k = {k}, Λ([W]) = {mass}")
        p_inf = exp(-2.0 * lam)
        rec = ctx.proportion(joint, p_inf, f"all_k_lambda{mass}",
                             f"P(all k ≤ 0) = exp(-(a/(a-1)) Λ([W])), truncated at K = {K}, Λ([W]) = {mass}")
        # exact finite-K target differs from the limit by a geometric tail
        tail = p_inf * (exp(lam * 2.0 ** (-K + 1)) - 1)
        sigma = sqrt(p_inf * (1 - p_inf) / len(joint))
        ctx.add(bound_check(tail, 0.0, sigma / 10, check=f"truncation_lambda{mass}", reference=0.0,
                            target=f"truncation error of the K = {K} product is below sigma/10"))
        rec.details["truncation_error"] = tail


# ---------------------------------------------------------------- pathwise coupling


def _outer_cuts(T: Tessellation, inner: ConvexPolytope, count: int, rng) -> Tessellation:
    """Extra straight cuts across ``T`` that avoid the interior of ``inner``."""
    W = T.window
    m = axis_measure()
    added = 0
    while added < count:
        H = m.sample(W, rng) if rng.random() < 0.5 else _random_cut(W, rng)
        lo, hi = support_interval(inner, H.normal)
        if lo < H.offset < hi:
            continue
        cells = []
        for C in T.cells:
            low, high = clip(C, H)
            cells.extend(p for p in (low, high) if p is not None)
        T = Tessellation(W, cells)
        added += 1
    return T


def elemental_trial(seed: int, trial: int, mode: str = "keyed", cfg: Optional[RenormConfig] = None):
    """One coupling trial; returns ``(n, equal)``.

    Two tessellations agreeing on ``a^{-n} W`` but not outside are driven by
    the same field for ``n`` steps; the results must coincide on ``W``.
    """
    cfg = cfg or _cfg_unit()
    rng = replica_rng(seed, "coupling_elemental1", "setup", trial)
    n = int(rng.integers(1, 5))
    inner = scale_polytope(cfg.window, cfg.a**-n)
    common = sample_final(cfg.window, cfg.measure, 1.0 + 2 * rng.random(), rng)
    T = _outer_cuts(common, inner, int(rng.integers(1, 6)), rng)
    R = _outer_cuts(common, inner, int(rng.integers(1, 6)), rng)
    assert T.restrict(inner) == R.restrict(inner)
    source = ComponentSource(RandomnessField(int(rng.integers(0, 2**63))), cfg)
    for k in range(n):
        T = field_step(T, k, source, mode)
        R = field_step(R, k, source, mode)
    return n, T == R


def suite_coupling_elemental1(ctx: _Ctx):
    trials = ctx.cfg.size("exact")
    keyed = [elemental_trial(ctx.cfg.seed, i) for i in range(trials)]
    indexed = [elemental_trial(ctx.cfg.seed, i, mode="indexed") for i in range(trials)]
    ctx.add(exact_check(sum(not ok for _, ok in keyed), trials, check="keyed_equality",
                        target="T^n ∧ W = R^n ∧ W after n keyed steps when T^0, R^0 agree on a^{-n}W",
                        details={"steps": [n for n, _ in keyed],
                                 "indexed_mode_mismatches": sum(not ok for _, ok in indexed)}))


# ---------------------------------------------------------------- renormalized chain


def suite_stationarity(ctx: _Ctx):
    n = ctx.cfg.size("stat")
    cfg = _cfg_unit()
    samples = {}
    for step in (0, 1, 3):
        samples[step] = [z_trajectory(cfg, step, ctx.rng(f"z{step}", i))[step] for i in range(n)]
    counts = {k: [len(T) for T in v] for k, v in samples.items()}
    for x, y in ((0, 1), (0, 3), (1, 3)):
        ctx.two_sample(counts[x], counts[y], f"cell_count_z{x}_z{y}", f"cell count of Z_{x} ∧ W vs Z_{y} ∧ W")
    ctx.two_sample([origin_cell_area(T) for T in samples[0]], [origin_cell_area(T) for T in samples[3]],
                   "origin_area_z0_z3", "origin cell area of Z_0 ∧ W vs Z_3 ∧ W", discrete=False)
    direct = [scaled_direct(cfg, cfg.a, ctx.rng("direct", i)) for i in range(n)]
    ctx.two_sample(counts[1], [len(T) for T in direct], "one_step_vs_direct",
                   "cell count of one chain step from Z_0 vs a·Y_a ∧ W")
    ctx.proportion([T.is_trivial for T in samples[3]], exp(-2.0), "z3_trivial",
                   "P(Z_3 ∧ W trivial) = exp(-Λ([W]))")


def suite_mixing_decay(ctx: _Ctx):
    n = ctx.cfg.size("mix")
    cfg = _cfg_unit()
    sub = scale_polytope(UNIT_BOX, HALF)
    sub_mass = float(cfg.measure.mass(sub))
    lags = [1, 2, 3, 4, 5]
    ests = []
    for t in lags:
        first, last = mixing_indicators(cfg, sub, t, n, ctx.cfg.seed,
                                        spawn=lambda i, t=t: ctx.rng("lag", t, i))
        est = covariance_estimate(first, last, t)
        ests.append(est)
        exact = mixing_covariance_exact(sub_mass, 2.0, t)
        band = 4 * est.stderr
        ctx.add(bound_check(est.estimate, exact - band, exact + band, check=f"covariance_lag{t}", n=n,
                            reference=exact, target=f"P(A ∩ σ^{t}A) - P(A)^2, A = Z ∧ W_0 trivial",
                            details={"p_a": est.p_a, "p_b": est.p_b, "p_ab": est.p_ab, "stderr": est.stderr}))
    ctx.add(trend_check([abs(e.estimate) for e in ests], [e.stderr for e in ests], lags, check="decay_trend",
                        target="|P(A ∩ σ^t B) - P(A)P(B)| non-increasing in t within 2 standard errors", n=n))


def atom_states(seed: int, count: int = 5):
    """Conditioning states drawn from Z_0 in order, keeping the first state for
    each distinct number of cells of ``aT ∧ W`` (so the targets differ)."""
    cfg = _cfg_unit()
    states, seen, i = [], set(), 0
    while len(states) < count:
        T = sample_Z0(cfg, replica_rng(seed, "atom", "state", i))
        i += 1
        c = len(rescale_restrict(T, cfg.a, cfg.window))
        if c not in seen:
            seen.add(c)
            states.append(T)
    return states


def suite_atom(ctx: _Ctx):
    n = ctx.cfg.size("atom")
    cfg = _cfg_unit()
    for j, T in enumerate(atom_states(ctx.cfg.seed)):
        atom_base = rescale_restrict(T, cfg.a, cfg.window)
        hits = [z_step(T, cfg, ctx.rng(f"state{j}", i)) == atom_base for i in range(n)]
        p0 = atom_probability(T, cfg)
        rec = ctx.proportion(hits, p0, f"state{j}_cells{len(T)}",
                             "P(Z_1 = aT ∧ W | Z_0 = T) = exp(-(1 - 1/a) Σ_{C ∈ aT∧W} Λ([C]))")
        rec.details["naive_sum_over_T"] = float(sum(cfg.measure.mass(C) for C in T.cells))
        rec.details["sum_over_aT_and_W"] = float(sum(cfg.measure.mass(C) for C in atom_base.cells))


# ---------------------------------------------------------------- factor map


def _cfg_small() -> RenormConfig:
    return RenormConfig(Q(2), SMALL_BOX, axis_measure())


def hitting_time_K(cfg: RenormConfig, eps: float, n: int, seed: int, k_max: int = 40) -> tuple:
    """Smallest ``K`` with estimated ``P(no trivial state among Z_0..Z_K) <= eps/2``."""
    first_hit = []
    for i in range(n):
        rng = replica_rng(seed, "hitting", i)
        Z = sample_Z0(cfg, rng)
        k = 0
        while not Z.is_trivial and k < k_max:
            Z = z_step(Z, cfg, rng)
            k += 1
        first_hit.append(k if Z.is_trivial else k_max + 1)
    hist = np.bincount(first_hit, minlength=k_max + 2)
    miss = 1 - np.cumsum(hist) / n
    K = int(np.argmax(miss <= eps / 2)) if (miss <= eps / 2).any() else k_max
    return K, float(miss[K])


def suite_factor_propf2(ctx: _Ctx):
    cfg_s = ctx.cfg
    cfg = _cfg_small()
    bad = 0
    for i in range(cfg_s.size("audit")):
        f = RandomnessField(ctx.seed_int("audit", i))
        bad += not phi_run(f, 6, 3, cfg).anticipation_ok()
    ctx.add(exact_check(bad, cfg_s.size("audit"), check="null_anticipation",
                        target="value at n reads field times < n only"))

    bad = 0
    for i in range(cfg_s.size("shift")):
        f = RandomnessField(ctx.seed_int("shift", i))
        N = 4
        lhs = phi_run(f.shifted(1), N, 2, cfg)
        rhs = phi_run(f, N - 1, 3, cfg)
        bad += any(lhs.values[n] != rhs.values[n + 1] for n in range(-N, 3))
        c1 = cftp_sample(f.shifted(1), cfg, L=1, certify=True)
        c0 = cftp_sample(f, cfg, L=2, certify=True)
        bad += c1.values[0] != c0.values[1] or c1.values[1] != c0.values[2]
    ctx.add(exact_check(bad, cfg_s.size("shift"), check="shift_equivariance",
                        target="output on the shifted field = shifted output"))

    n = cfg_s.size("cftp")
    outs, depths = [], []
    for i in range(n):
        res = cftp_sample(RandomnessField(ctx.seed_int("cftp", i)), cfg, L=1, certify=True)
        outs.append((res.values[0], res.values[1]))
        depths.append(res.memory_length)
    direct = [sample_Z0(cfg, ctx.rng("direct", i)) for i in range(n)]
    traj = [z_trajectory(cfg, 1, ctx.rng("traj", i)) for i in range(n)]
    ctx.two_sample([len(a) for a, _ in outs], [len(T) for T in direct], "marginal_cell_count",
                   "cell count of the CFTP output at n = 0 vs Y_1 ∧ W")
    ctx.two_sample([origin_cell_area(a) for a, _ in outs], [origin_cell_area(T) for T in direct],
                   "marginal_origin_area", "origin cell area of the CFTP output at n = 0 vs Y_1 ∧ W", discrete=False)
    ctx.two_sample([(len(a), len(b)) for a, b in outs], [(len(t[0]), len(t[1])) for t in traj],
                   "joint_cell_counts", "(count at n = 0, count at n = 1) of CFTP output vs chain trajectory",
                   categorical=True)

    vs = [v_chain(RandomnessField(ctx.seed_int("vchain", i)), 3, 0, cfg, ctx.rng("vpre", i)).values[0]
          for i in range(n)]
    ctx.two_sample([len(T) for T in vs], [len(T) for T in direct], "vchain_marginal",
                   "cell count of V^M_0 (M = 3) vs Y_1 ∧ W")

    eps = 0.05
    K, miss = hitting_time_K(cfg, eps, cfg_s.size("hitting"), ctx.cfg.seed)
    m = cfg_s.size("coupling")
    coupled = 0
    L = 2
    for i in range(m):
        f = RandomnessField(ctx.seed_int("coupling", i))
        v = v_chain(f, K, L, cfg, ctx.rng("coupling_pre", i))
        coupled += coupled_from(v, phi_run(f, K, L, cfg), 0)
    ctx.add(bound_check(coupled / m, 1 - eps, 1.0, check="coupling_event", n=m,
                        target="P(V^N_n = phi^N_n for all n ≥ K - N) > 1 - ε, ε = 0.05, N = K",
                        details={"K": K, "estimated_miss": miss, "coupled": coupled}))


def suite_factor_certificate(ctx: _Ctx):
    s = ctx.cfg
    cfg = _cfg_small()
    n = s.size("cert_k")
    ok = [certificate_check(RandomnessField(ctx.seed_int("single", i)), 0, 1, cfg).conditions[0] for i in range(n)]
    ctx.proportion(ok, exp(-0.4), "single_k0", "P(C_0) = exp(-Λ([W])), Λ([W]) = 0.4")

    want = s.size("soundness")
    K, L = 6, 2
    bad = checked = i = 0
    while checked < want:
        f = RandomnessField(ctx.seed_int("soundness", i))
        N = 1 + i % 5
        i += 1
        if not certificate_check(f, N, K, cfg).verdict:
            continue
        checked += 1
        ref = phi_run(f, N, L, cfg).window_values()
        bad += any(phi_run(f, N + j, L, cfg).window_values() != ref for j in range(1, K + 1))
    ctx.add(exact_check(bad, want, check="certificate_soundness",
                        target="verdict true implies phi^{N+j} = phi^N on [0, L] for j = 1..K",
                        details={"fields_drawn": i, "K": K, "L": L}))

    m = s.size("cftp_terminate")
    depths, live_bad, failures, heuristic = [], 0, 0, []
    for i in range(m):
        f = RandomnessField(ctx.seed_int("terminate", i))
        try:
            res = cftp_sample(f, cfg, L=0, certify=True, max_depth=64)
        except CFTPNonTermination:
            failures += 1
            continue
        depths.append(res.memory_length)
        live_bad += not all(res.per_depth_equal.values())
        heuristic.append(cftp_sample(f, cfg, L=0, certify=False, max_depth=64).memory_length)
    hist = {str(k): int(v) for k, v in zip(*np.unique(depths, return_counts=True))} if depths else {}
    ctx.add(exact_check(failures, m, check="termination_cap64",
                        target="certified CFTP terminates within depth 64",
                        details={"memory_length_hist": hist, "mean_memory_length": float(np.mean(depths)) if depths else None,
                                 "heuristic_mean_memory_length": float(np.mean(heuristic)) if heuristic else None}))
    ctx.add(exact_check(live_bad, m - failures, check="certified_next_depth_agrees",
                        target="phi at the certified depth + 1 equals the output"))


_RUNNERS = {name: globals()[f"suite_{name}"] for name in SUITES}


@contextmanager
def _light_gc(gen0: int = 20000):
    # replicas allocate many short-lived acyclic objects; frequent young
    # collections that rescan a large heap dominate otherwise
    old = gc.get_threshold()
    gc.freeze()
    gc.set_threshold(gen0, old[1], old[2])
    try:
        yield
    finally:
        gc.set_threshold(*old)
        gc.unfreeze()


def run_suite(name: str, config: Optional[SuiteConfig] = None) -> TestReport:
    """Run one named battery and return its report."""
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    config = config or SuiteConfig()
    report = TestReport(name, config.seed, fresh_seed=config.fresh_seed,
                        config={"scale": config.scale, "alpha": config.alpha, "overrides": dict(config.overrides)})
    t0 = time.perf_counter()
    with _light_gc():
        _RUNNERS[name](_Ctx(name, config, report))
    report.wall_time = time.perf_counter() - t0
    return report
