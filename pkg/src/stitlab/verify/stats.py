"""Proportion, two-sample and goodness-of-fit checks."""

from __future__ import annotations

from collections import Counter
from math import sqrt

import numpy as np
from scipy import stats

from .report import CheckRecord

DEFAULT_ALPHA = 1e-3
DEFAULT_SIGMAS = 4.0
MIN_REPLICAS = 1000
MIN_EXPECTED = 5.0


def _collect(sampler, n):
    if callable(sampler):
        return [sampler(i) for i in range(n)]
    values = list(sampler)
    if len(values) != n:
        raise ValueError(f"expected {n} samples, got {len(values)}")
    return values


def proportion_band(p0: float, n: int, sigmas: float = DEFAULT_SIGMAS, alpha=None) -> tuple:
    """Acceptance band for a frequency with success probability ``p0``.

    With ``alpha`` the two-sided level is ``alpha``; otherwise it is the
    normal tail beyond ``sigmas`` standard deviations.  An exact binomial
    band is used when ``n p0 (1 - p0) < 25``.
    """
    level = alpha if alpha is not None else 2 * stats.norm.sf(sigmas)
    if n * p0 * (1 - p0) < 25:
        lo = stats.binom.ppf(level / 2, n, p0) / n
        hi = stats.binom.isf(level / 2, n, p0) / n
        return float(lo), float(hi), "binomial"
    z = stats.norm.isf(level / 2)
    s = sqrt(p0 * (1 - p0) / n)
    return p0 - z * s, p0 + z * s, "normal"


def proportion_test(sampler, n: int, p0: float, alpha=None, *, sigmas: float = DEFAULT_SIGMAS,
                    check: str = "proportion", target: str = "", min_replicas: int = MIN_REPLICAS) -> CheckRecord:
    """Frequency of a boolean event over ``n`` replicas against ``p0``.

    ``sampler`` is either ``i -> bool`` or a sequence of ``n`` outcomes.
    """
    if not 0 < p0 < 1:
        raise ValueError("p0 must lie strictly between 0 and 1")
    if n < min_replicas:
        raise ValueError(f"proportion tests need at least {min_replicas} replicas")
    hits = sum(bool(x) for x in _collect(sampler, n))
    phat = hits / n
    lo, hi, method = proportion_band(p0, n, sigmas, alpha)
    return CheckRecord(
        suite="", check=check, kind="proportion", target=target or check, reference=p0,
        estimate=phat, stderr=sqrt(p0 * (1 - p0) / n), band=(lo, hi), n=n,
        alpha=alpha if alpha is not None else float(2 * stats.norm.sf(sigmas)),
        verdict=lo <= phat <= hi, details={"successes": hits, "band_method": method},
    )


def merge_integer_bins(a, b, min_expected: float = MIN_EXPECTED):
    """Contingency table of two integer samples with sparse tails merged.

    Adjacent values are pooled until every column's expected count is at
    least ``min_expected`` in both rows.  Returns ``(table, bin_edges)``
    where each bin is ``[lo, hi]`` inclusive.
    """
    ca, cb = Counter(a), Counter(b)
    na, nb = len(a), len(b)
    share = min(na, nb) / (na + nb)
    values = sorted(set(ca) | set(cb))
    bins, cur, lo = [], [0, 0], None
    for v in values:
        if lo is None:
            lo = v
        cur[0] += ca[v]
        cur[1] += cb[v]
        if (cur[0] + cur[1]) * share >= min_expected:
            bins.append([lo, v, cur[0], cur[1]])
            cur, lo = [0, 0], None
    if lo is not None:
        if bins:
            bins[-1][1] = values[-1]
            bins[-1][2] += cur[0]
            bins[-1][3] += cur[1]
        else:
            bins.append([lo, values[-1], cur[0], cur[1]])
    table = np.array([[x[2] for x in bins], [x[3] for x in bins]])
    return table, [(x[0], x[1]) for x in bins]


def merge_categories(a, b, min_expected: float = MIN_EXPECTED):
    """Contingency table for hashable categories; rare ones pooled into one column."""
    ca, cb = Counter(a), Counter(b)
    na, nb = len(a), len(b)
    share = min(na, nb) / (na + nb)
    cats = sorted(set(ca) | set(cb), key=lambda c: (-(ca[c] + cb[c]), repr(c)))
    kept = [c for c in cats if (ca[c] + cb[c]) * share >= min_expected]
    rest = [c for c in cats if c not in set(kept)]
    cols = [[ca[c], cb[c]] for c in kept]
    labels = [repr(c) for c in kept]
    if rest:
        other = [sum(ca[c] for c in rest), sum(cb[c] for c in rest)]
        if sum(other) * share >= min_expected or not cols:
            cols.append(other)
            labels.append("other")
        else:
            cols[-1][0] += other[0]
            cols[-1][1] += other[1]
            labels[-1] += "+other"
    table = np.array(cols).T
    return table, labels


def _chi2_table(table):
    if table.shape[1] < 2:
        return 0.0, 0, 1.0
    chi2, p, dof, _ = stats.chi2_contingency(table, correction=False)
    return float(chi2), int(dof), float(p)


def two_sample_values(a, b, *, discrete: bool, alpha: float = DEFAULT_ALPHA, check: str = "two_sample",
                      target: str = "", categorical: bool = False, min_replicas: int = MIN_REPLICAS) -> CheckRecord:
    """Two-sample test on precomputed statistic values."""
    n = min(len(a), len(b))
    if n < min_replicas:
        raise ValueError(f"two-sample tests need at least {min_replicas} replicas per sample")
    details = {"n_a": len(a), "n_b": len(b)}
    if categorical:
        table, labels = merge_categories(a, b)
        stat, dof, p = _chi2_table(table)
        details.update(test="chi2", statistic=stat, dof=dof, categories=labels)
    elif discrete:
        table, edges = merge_integer_bins([int(x) for x in a], [int(x) for x in b])
        stat, dof, p = _chi2_table(table)
        details.update(test="chi2", statistic=stat, dof=dof, bins=[list(e) for e in edges],
                       mean_a=float(np.mean(a)), mean_b=float(np.mean(b)))
    else:
        res = stats.ks_2samp(np.asarray(a, float), np.asarray(b, float))
        p = float(res.pvalue)
        details.update(test="ks", statistic=float(res.statistic),
                       mean_a=float(np.mean(a)), mean_b=float(np.mean(b)))
    return CheckRecord(
        suite="", check=check, kind="two_sample", target=target or check, p_value=p, alpha=alpha,
        n=n, verdict=p > alpha, details=details,
    )


def two_sample_test(sampler_a, sampler_b, statistic, n: int, alpha: float = DEFAULT_ALPHA, *,
                    check: str = "two_sample", target: str = "") -> CheckRecord:
    """Compare the laws of ``statistic`` under two samplers (``i -> Tessellation``)."""
    a = [statistic(x) for x in _collect(sampler_a, n)]
    b = [statistic(x) for x in _collect(sampler_b, n)]
    return two_sample_values(a, b, discrete=statistic.discrete, alpha=alpha, check=check,
                             target=target or statistic.name)


def goodness_of_fit(counts, expected_probs, labels, alpha: float = DEFAULT_ALPHA, *, check: str,
                    target: str) -> CheckRecord:
    """Chi-square of observed bin counts against fixed bin probabilities."""
    counts = np.asarray(counts, float)
    probs = np.asarray(expected_probs, float)
    n = int(counts.sum())
    expected = probs / probs.sum() * n
    stat, p = stats.chisquare(counts, expected)
    return CheckRecord(
        suite="", check=check, kind="goodness_of_fit", target=target, p_value=float(p), alpha=alpha,
        n=n, verdict=float(p) > alpha,
        details={"statistic": float(stat), "bins": list(labels), "observed": counts.astype(int).tolist(),
                 "expected": expected.tolist(), "min_expected": float(expected.min())},
    )


def ks_uniform(u, alpha: float = DEFAULT_ALPHA, *, check: str, target: str) -> CheckRecord:
    res = stats.kstest(np.asarray(u, float), "uniform")
    return CheckRecord(
        suite="", check=check, kind="goodness_of_fit", target=target, p_value=float(res.pvalue),
        alpha=alpha, n=len(u), verdict=float(res.pvalue) > alpha, details={"statistic": float(res.statistic)},
    )


def exact_check(failures: int, n: int, *, check: str, target: str, details=None) -> CheckRecord:
    return CheckRecord(suite="", check=check, kind="exact", target=target, n=n, failures=int(failures),
                       verdict=failures == 0, details=details or {})


def bound_check(estimate: float, lo: float, hi: float, *, check: str, target: str, n=None,
                reference=None, details=None) -> CheckRecord:
    return CheckRecord(suite="", check=check, kind="bound", target=target, estimate=float(estimate),
                       band=(float(lo), float(hi)), n=n, reference=reference,
                       verdict=lo <= estimate <= hi, details=details or {})


def trend_check(estimates, stderrs, lags, *, sigmas: float = 2.0, check: str, target: str,
                n=None) -> CheckRecord:
    """Sequence must be non-increasing up to ``sigmas`` standard errors of each difference."""
    steps = []
    for i in range(len(estimates) - 1):
        inc = float(estimates[i + 1] - estimates[i])
        allow = float(sigmas * sqrt(stderrs[i] ** 2 + stderrs[i + 1] ** 2))
        steps.append({"from_lag": lags[i], "to_lag": lags[i + 1], "increase": inc, "allowance": allow})
    ok = all(s["increase"] <= s["allowance"] for s in steps)
    return CheckRecord(suite="", check=check, kind="trend", target=target, n=n, verdict=ok,
                       details={"steps": steps, "estimates": [float(x) for x in estimates],
                                "stderrs": [float(x) for x in stderrs], "lags": list(lags)})
