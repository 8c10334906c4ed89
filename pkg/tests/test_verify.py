import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stitlab.verify import SUITES, SuiteConfig, run_suite
from stitlab.verify.report import CheckRecord, TestReport
from stitlab.verify.stats import (
    bound_check,
    exact_check,
    goodness_of_fit,
    merge_categories,
    merge_integer_bins,
    proportion_band,
    proportion_test,
    trend_check,
    two_sample_values,
)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=20, max_size=300), st.lists(st.integers(0, 30), min_size=20, max_size=300))
def test_merged_bins_keep_every_sample(a, b):
    table, edges = merge_integer_bins(a, b)
    assert table.sum(axis=1).tolist() == [len(a), len(b)]
    assert all(lo <= hi for lo, hi in edges)
    assert all(e1[1] < e2[0] for e1, e2 in zip(edges, edges[1:]))
    if table.shape[1] > 1:
        share = min(len(a), len(b)) / (len(a) + len(b))
        assert (table.sum(axis=0) * share >= 5).all()


def test_merged_categories():
    a = [(1, 2)] * 50 + [(1, 3)] * 40 + [(9, 9)] * 2
    b = [(1, 2)] * 45 + [(1, 3)] * 45 + [(8, 8)] * 1
    table, labels = merge_categories(a, b)
    assert table.sum() == len(a) + len(b)
    assert labels[0] == repr((1, 2))


def test_identical_samples():
    x = list(np.random.default_rng(0).poisson(3, 2000))
    rec = two_sample_values(x, x, discrete=True)
    assert rec.p_value == pytest.approx(1.0) and rec.verdict and rec.audit()
    rec = two_sample_values([float(v) for v in x], [float(v) for v in x], discrete=False)
    assert rec.p_value == pytest.approx(1.0)


def test_different_samples_fail():
    rng = np.random.default_rng(1)
    rec = two_sample_values(list(rng.poisson(3, 2000)), list(rng.poisson(4, 2000)), discrete=True)
    assert not rec.verdict and rec.audit() == rec.verdict


def test_minimum_replicas():
    with pytest.raises(ValueError):
        two_sample_values([1] * 10, [1] * 10, discrete=True)
    with pytest.raises(ValueError):
        proportion_test([True] * 10, 10, 0.5)
    with pytest.raises(ValueError):
        proportion_test([True] * 2000, 2000, 1.0)


def test_proportion_band():
    lo, hi, method = proportion_band(0.5, 10**4)
    assert method == "normal" and hi - 0.5 == pytest.approx(4 * 0.005, rel=1e-6) and 0.5 - lo == pytest.approx(hi - 0.5)
    lo, hi, method = proportion_band(1e-3, 1000)
    assert method == "binomial" and lo <= 1e-3 <= hi
    rec = proportion_test([i % 2 == 0 for i in range(4000)], 4000, 0.5)
    assert rec.verdict and rec.estimate == 0.5 and rec.audit()


def test_other_checks():
    rec = goodness_of_fit([10, 20, 30], [1, 2, 3], ["a", "b", "c"], check="g", target="t")
    assert rec.p_value == pytest.approx(1.0) and rec.verdict
    assert not exact_check(2, 10, check="e", target="t").verdict
    assert bound_check(0.5, 0, 1, check="b", target="t").verdict
    rec = trend_check([0.3, 0.2, 0.25], [0.01, 0.01, 0.01], [1, 2, 3], check="tr", target="t")
    assert not rec.verdict and rec.audit() == rec.verdict
    rec = trend_check([0.3, 0.2, 0.21], [0.01, 0.01, 0.01], [1, 2, 3], check="tr", target="t")
    assert rec.verdict


def test_report_audit_detects_tampering():
    rep = TestReport("s", 1)
    rep.add(proportion_test([True] * 500 + [False] * 500, 1000, 0.5, check="p"))
    assert rep.passed and rep.audit()
    rep.record("p").estimate = 0.9
    assert not rep.audit()
    with pytest.raises(KeyError):
        rep.record("missing")
    assert not TestReport("empty", 0).passed


def test_unknown_suite_and_scale():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("nonsense")
    with pytest.raises(ValueError, match="scale"):
        SuiteConfig(scale="huge")


def test_fresh_seed_is_recorded():
    cfg = SuiteConfig(fresh_seed=True, scale="smoke")
    rep = run_suite("poisson1d", cfg)
    assert rep.fresh_seed and rep.seed == cfg.seed


@pytest.mark.parametrize("name", SUITES)
def test_suite_smoke(name):
    rep = run_suite(name, SuiteConfig(scale="smoke"))
    assert rep.records and rep.audit()
    assert all(isinstance(r, CheckRecord) and r.suite == name for r in rep.records)
    doc = json.loads(rep.to_json())
    assert doc["suite"] == name and len(doc["records"]) == len(rep.records)
    assert rep.text().splitlines()[0].startswith(f"suite {name}")
