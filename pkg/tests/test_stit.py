import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from stitlab.geometry import ConvexPolytope, Q
from stitlab.measure import IsotropicMeasure, LebesguePoints, axis_measure
from stitlab.stit import (
    BudgetExceeded,
    continue_run,
    replay,
    run,
    sample_final,
    snapshot,
    total_rate,
)
from stitlab.tessellation import Tessellation

HALF = Q("1/2")


def test_same_seed_same_run(unit_box, axis):
    a, b = run(unit_box, axis, 3.0, 42), run(unit_box, axis, 3.0, 42)
    assert a.final == b.final and a.events == b.events
    assert run(unit_box, axis, 3.0, 43).final != a.final


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.1, 4.0))
def test_replay_reproduces_final(seed, t):
    W = ConvexPolytope.box(-HALF, -HALF, HALF, HALF)
    for m in (IsotropicMeasure(1.0),):
        r = run(W, m, t, seed)
        assert replay(W, r.events) == r.final
        r.final.check_partition()


def test_snapshot_is_right_continuous(unit_box, axis):
    r = run(unit_box, axis, 4.0, 7)
    assert r.event_count > 2
    for e in r.events:
        T = snapshot(r, e.time)
        assert e.child_keys[0] in T.keys and e.child_keys[1] in T.keys
    assert snapshot(r, 4.0) == r.final
    with pytest.raises(ValueError):
        snapshot(r, 5.0)


def test_tampered_log_is_rejected(unit_box, axis):
    r = run(unit_box, axis, 3.0, 8)
    assert r.event_count >= 1
    e = r.events[0]
    bad = type(e)(e.time, e.parent_key, e.hyperplane, (e.child_keys[1], e.child_keys[0]))
    with pytest.raises(ValueError):
        replay(unit_box, (bad,) + r.events[1:])


def test_budget(unit_box, axis):
    with pytest.raises(BudgetExceeded):
        run(unit_box, axis, 1e6, 0, budget=1000)
    with pytest.raises(BudgetExceeded):
        run(unit_box, axis, 50.0, 0, budget=20)
    with pytest.raises(ValueError):
        run(unit_box, axis, 0.0, 0)


def test_continue_run_extends_the_log(unit_box, axis):
    r = run(unit_box, axis, 1.5, 3)
    r2 = continue_run(r, 1.0, np.random.default_rng(4))
    assert r2.t_end == 2.5
    assert r2.events[: r.event_count] == r.events
    assert all(e.time > 1.5 for e in r2.events[r.event_count:])
    assert snapshot(r2, 1.5) == r.final
    for C in r2.final.cells:
        assert any(D.contains(C) for D in r.final.cells)


def test_living_cells_keep_their_clocks(unit_box, axis):
    r = run(unit_box, axis, 1.0, 5)
    assert set(r.clocks) == set(r.final.keys)
    assert all(d > 1.0 for d in r.clocks.values())
    r2 = continue_run(r, 100.0, 6)
    first = min(r.clocks.values())
    assert r2.events[r.event_count].time == first


@given(st.integers(0, 10**6), st.sampled_from([0.5, 1.0, 3.0]))
@settings(max_examples=30, deadline=None)
def test_sample_final_matches_run(seed, t):
    W = ConvexPolytope.box(-HALF, -HALF, HALF, HALF)
    m = axis_measure()
    assert sample_final(W, m, t, seed) == run(W, m, t, seed).final
    assert sample_final(W, m, t, seed).keys == run(W, m, t, seed).final.keys


def test_total_rate(unit_box, axis):
    assert total_rate(Tessellation.trivial(unit_box), axis) == 2
    T = sample_final(unit_box, axis, 3.0, 1)
    assert total_rate(T, axis) == sum(axis.mass(C) for C in T.cells)


def test_interval_cut_counts_are_poisson():
    I = ConvexPolytope.interval(-HALF, HALF)
    t = 3.0
    counts = [len(sample_final(I, LebesguePoints(), t, np.random.default_rng(i))) - 1 for i in range(3000)]
    assert abs(np.mean(counts) - t) < 4 * np.sqrt(t / 3000)
    assert stats.ks_2samp(counts, np.random.default_rng(0).poisson(t, 3000)).pvalue > 1e-3


def test_window_consistency(axis):
    # Y_t on a big window, seen in a small one, matches Y_t run on the small one
    small = ConvexPolytope.box(-HALF, -HALF, HALF, HALF)
    big = ConvexPolytope.box(-1, -1, Q(3) / 2, 1)
    n = 2000
    a = [len(sample_final(big, axis, 2.0, np.random.default_rng(i)).restrict(small)) for i in range(n)]
    b = [len(sample_final(small, axis, 2.0, np.random.default_rng(10**6 + i))) for i in range(n)]
    assert stats.ks_2samp(a, b).pvalue > 1e-3
