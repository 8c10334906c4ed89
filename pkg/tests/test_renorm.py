from math import exp

import numpy as np
import pytest

from stitlab.geometry import ConvexPolytope, Hyperplane, Q, clip
from stitlab.iteration import rescale_restrict
from stitlab.measure import DiscreteMeasure, axis_measure
from stitlab.renorm import (
    RenormConfig,
    atom_probability,
    covariance_estimate,
    mixing_covariance_exact,
    sample_Z0,
    trivial_in,
    z_step,
    z_trajectory,
)
from stitlab.tessellation import Tessellation

HALF = Q("1/2")
W = ConvexPolytope.box(-HALF, -HALF, HALF, HALF)
CFG = RenormConfig(Q(2), W, axis_measure())


def _cut(x):
    return Tessellation(W, clip(W, Hyperplane.through((1, 0), x)))


def test_config_validation():
    with pytest.raises(ValueError, match="^a:"):
        RenormConfig(1, W, axis_measure())
    with pytest.raises(ValueError, match="^window:"):
        RenormConfig(2, ConvexPolytope.box(0, 0, 1, 1), axis_measure())
    with pytest.raises(ValueError, match="^measure:"):
        RenormConfig(2, ConvexPolytope.interval(-1, 1), axis_measure())
    assert CFG.b == 2 and CFG.refine_time == 0.5 and CFG.window_mass == 2
    assert RenormConfig("3/2", W, axis_measure()).b == 3


def test_atom_uses_the_rescaled_cells():
    # the cut moves to x = 1/2 and leaves the window; only W itself must survive
    T = _cut(Q(1) / 4)
    base = rescale_restrict(T, 2, W)
    assert base.is_trivial
    naive = sum(axis_measure().mass(C) for C in T.cells)
    assert naive == 3
    assert atom_probability(T, CFG) == pytest.approx(exp(-1.0))
    # a cut at x = 1/8 moves to x = 1/4 and stays: cells of mass 7/4 and 5/4
    assert atom_probability(_cut(Q(1) / 8), CFG) == pytest.approx(exp(-1.5))


def test_atom_probability_by_simulation():
    T = _cut(Q(1) / 4)
    base = rescale_restrict(T, 2, W)
    n = 4000
    hits = sum(z_step(T, CFG, np.random.default_rng(i)) == base for i in range(n))
    p = exp(-1.0)
    assert abs(hits / n - p) < 4 * np.sqrt(p * (1 - p) / n)


def test_z_step_checks_the_window():
    with pytest.raises(ValueError):
        z_step(Tessellation.trivial(ConvexPolytope.box(-1, -1, 1, 1)), CFG, 0)


def test_trajectory_provenance_replays():
    traj = z_trajectory(CFG, 3, np.random.default_rng(5), first_index=-2)
    assert traj.indices == [-2, -1, 0, 1]
    assert len(traj.provenance) == 4
    Z = sample_Z0(CFG, traj.provenance[0])
    assert Z == traj[-2]
    for j, n in enumerate(traj.indices[1:], start=1):
        Z = z_step(Z, CFG, traj.provenance[j])
        assert Z == traj[n]
    with pytest.raises(ValueError):
        z_trajectory(CFG, -1, 0)


def test_trivial_in():
    T = _cut(Q(1) / 4)
    assert trivial_in(T, ConvexPolytope.box(-Q(1) / 8, -Q(1) / 8, Q(1) / 8, Q(1) / 8))
    assert not trivial_in(T, W)


def test_mixing_closed_form():
    lam = 0.7
    p = exp(-lam)
    assert mixing_covariance_exact(lam, 2.0, 0) == pytest.approx(p * (1 - p))
    vals = [mixing_covariance_exact(lam, 2.0, t) for t in range(1, 8)]
    assert all(x > y > 0 for x, y in zip(vals, vals[1:]))
    assert vals[-1] / vals[-2] == pytest.approx(0.5, rel=0.01)


def test_covariance_estimate():
    A = [1, 0, 1, 0] * 50
    est = covariance_estimate(A, A, 0)
    assert est.estimate == pytest.approx(0.25)
    ind = covariance_estimate(A, [1, 1, 0, 0] * 50, 1)
    assert ind.estimate == pytest.approx(0.0)
    assert ind.stderr > 0


def test_discrete_measure_chain_stays_in_window():
    cfg = RenormConfig(3, W, DiscreteMeasure.of([((1, 0), 1), ((1, 1), "1/2"), ((0, 1), 1)]))
    traj = z_trajectory(cfg, 3, 1)
    for n in traj.indices:
        traj[n].check_partition()
