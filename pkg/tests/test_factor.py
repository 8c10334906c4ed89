import pytest

from stitlab.geometry import ConvexPolytope, Hyperplane, Q, clip, scale_polytope
from stitlab.iteration import rescale_restrict
from stitlab.measure import axis_measure
from stitlab.factor import (
    ORIGIN_TAG,
    CFTPNonTermination,
    ComponentSource,
    certificate_check,
    certified_range,
    cftp_sample,
    coupled_from,
    doubling,
    field_step,
    germ_tag,
    phi_run,
    v_chain,
)
from stitlab.renorm import RenormConfig
from stitlab.stit import sample_final
from stitlab.streams import RandomnessField
from stitlab.tessellation import Tessellation

HALF = Q("1/2")
W = ConvexPolytope.box(-HALF, -HALF, HALF, HALF)
SMALL = scale_polytope(W, Q(1) / 5)
CFG = RenormConfig(Q(2), W, axis_measure())
CFG_SMALL = RenormConfig(Q(2), SMALL, axis_measure())


def test_depth_zero_and_one():
    f = RandomnessField(3)
    assert phi_run(f, 0, 0, CFG).values[0] == Tessellation.trivial(W)
    R = sample_final(W, axis_measure(), 1.0, f.stream(-1, "component", *ORIGIN_TAG))
    assert phi_run(f, 1, 0, CFG).values[0] == rescale_restrict(R, 2, W)


def test_germ_tags():
    T = Tessellation(W, clip(W, Hyperplane.through((1, 0), Q(1) / 8)))
    left, right = T.cells
    assert germ_tag(left, W, 2) == ORIGIN_TAG
    tag = germ_tag(right, W, 2)
    inner = ConvexPolytope.box(Q(1) / 8, -Q(1) / 4, Q(1) / 4, Q(1) / 4)
    assert tag == ("germ", 1, inner.key)
    far = ConvexPolytope.box(Q(3) / 8, -HALF, HALF, HALF)
    assert germ_tag(far, W, 2)[:2] == ("germ", 0)


def test_null_anticipation_and_reuse():
    f = RandomnessField(11)
    run = phi_run(f, 5, 3, CFG_SMALL)
    assert run.anticipation_ok()
    assert set(run.values) == set(range(-5, 4))
    assert all(n >= -5 for n in f.accesses)
    # a second identical run is served entirely from the memo
    size = len(f._shared["memo"])
    assert phi_run(f, 5, 3, CFG_SMALL).values == run.values
    assert len(f._shared["memo"]) == size
    f.clear_memo()
    assert phi_run(f, 5, 3, CFG_SMALL).values == run.values


def test_shift_equivariance():
    f = RandomnessField(4)
    N, L = 4, 2
    a = phi_run(f.shifted(1), N, L, CFG_SMALL)
    b = phi_run(f, N - 1, L + 1, CFG_SMALL)
    for n in range(-N, L + 1):
        assert a.values[n] == b.values[n + 1]


def test_field_step_requires_a_known_mode():
    src = ComponentSource(RandomnessField(0), CFG)
    with pytest.raises(ValueError):
        field_step(Tessellation.trivial(W), 0, src, mode="bogus")


def test_certificate_soundness_small():
    K = 3
    checked = 0
    for seed in range(60):
        f = RandomnessField(seed)
        cert = certificate_check(f, 2, K, CFG_SMALL)
        assert cert.verdict == (certified_range(f, 2, CFG_SMALL, K) == K)
        if not cert.verdict:
            continue
        checked += 1
        base = phi_run(f, 2, 1, CFG_SMALL).window_values(-2)
        for j in range(1, K + 1):
            assert phi_run(f, 2 + j, 1, CFG_SMALL).window_values(-2) == base
    assert checked > 10


def test_cftp_modes():
    f = RandomnessField(21)
    cert = cftp_sample(f, CFG_SMALL, L=1, certify=True)
    assert cert.certified and cert.certified_range == 40
    assert cert.per_depth_equal == {cert.memory_length + 1: True}
    heur = cftp_sample(f, CFG_SMALL, L=1)
    assert not heur.certified and heur.depths[0] == 1
    assert set(heur.values) == {0, 1} == set(cert.values)
    rep = cert.to_report()
    assert rep["certified"] and rep["memory_length"] == cert.memory_length


def test_cftp_nontermination():
    f = RandomnessField(1)
    with pytest.raises(CFTPNonTermination) as exc:
        cftp_sample(f, CFG, schedule=[1])
    assert exc.value.report["depths"] == [1]
    with pytest.raises(CFTPNonTermination):
        cftp_sample(f, CFG, certify=True, max_depth=1, certificate_range=10**6)
    with pytest.raises(ValueError):
        cftp_sample(f, CFG, schedule=[2, 1])


def test_doubling():
    assert doubling(10) == [1, 2, 4, 8]


def test_v_chain_joins_phi():
    joined = 0
    for seed in range(30):
        f = RandomnessField(seed)
        v = v_chain(f, 3, 2, CFG_SMALL, seed)
        phi = phi_run(f, 3, 2, CFG_SMALL)
        assert v.values[-3] != phi.values[-3] or v.values[-3].is_trivial
        if v.values[-2] == phi.values[-2]:
            # once equal, the shared recursion keeps them equal
            assert coupled_from(v, phi, -2)
            joined += 1
    assert joined > 0
