import pytest
from hypothesis import strategies as st

from stitlab.geometry import ConvexPolytope, Direction, Hyperplane, Q, clip, support_interval
from stitlab.measure import axis_measure

HALF = Q("1/2")


@pytest.fixture
def unit_box():
    return ConvexPolytope.box(-HALF, -HALF, HALF, HALF)


@pytest.fixture
def axis():
    return axis_measure()


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=64).map(Q)
positive = st.fractions(min_value="1/64", max_value=8, max_denominator=64).map(Q)
directions = st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(lambda v: v != (0, 0)).map(
    lambda v: Direction.of(*v))


@st.composite
def boxes(draw):
    x0, y0 = draw(rationals), draw(rationals)
    w, h = draw(positive), draw(positive)
    return ConvexPolytope.box(x0, y0, x0 + w, y0 + h)


@st.composite
def polygons(draw, max_cuts=4):
    """Convex polygons obtained from a box by random straight cuts."""
    P = draw(boxes())
    for _ in range(draw(st.integers(0, max_cuts))):
        u = draw(directions)
        lo, hi = support_interval(P, u)
        t = draw(st.fractions(min_value="1/32", max_value="31/32", max_denominator=32)).limit_denominator(32)
        low, high = clip(P, Hyperplane(u, lo + Q(t) * (hi - lo)))
        P = draw(st.sampled_from([p for p in (low, high) if p is not None]))
    return P


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
