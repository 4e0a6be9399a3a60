import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewrot import cocycle
from skewrot.cocycle import (
    CocycleContext,
    PairValue,
    birkhoff_sum,
    check_cocycle_identity,
    check_shift_bound,
    count_first_half,
    denjoy_koksma_check,
    displacement_pair,
    step,
)
from skewrot.errors import PreconditionUnmetError, SumBoundViolationError
from skewrot.exact import HALF, CirclePoint, ExactReal


@pytest.fixture(scope="module")
def ctx(golden):
    return CocycleContext(golden, Fraction(1, 3))


def circle_points(golden):
    return st.builds(
        lambda p, q, k: CirclePoint(ExactReal(p, 0, q) + golden * k),
        st.integers(0, 999),
        st.integers(1, 1000),
        st.integers(-30, 30),
    )


def test_step_boundaries(golden):
    assert step(CirclePoint(ExactReal(0))) == 1
    assert step(CirclePoint(HALF)) == -1
    assert step(CirclePoint(golden)) == -1


def test_count_first_half_examples(ctx):
    x0 = CirclePoint(ExactReal(0))
    assert count_first_half(0, x0, ctx) == 0
    assert count_first_half(3, x0, ctx) == 2  # points 0, .618, .236
    for x in (x0, CirclePoint(Fraction(4, 5))):
        assert count_first_half(1, x, ctx) == (step(x) + 1) // 2


def test_count_first_half_matches_naive(ctx):
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(0, 60)
        x = CirclePoint(ExactReal(rng.randint(0, 99), 0, 100))
        naive = 0
        y = x
        for _ in range(n):
            naive += 1 if y.in_first_half else 0
            y = y + ctx.alpha
        assert count_first_half(n, x, ctx) == naive


def test_birkhoff_examples(ctx):
    x0 = CirclePoint(ExactReal(0))
    assert birkhoff_sum(0, x0, ctx) == 0
    assert birkhoff_sum(3, x0, ctx) == 1
    assert birkhoff_sum(-3, x0, ctx) == -1


def test_pair_examples(golden):
    ctx_half = CocycleContext(golden, Fraction(1, 2))
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(-40, 40)
        x = CirclePoint(ExactReal(rng.randint(0, 999), 0, 1000))
        pv = displacement_pair(n, x, ctx_half)
        assert pv.second == -pv.first  # antipodal start mirrors the walk
    ctx3 = CocycleContext(golden, Fraction(1, 3))
    pv = displacement_pair(5, CirclePoint(ExactReal(0)), ctx3)
    assert pv.first % 2 == 1 and pv.second % 2 == 1
    assert abs(pv.first) <= 5 and abs(pv.second) <= 5
    assert displacement_pair(0, CirclePoint(ExactReal(0)), ctx3) == PairValue(0, 0)


def test_cocycle_identity_examples(ctx):
    x0 = CirclePoint(ExactReal(0))
    assert check_cocycle_identity(0, 0, x0, ctx)
    assert check_cocycle_identity(3, 5, x0, ctx)
    assert check_cocycle_identity(-2, 7, x0, ctx)


def test_shift_bound_examples(ctx):
    x0 = CirclePoint(ExactReal(0))
    assert check_shift_bound(0, 5, x0, ctx)
    assert check_shift_bound(3, 50, x0, ctx)
    assert check_shift_bound(1, 100, CirclePoint(Fraction(1, 3)), ctx)
    with pytest.raises(PreconditionUnmetError):
        check_shift_bound(5, 5, x0, ctx)


@given(st.integers(-120, 120), st.data())
@settings(max_examples=60, deadline=None)
def test_parity_and_antisymmetry(n, data):
    golden = ExactReal(-1, 1, 2, 5)
    ctx = CocycleContext(golden, Fraction(1, 3))
    x = data.draw(circle_points(golden))
    a_n = birkhoff_sum(n, x, ctx)
    assert (a_n - n) % 2 == 0
    assert birkhoff_sum(n, x.antipode(), ctx) == -a_n


@given(st.integers(-60, 60), st.integers(-60, 60), st.data())
@settings(max_examples=60, deadline=None)
def test_cocycle_identity_property(m, n, data):
    golden = ExactReal(-1, 1, 2, 5)
    ctx = CocycleContext(golden, Fraction(1, 3))
    x = data.draw(circle_points(golden))
    assert check_cocycle_identity(m, n, x, ctx)


def test_pair_parity_matches_n(ctx):
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(-50, 50)
        x = CirclePoint(ExactReal(rng.randint(0, 99), 0, 100))
        pv = displacement_pair(n, x, ctx)
        assert pv.first % 2 == n % 2
        assert pv.second % 2 == n % 2


def test_propagation_matches_direct_sum(ctx):
    # jump-propagated interval values equal literal summation on every interval
    from skewrot import partition

    for q in (7, 13, 34):
        part = partition.build(q, ctx, path="reference", verify="off")
        for iv in part.intervals():
            if iv.right.value > iv.left.value:
                mid = CirclePoint((iv.left.value + iv.right.value) * HALF)
            else:
                mid = CirclePoint((iv.left.value + iv.right.value + 1) * HALF)
            assert displacement_pair(q, mid, ctx) == iv.value


def test_membership_flags(golden):
    ctx = CocycleContext(golden, CirclePoint(golden * 3), search_bound=100)
    assert ctx.membership().orbit_witness == 3
    assert ctx.membership().half_orbit_witness is None
    ctx2 = CocycleContext(golden, CirclePoint(HALF + golden * -2), search_bound=100)
    assert ctx2.membership().half_orbit_witness == -2
    ctx3 = CocycleContext(golden, Fraction(1, 3), search_bound=100)
    assert ctx3.membership() == (None, None, 100)
    ctx4 = CocycleContext(golden, 0)
    assert ctx4.membership().orbit_witness == 0
    ctx5 = CocycleContext(golden, Fraction(1, 2))
    assert ctx5.membership().half_orbit_witness == 0


def test_denjoy_koksma(golden, root2m1, ctx):
    w = denjoy_koksma_check(1, ctx)
    assert w.max_abs == 1
    w13 = denjoy_koksma_check(13, ctx)
    assert w13.max_abs <= 3
    ctx2 = CocycleContext(root2m1, Fraction(1, 3))
    assert denjoy_koksma_check(29, ctx2).max_abs <= 3
    with pytest.raises(PreconditionUnmetError):
        denjoy_koksma_check(6, ctx)  # 6 is not a convergent denominator


def test_rational_context_flagged(golden):
    ctx = CocycleContext(Fraction(5, 8), Fraction(1, 3))
    assert ctx.approximate
    assert not CocycleContext(golden, 0).approximate
