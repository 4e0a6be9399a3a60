import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewrot import cf
from skewrot.errors import (
    BestApproxViolationError,
    EndOfTableError,
    RationalExhaustedError,
)
from skewrot.exact import ExactReal


def test_golden_expansion(golden):
    t = cf.expand(golden, 6)
    assert t.a0 == 0
    assert t.quotients == (1, 1, 1, 1, 1, 1)
    assert t.denominators == [1, 2, 3, 5, 8, 13]
    assert [r.p for r in t.convergents] == [1, 1, 2, 3, 5, 8]


def test_root2_expansion(root2m1):
    t = cf.expand(root2m1, 5)
    assert t.a0 == 0
    assert t.denominators == [1, 2, 5, 12, 29]


def test_rational_expansion():
    t = cf.expand(ExactReal(7, 0, 3), 2)
    assert t.a0 == 2
    assert t.quotients == (3,)
    with pytest.raises(RationalExhaustedError):
        cf.expand(ExactReal(7, 0, 3), 5)
    short = cf.expand(ExactReal(7, 0, 3), 5, allow_short=True)
    assert short.finite and len(short.convergents) == 2


def test_depth_one(golden, root2m1):
    assert cf.expand(golden, 1).denominators == [1]
    assert cf.expand(root2m1, 1).denominators == [1]
    assert cf.expand(root2m1, 1).convergents[0].p == 0


def test_determinant_identity(golden):
    t = cf.expand(golden, 6)
    for prev, cur in zip(t.convergents, t.convergents[1:]):
        assert cur.q * prev.p - cur.p * prev.q == (-1) ** cur.k


@pytest.mark.parametrize("depth", [5, 12, 25])
def test_recurrence_against_direct_evaluation(golden, root2m1, root13_frac, depth):
    for alpha in (golden, root2m1, root13_frac):
        t = cf.expand(alpha, depth)
        for row in t.convergents:
            if row.k == 0:
                continue
            direct = cf.convergent_value(t.a0, list(t.quotients[: row.k]))
            assert direct == ExactReal(row.p, 0, row.q)


@pytest.mark.parametrize("depth", [6, 15])
def test_norm_chain(golden, root2m1, root13_frac, depth):
    # ||q_k alpha|| < 1/q_{k+1} < 1/q_k
    for alpha in (golden, root2m1, root13_frac):
        t = cf.expand(alpha, depth)
        for i in range(len(t.convergents) - 1):
            q_next = t.convergents[i + 1].q
            q_cur = t.convergents[i].q
            assert t.norm_q_alpha(i) < ExactReal(1, 0, q_next)
            assert q_next > q_cur


def test_denominator_set_and_successor(golden):
    t = cf.expand(golden, 6)
    denoms = cf.denominator_set(t)
    assert denoms == [1, 2, 3, 5, 8, 13]
    assert cf.next_denominator(5, denoms) == 8
    assert cf.next_denominator(1, denoms) == 2
    with pytest.raises(EndOfTableError):
        cf.next_denominator(13, denoms)
    with pytest.raises(ValueError):
        cf.next_denominator(6, denoms)


def test_expand_to_cover(golden):
    t = cf.expand_to_cover(golden, 100)
    assert t.denominators[-1] >= 100
    t2 = cf.expand_to_cover(ExactReal(7, 0, 3), 100, allow_short=True)
    assert t2.denominators == [1, 3]


def test_verify_best_approx(golden, root2m1):
    t = cf.expand(golden, 8)
    w = cf.verify_best_approx(t, 3)  # q = 5, q+ = 8
    assert w.q == 5 and w.q_next == 8 and w.argmin_q == 5
    w0 = cf.verify_best_approx(t, 0)
    assert w0.argmin_q == 1
    t2 = cf.expand(root2m1, 6)
    w2 = cf.verify_best_approx(t2, 2)  # q = 5, q+ = 12
    assert w2.argmin_q == 5
    assert w2.min_norm > ExactReal(1, 0, 24)


def test_badly_approximable(golden, root2m1):
    assert cf.is_badly_approximable(cf.expand(golden, 8)) == cf.BadlyApproximable(True, True, 1, False)
    assert cf.is_badly_approximable(cf.expand(root2m1, 8)).max_quotient == 2
    rat = cf.is_badly_approximable(cf.expand(ExactReal(7, 0, 3), 2))
    assert not rat.applicable


def test_period_detection_matches_reexpansion(golden, root13_frac):
    for alpha in (golden, root13_frac, ExactReal(3, 2, 7, 11)):
        t = cf.expand(alpha, 30)
        assert t.period is not None
        start, length = t.period
        # quotients beyond the preperiod must cycle with the detected period
        for i in range(start, len(t.quotients) - length):
            assert t.quotients[i] == t.quotients[i + length]


def test_half_point_separation_examples(golden):
    t = cf.expand(golden, 8)
    w1 = cf.half_point_separation(t, 1)
    assert w1.min_norm == ExactReal(1, 0, 2)
    w5 = cf.half_point_separation(t, 5)
    assert w5.min_norm >= ExactReal(1, 0, 120)
    w13 = cf.half_point_separation(t, 13)
    assert w13.min_norm >= ExactReal(1, 0, 312)
    with pytest.raises(ValueError):
        cf.half_point_separation(t, 6)


def test_half_point_symmetry(golden):
    # ||1/2 - j*alpha|| == ||1/2 + j*alpha||, the reason only j >= 0 is scanned
    half = ExactReal(1, 0, 2)
    for j in range(1, 20):
        lhs = (half - golden * j).distance_to_integers()
        rhs = (half + golden * j).distance_to_integers()
        assert lhs == rhs


def test_prefix_table(golden):
    t = cf.expand(golden, 20)
    p = cf.prefix_table(t, 6)
    assert p.denominators == [1, 2, 3, 5, 8, 13]
    assert p.quotients == (1, 1, 1, 1, 1, 1)


@given(st.integers(1, 500), st.integers(2, 500))
@settings(max_examples=80)
def test_rational_cf_reconstructs(p, q):
    x = ExactReal(p, 0, q)
    t = cf.expand(x, 50, allow_short=True)
    assert cf.convergent_value(t.a0, list(t.quotients)) == x
