import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewrot.errors import IncomparableRepresentationsError
from skewrot.exact import (
    CirclePoint,
    ExactReal,
    compare,
    distance_to_integers,
    nearest_integer,
    parse_real,
    reduce_mod_1,
)

rationals = st.builds(
    lambda a, c: ExactReal(a, 0, c),
    st.integers(-400, 400),
    st.integers(1, 60),
)


def surds(d):
    return st.builds(
        lambda a, b, c: ExactReal(a, b, c, d),
        st.integers(-60, 60),
        st.integers(-25, 25),
        st.integers(1, 40),
    )


def as_float(x: ExactReal) -> float:
    return (x.a + x.b * math.sqrt(x.d)) / x.c


def test_normalization():
    x = ExactReal(2, 4, 6, 8)  # sqrt(8) = 2*sqrt(2); gcd reduction
    assert (x.a, x.b, x.c, x.d) == (1, 4, 3, 2)
    assert ExactReal(3, 5, 1, 0).b == 0
    assert ExactReal(1, 1, 1, 4) == ExactReal(3)  # sqrt(4) folds into the rational part
    assert ExactReal(-1, 0, -2) == ExactReal(1, 0, 2)


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        ExactReal(1, 0, 0)


def test_nearest_integer_examples(golden):
    assert nearest_integer(ExactReal(0)) == 0
    assert nearest_integer(golden) == 1
    assert nearest_integer(ExactReal(7, 0, 3)) == 2


def test_nearest_integer_half_ties_toward_even():
    assert nearest_integer(ExactReal(1, 0, 2)) == 0
    assert nearest_integer(ExactReal(3, 0, 2)) == 2
    assert nearest_integer(ExactReal(-1, 0, 2)) == 0
    assert nearest_integer(ExactReal(-3, 0, 2)) == -2


def test_distance_to_integers_examples(golden):
    assert distance_to_integers(ExactReal(0)) == 0
    assert distance_to_integers(ExactReal(7, 0, 3)) == ExactReal(1, 0, 3)
    # ||alpha|| = 1 - alpha for alpha in (1/2, 1)
    assert distance_to_integers(golden) == ExactReal(3, -1, 2, 5)


def test_reduce_mod_1_examples(golden):
    assert reduce_mod_1(ExactReal(-1, 0, 3)).value == ExactReal(2, 0, 3)
    assert reduce_mod_1(golden).value == golden
    # (-1-sqrt(5))/2 ~ -1.618: floor is -2
    assert reduce_mod_1(ExactReal(-1, -1, 2, 5)).value == ExactReal(3, -1, 2, 5)


def test_compare_examples(golden):
    assert compare(ExactReal(1, 0, 2), golden) == -1
    assert compare(golden, golden) == 0
    assert compare(ExactReal(2, 0, 3), ExactReal(1, 0, 2)) == 1


def test_compare_mixed_fields_rejected():
    with pytest.raises(IncomparableRepresentationsError):
        compare(ExactReal(0, 1, 1, 2), ExactReal(0, 1, 1, 5))
    # equality between distinct fields is just False, never an error
    assert not ExactReal(0, 1, 1, 2) == ExactReal(0, 1, 1, 5)


def test_arithmetic_matches_fraction_oracle():
    a = ExactReal(7, 0, 3)
    b = ExactReal(-5, 0, 4)
    fa, fb = Fraction(7, 3), Fraction(-5, 4)
    assert (a + b).as_fraction() == fa + fb
    assert (a - b).as_fraction() == fa - fb
    assert (a * b).as_fraction() == fa * fb
    assert (a / b).as_fraction() == fa / fb


def test_surd_division_roundtrip(golden):
    x = ExactReal(3, -2, 7, 5)
    assert (x / golden) * golden == x
    assert (x * x) / x == x


def test_floor_bracketing(golden):
    assert golden.floor() == 0
    assert (golden * 5).floor() == 3  # 5*0.618 = 3.09
    assert (-golden).floor() == -1
    assert ExactReal(-7, 0, 2).floor() == -4


def test_hash_eq_consistency_with_numbers():
    assert ExactReal(4, 0, 2) == 2
    assert hash(ExactReal(4, 0, 2)) == hash(2)
    assert ExactReal(1, 0, 3) == Fraction(1, 3)
    assert hash(ExactReal(1, 0, 3)) == hash(Fraction(1, 3))


def test_decimal_rendering(golden):
    assert ExactReal(1, 0, 3).decimal(6) == "0.333333"
    assert ExactReal(-1, 0, 4).decimal(4) == "-0.2500"
    assert golden.decimal(10) == "0.6180339887"


def test_scaled_floor(golden):
    for bits in (10, 64, 128):
        k = golden.scaled_floor(bits)
        assert ExactReal(k, 0, 1) <= golden * (2**bits)
        assert golden * (2**bits) < ExactReal(k + 1)
    assert ExactReal(-7, 0, 2).scaled_floor(3) == -28


@pytest.mark.parametrize(
    "text, expected",
    [
        ("7/3", ExactReal(7, 0, 3)),
        ("-2", ExactReal(-2)),
        ("(-1+1*sqrt(5))/2", ExactReal(-1, 1, 2, 5)),
        ("(3-2*sqrt(7))/5", ExactReal(3, -2, 5, 7)),
        ("sqrt(2)", ExactReal(0, 1, 1, 2)),
        ("(1+sqrt(5))/2", ExactReal(1, 1, 2, 5)),
        ("-sqrt(3)", ExactReal(0, -1, 1, 3)),
        ("2*sqrt(5)", ExactReal(0, 2, 1, 5)),
    ],
)
def test_parse_real(text, expected):
    assert parse_real(text) == expected


@pytest.mark.parametrize("text", ["abc", "1/", "sqrt(-3)", "1.5", "2sqrt(5)", ""])
def test_parse_real_rejects(text):
    with pytest.raises(ValueError):
        parse_real(text)


def test_parse_roundtrips(golden):
    for x in (golden, ExactReal(7, 0, 3), ExactReal(-3, -2, 9, 13), ExactReal(0)):
        assert parse_real(str(x)) == x


@given(surds(5), surds(5))
def test_order_antisymmetric_and_total(x, y):
    assert (x < y) + (y < x) + (x == y) == 1


@given(surds(2), surds(2), surds(2))
@settings(max_examples=60)
def test_order_transitive(x, y, z):
    if x < y and y < z:
        assert x < z


@given(surds(5), st.integers(-50, 50))
def test_reduce_mod_1_translation_invariant(x, n):
    assert reduce_mod_1(x + n).value == reduce_mod_1(x).value


@given(st.one_of(rationals, surds(5)))
def test_norm_range_and_symmetry(x):
    n = distance_to_integers(x)
    assert ExactReal(0) <= n <= ExactReal(1, 0, 2)
    assert distance_to_integers(-x) == n


@given(st.one_of(rationals, surds(5)))
def test_norm_doubling_bound(x):
    # ||x|| >= ||2x|| / 2
    assert distance_to_integers(x) * 2 >= distance_to_integers(x * 2)


@given(st.one_of(rationals, surds(3)))
def test_float_agrees_with_exact_comparisons(x):
    approx = as_float(x)
    assert abs(float(x) - approx) < 1e-9
    assert (x.sign() > 0) == (approx > 1e-12) or abs(approx) < 1e-9


def test_circle_point_arithmetic(golden):
    p = CirclePoint(golden)
    assert (p + p).value == golden * 2 - 1  # 1.236 wraps
    assert (p - CirclePoint(Fraction(3, 4))).value == golden - ExactReal(3, 0, 4) + 1
    assert p.antipode().value == golden - ExactReal(1, 0, 2)
    assert CirclePoint(ExactReal(5)).value == 0


@given(surds(5))
def test_circle_point_in_range(x):
    p = CirclePoint(x)
    assert ExactReal(0) <= p.value
    assert p.value < ExactReal(1)


def test_in_first_half_boundaries():
    assert CirclePoint(ExactReal(0)).in_first_half
    assert not CirclePoint(ExactReal(1, 0, 2)).in_first_half
    assert not CirclePoint(ExactReal(99, 0, 100)).in_first_half
