from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binsum.binom import binom_int, binom_rat, central_binom, factorial, half_binom


def _pascal(rows):
    tri = [[1]]
    for n in range(1, rows + 1):
        prev = tri[-1]
        tri.append([1] + [prev[i] + prev[i + 1] for i in range(n - 1)] + [1])
    return tri


PASCAL = _pascal(30)


def test_binom_int_examples():
    assert binom_int(5, 2) == 10
    assert binom_int(-3, 2) == 6
    assert binom_int(4, -1) == 0
    assert binom_int(-7, 0) == 1


def test_binom_int_matches_pascal():
    for n, row in enumerate(PASCAL):
        for k, v in enumerate(row):
            assert binom_int(n, k) == v
        assert binom_int(n, n + 1) == 0


def test_binom_rat_examples():
    assert binom_rat(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert binom_rat(7, 3) == 35
    assert binom_rat(Fraction(-5, 3), 0) == 1
    assert isinstance(binom_rat(Fraction(1, 2), 0), Fraction)
    assert binom_rat(Fraction(1, 2), -1) == 0


def test_central_binom():
    assert [central_binom(n) for n in (0, 3, 5)] == [1, 20, 252]
    with pytest.raises(ValueError):
        central_binom(-1)


def test_half_binom_examples():
    assert half_binom(2, 1) == Fraction(3, 2)
    assert half_binom(6, 0) == 1
    assert half_binom(3, 3) == Fraction(5, 16)
    with pytest.raises(ValueError):
        half_binom(2, 3)
    with pytest.raises(ValueError):
        half_binom(2, -1)


def test_factorial():
    assert [factorial(k) for k in range(6)] == [1, 1, 2, 6, 24, 120]
    assert factorial(70) == factorial(69) * 70
    with pytest.raises(ValueError):
        factorial(-1)


RATS = [Fraction(v) for v in ("-7/2", "-1", "-1/2", "0", "1/3", "1/2", "2", "5/2", "11/4")]


@pytest.mark.parametrize("m", RATS)
def test_generalized_pascal_rule(m):
    for k in range(1, 13):
        assert binom_rat(m, k) == binom_rat(m - 1, k - 1) + binom_rat(m - 1, k)


def test_symmetry():
    for n in range(21):
        for k in range(n + 1):
            assert binom_int(n, k) == binom_int(n, n - k)


def test_negative_upper_rule():
    for n in range(1, 13):
        for k in range(13):
            assert binom_int(-n, k) == (-1) ** k * binom_int(n + k - 1, k)


def test_half_integer_equivalence():
    for n in range(13):
        for k in range(n + 1):
            lhs = half_binom(n, k) * 4 ** k * central_binom(n - k)
            assert lhs == central_binom(n) * binom_int(n, k)


@settings(max_examples=100, deadline=None)
@given(st.integers(-30, 30), st.integers(-3, 15))
def test_rat_agrees_with_int(x, k):
    assert binom_rat(x, k) == binom_int(x, k)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=-10, max_value=10, max_denominator=6), st.integers(0, 10))
def test_falling_factorial_definition(m, k):
    prod = Fraction(1)
    for i in range(k):
        prod *= m - i
    assert binom_rat(m, k) == prod / factorial(k)
