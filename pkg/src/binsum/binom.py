"""Generalized binomial coefficients over the integers and the rationals."""

from __future__ import annotations

from fractions import Fraction

_FACT = [1]
for _i in range(1, 65):
    _FACT.append(_FACT[-1] * _i)


def factorial(k: int) -> int:
    if k < 0:
        raise ValueError("factorial of a negative number")
    if k < len(_FACT):
        return _FACT[k]
    out = _FACT[-1]
    for i in range(len(_FACT), k + 1):
        out *= i
    return out


def _falling(x, k: int):
    out = 1
    for i in range(k):
        out *= x - i
    return out


def binom_int(x: int, k: int) -> int:
    """x(x-1)...(x-k+1)/k!, zero for k < 0. Works for negative x."""
    if k < 0:
        return 0
    if 0 <= x < k:
        return 0
    if x >= 0 and k > x - k:
        k = x - k
    return _falling(x, k) // factorial(k)


def binom_rat(m, k: int) -> Fraction:
    if k < 0:
        return Fraction(0)
    m = Fraction(m)
    if m.denominator == 1:
        return Fraction(binom_int(m.numerator, k))
    return Fraction(_falling(m, k)) / factorial(k)


def central_binom(n: int) -> int:
    if n < 0:
        raise ValueError("central_binom needs n >= 0")
    return binom_int(2 * n, n)


def half_binom(n: int, k: int) -> Fraction:
    """binom(n - 1/2, k) for 0 <= k <= n."""
    if n < 0 or not 0 <= k <= n:
        raise ValueError(f"half_binom needs 0 <= k <= n, got n={n}, k={k}")
    return binom_rat(Fraction(2 * n - 1, 2), k)
