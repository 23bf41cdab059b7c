"""Exact Horadam / Lucas / Fibonacci kernels at arbitrary signed indices.

Every value is an exact rational (``fractions.Fraction``), never a float.
``fib`` and ``lucas_num`` return plain ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

RatLike = Union[int, Fraction]

# |j| at or below this uses the plain recurrence; above it, fast doubling.
NAIVE_LIMIT = 64


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


def _lower(x: Fraction) -> RatLike:
    # Integral fractions become ints so the hot loops stay in int arithmetic.
    return x.numerator if x.denominator == 1 else x


def _div(a: RatLike, b: RatLike) -> RatLike:
    if isinstance(a, int) and isinstance(b, int):
        if a % b == 0:
            return a // b
        return Fraction(a, b)
    return _lower(Fraction(a) / b)


@dataclass(frozen=True)
class HoradamParams:
    """Seeds ``W_0 = a``, ``W_1 = b`` and recurrence ``W_j = p W_{j-1} - q W_{j-2}``."""

    a: Fraction
    b: Fraction
    p: Fraction
    q: Fraction

    def __post_init__(self):
        for name in ("a", "b", "p", "q"):
            object.__setattr__(self, name, as_rat(getattr(self, name)))
        if self.p == 0 or self.q == 0:
            raise ValueError("Horadam parameters need p != 0 and q != 0")

    @classmethod
    def parse(cls, text: str) -> "HoradamParams":
        parts = [s for s in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected a,b,p,q but got {text!r}")
        return cls(*(Fraction(s) for s in parts))

    def delta(self) -> Fraction:
        return self.p * self.p - 4 * self.q

    def as_tuple(self) -> tuple:
        return (self.a, self.b, self.p, self.q)

    def __str__(self):
        return ",".join(str(v) for v in self.as_tuple())


FIBONACCI = HoradamParams(0, 1, 1, -1)
LUCAS = HoradamParams(2, 1, 1, -1)


def delta(params: HoradamParams) -> Fraction:
    return params.delta()


def _naive(a, b, p, q, j: int) -> RatLike:
    if j >= 0:
        prev, cur = a, b
        if j == 0:
            return a
        for _ in range(j - 1):
            prev, cur = cur, p * cur - q * prev
        return cur
    # walk backwards: W_{i-1} = (p W_i - W_{i+1}) / q
    nxt, cur = b, a
    for _ in range(-j):
        nxt, cur = cur, _div(p * cur - nxt, q)
    return cur


def _u_pair(p, q, n: int):
    """Return (U_n, U_{n+1}) for n >= 0 by fast doubling."""
    u, u1 = 0, 1
    for bit in bin(n)[2:]:
        # (U_k, U_{k+1}) -> (U_{2k}, U_{2k+1})
        u, u1 = u * (2 * u1 - p * u), u1 * u1 - q * u * u
        if bit == "1":
            u, u1 = u1, p * u1 - q * u
    return u, u1


def _fast(a, b, p, q, j: int) -> RatLike:
    # W_j = (b - a p) U_j + a U_{j+1}
    if j >= 0:
        u, u1 = _u_pair(p, q, j)
        return (b - a * p) * u + a * u1
    n = -j
    # U_{-i} = -U_i / q^i
    u_prev, u_n = _u_pair(p, q, n - 1)
    qn1 = q ** (n - 1)
    u_neg = _div(-u_n, qn1 * q)
    u_neg1 = _div(-u_prev, qn1)
    return (b - a * p) * u_neg + a * u_neg1


def _lowered(params: HoradamParams):
    return tuple(_lower(v) for v in params.as_tuple())


def horadam_naive(params: HoradamParams, j: int) -> Fraction:
    return Fraction(_naive(*_lowered(params), j))


def horadam_fast(params: HoradamParams, j: int) -> Fraction:
    return Fraction(_fast(*_lowered(params), j))


def horadam(params: HoradamParams, j: int) -> Fraction:
    """W_j for any signed integer j."""
    if abs(j) <= NAIVE_LIMIT:
        return horadam_naive(params, j)
    return horadam_fast(params, j)


def lucas_u(p, q, j: int) -> Fraction:
    return horadam(HoradamParams(0, 1, p, q), j)


def lucas_v(p, q, j: int) -> Fraction:
    return horadam(HoradamParams(2, p, p, q), j)


def _fib_pair(n: int):
    """(F_n, F_{n+1}) for n >= 0, pure int fast doubling."""
    f, f1 = 0, 1
    for bit in bin(n)[2:]:
        f, f1 = f * (2 * f1 - f), f1 * f1 + f * f
        if bit == "1":
            f, f1 = f1, f + f1
    return f, f1


def fib(j: int) -> int:
    if j < 0:
        v = fib(-j)
        return v if j % 2 else -v
    return _fib_pair(j)[0]


def lucas_num(j: int) -> int:
    if j < 0:
        v = lucas_num(-j)
        return -v if j % 2 else v
    f, f1 = _fib_pair(j)
    return 2 * f1 - f


def fib_iterative(j: int) -> int:
    return int(_naive(0, 1, 1, -1, j))


class SeqCache:
    """Per-evaluation-context store of sequence values.

    Values are kept per parameter tuple as two growing lists (j >= 0 and
    j < 0). Not shared between threads: each worker makes its own.
    """

    def __init__(self, limit: int = 4096):
        self.limit = limit
        self._tables: dict = {}

    def get(self, key: tuple, j: int) -> RatLike:
        """``key`` is a lowered (a, b, p, q) tuple."""
        tab = self._tables.get(key)
        if tab is None:
            a, b, p, q = key
            tab = self._tables[key] = ([a, b], [a, _div(p * a - b, q)])
        if abs(j) > self.limit:
            return _fast(*key, j)
        if j >= 0:
            pos = tab[0]
            if j < len(pos):
                return pos[j]
            p, q = key[2], key[3]
            while len(pos) <= j:
                pos.append(p * pos[-1] - q * pos[-2])
            return pos[j]
        # neg[i] holds W_{-i}; neg[0] = W_0
        neg = tab[1]
        i = -j
        if i < len(neg):
            return neg[i]
        p, q = key[2], key[3]
        while len(neg) <= i:
            neg.append(_div(p * neg[-1] - neg[-2], q))
        return neg[i]

    def window(self, key: tuple, radius: int) -> list:
        """[W_{-radius}, ..., W_radius] as one list, built once per key."""
        wins = self.__dict__.setdefault("_windows", {})
        w = wins.get((key, radius))
        if w is None:
            w = wins[(key, radius)] = [self.get(key, j) for j in range(-radius, radius + 1)]
        return w
