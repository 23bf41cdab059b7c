"""Immutable AST nodes for the binomial-sum expression language."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterator


class Expr:
    __slots__ = ()

    def children(self) -> Iterator["Expr"]:
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Expr):
                yield v

    def walk(self) -> Iterator["Expr"]:
        yield self
        for c in self.children():
            yield from c.walk()

    def __str__(self):
        from .formatter import format_expr

        return format_expr(self)


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class RatLit(Expr):
    num: int
    den: int


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Add(BinOp):
    pass


@dataclass(frozen=True)
class Sub(BinOp):
    pass


@dataclass(frozen=True)
class Mul(BinOp):
    pass


@dataclass(frozen=True)
class Div(BinOp):
    pass


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: Expr


@dataclass(frozen=True)
class Binom(Expr):
    upper: Expr
    lower: Expr


@dataclass(frozen=True)
class Call(Expr):
    arg: Expr


@dataclass(frozen=True)
class Fib(Call):
    pass


@dataclass(frozen=True)
class Luc(Call):
    pass


@dataclass(frozen=True)
class U(Call):
    pass


@dataclass(frozen=True)
class V(Call):
    pass


@dataclass(frozen=True)
class W(Call):
    pass


@dataclass(frozen=True)
class Floor(Call):
    pass


@dataclass(frozen=True)
class Ceil(Call):
    pass


@dataclass(frozen=True)
class Factorial(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sum(Expr):
    var: str
    lo: Expr
    hi: Expr
    body: Expr


# surface name -> node class, for single-argument calls
CALLS = {
    "F": Fib,
    "L": Luc,
    "U": U,
    "V": V,
    "W": W,
    "floor": Floor,
    "ceil": Ceil,
}
CALL_NAMES = {cls: name for name, cls in CALLS.items()}
RESERVED = frozenset(CALLS) | {"binom", "sum"}


def free_vars(e: Expr, bound: frozenset = frozenset()) -> set:
    if isinstance(e, Var):
        return set() if e.name in bound else {e.name}
    if isinstance(e, Sum):
        out = free_vars(e.lo, bound) | free_vars(e.hi, bound)
        return out | free_vars(e.body, bound | {e.var})
    out: set = set()
    for c in e.children():
        out |= free_vars(c, bound)
    return out


def uses_horadam(e: Expr) -> bool:
    """True if U/V/W appear, i.e. evaluation reads (a, b, p, q)."""
    return any(isinstance(n, (U, V, W)) for n in e.walk())
