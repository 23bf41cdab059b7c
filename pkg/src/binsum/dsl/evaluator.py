"""Exact evaluation of expressions.

``evaluate`` is a direct tree walk and serves as the reference semantics.
``compile_expr`` turns an expression into Python source for the sweep hot
path; both must agree on every input (tests check this on the catalog).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .. import binom as B
from .. import seqcore
from ..seqcore import HoradamParams, SeqCache
from . import ast as A
from .formatter import format_expr


class EvalError(Exception):
    """Base class; ``kind`` is a short stable tag used in reports."""

    kind = "evaluation-error"

    def __init__(self, message: str, expr: Optional[A.Expr] = None):
        self.message = message
        self.expr = expr
        where = f" in {format_expr(expr)}" if expr is not None else ""
        super().__init__(message + where)


class UnboundVariable(EvalError):
    kind = "unbound-variable"


class DivisionByZero(EvalError):
    kind = "division-by-zero"


class NonIntegerValue(EvalError):
    """A sum bound, exponent, index, binomial lower argument or factorial
    argument that is not an integer."""

    kind = "non-integer"


class NegativeFactorial(EvalError):
    kind = "negative-factorial"


class ZeroToNegativePower(EvalError):
    kind = "zero-to-negative-power"


HORADAM_NAMES = ("a", "b", "p", "q")


@dataclass(frozen=True)
class ParamAssignment:
    """Bindings for one evaluation: integers, rationals and Horadam seeds."""

    ints: dict = field(default_factory=dict)
    rats: dict = field(default_factory=dict)
    horadam: Optional[HoradamParams] = None

    def __post_init__(self):
        clash = set(self.ints) & set(self.rats)
        if clash:
            raise ValueError(f"bound twice: {sorted(clash)}")
        for k, v in self.ints.items():
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError(f"integer binding {k}={v!r} is not an int")

    def names(self) -> set:
        out = set(self.ints) | set(self.rats)
        if self.horadam is not None:
            out |= set(HORADAM_NAMES)
        return out

    def get(self, name: str):
        if name in self.ints:
            return self.ints[name]
        if name in self.rats:
            return Fraction(self.rats[name])
        return None

    def env(self) -> dict:
        """Flat name -> exact value map; Horadam fields fill unbound names."""
        out = {}
        if self.horadam is not None:
            for name, v in zip(HORADAM_NAMES, self.horadam.as_tuple()):
                out[name] = seqcore._lower(v)
        for k, v in self.rats.items():
            out[k] = seqcore._lower(Fraction(v))
        out.update(self.ints)
        return out

    def with_value(self, name: str, value) -> "ParamAssignment":
        if name == "horadam":
            return ParamAssignment(dict(self.ints), dict(self.rats), value)
        if name in self.ints:
            ints = dict(self.ints)
            ints[name] = value
            return ParamAssignment(ints, dict(self.rats), self.horadam)
        rats = dict(self.rats)
        rats[name] = value
        return ParamAssignment(dict(self.ints), rats, self.horadam)


class EvalContext:
    """Owns the sequence caches for one worker; not shared across threads."""

    def __init__(self):
        self.cache = SeqCache()

    def seq(self, key: tuple, j: int):
        return self.cache.get(key, j)


def _lower(x):
    if type(x) is int:
        return x
    return x.numerator if x.denominator == 1 else x


def _seq_keys(h: Optional[HoradamParams]):
    if h is None:
        return None
    a, b, p, q = (seqcore._lower(v) for v in h.as_tuple())
    return (0, 1, p, q), (2, p, p, q), (a, b, p, q)


# --- reference tree walk -------------------------------------------------


def evaluate(e: A.Expr, env: ParamAssignment, ctx: Optional[EvalContext] = None):
    """Exact value of ``e`` under ``env`` as a Fraction."""
    ctx = ctx or EvalContext()
    values = env.env()
    for name in sorted(A.free_vars(e)):
        if name not in values:
            raise UnboundVariable(f"unbound variable {name!r}", A.Var(name))
    keys = _seq_keys(env.horadam)
    return Fraction(_walk(e, values, keys, ctx))


def _need_int(v, node, what):
    v = _lower(v)
    if type(v) is not int:
        raise NonIntegerValue(f"{what} must be an integer, got {v}", node)
    return v


def _walk(e, values, keys, ctx):
    t = type(e)
    if t is A.IntLit:
        return e.value
    if t is A.RatLit:
        if e.den == 0:
            raise DivisionByZero("rational literal with zero denominator", e)
        return _lower(Fraction(e.num, e.den))
    if t is A.Var:
        try:
            return values[e.name]
        except KeyError:
            raise UnboundVariable(f"unbound variable {e.name!r}", e) from None
    if t is A.Neg:
        return -_walk(e.operand, values, keys, ctx)
    if t is A.Add:
        return _walk(e.left, values, keys, ctx) + _walk(e.right, values, keys, ctx)
    if t is A.Sub:
        return _walk(e.left, values, keys, ctx) - _walk(e.right, values, keys, ctx)
    if t is A.Mul:
        return _walk(e.left, values, keys, ctx) * _walk(e.right, values, keys, ctx)
    if t is A.Div:
        num = _walk(e.left, values, keys, ctx)
        den = _walk(e.right, values, keys, ctx)
        if den == 0:
            raise DivisionByZero("division by zero", e)
        return _lower(Fraction(num) / den)
    if t is A.Pow:
        base = _walk(e.base, values, keys, ctx)
        exp = _need_int(_walk(e.exp, values, keys, ctx), e, "exponent")
        if exp < 0:
            if base == 0:
                raise ZeroToNegativePower("0 raised to a negative power", e)
            return _lower(Fraction(base) ** exp)
        return _lower(base ** exp) if type(base) is not int else base ** exp
    if t is A.Binom:
        upper = _lower(_walk(e.upper, values, keys, ctx))
        lower = _need_int(_walk(e.lower, values, keys, ctx), e, "binomial lower argument")
        if type(upper) is int:
            return B.binom_int(upper, lower)
        return _lower(B.binom_rat(upper, lower))
    if t is A.Factorial:
        v = _need_int(_walk(e.arg, values, keys, ctx), e, "factorial argument")
        if v < 0:
            raise NegativeFactorial(f"factorial of negative integer {v}", e)
        return B.factorial(v)
    if t is A.Sum:
        lo = _need_int(_walk(e.lo, values, keys, ctx), e, "lower summation bound")
        hi = _need_int(_walk(e.hi, values, keys, ctx), e, "upper summation bound")
        saved = values.get(e.var, _MISSING)
        total = 0
        try:
            for i in range(lo, hi + 1):
                values[e.var] = i
                total += _walk(e.body, values, keys, ctx)
        finally:
            if saved is _MISSING:
                values.pop(e.var, None)
            else:
                values[e.var] = saved
        return _lower(total) if type(total) is not int else total
    if t is A.Floor or t is A.Ceil:
        v = _walk(e.arg, values, keys, ctx)
        return math.floor(v) if t is A.Floor else math.ceil(v)
    if t is A.Fib or t is A.Luc:
        j = _need_int(_walk(e.arg, values, keys, ctx), e, "sequence index")
        return seqcore.fib(j) if t is A.Fib else seqcore.lucas_num(j)
    if t is A.U or t is A.V or t is A.W:
        j = _need_int(_walk(e.arg, values, keys, ctx), e, "sequence index")
        if keys is None:
            raise UnboundVariable("U/V/W need Horadam parameters", e)
        key = keys[0] if t is A.U else keys[1] if t is A.V else keys[2]
        return ctx.seq(key, j)
    raise TypeError(f"cannot evaluate {e!r}")


_MISSING = object()


# --- compilation -----------------------------------------------------------
#
# The generated function takes (env_values, seq_u, seq_v, seq_w) and returns
# the exact value. Sums are hoisted into loops; each summation variable gets
# a fresh local so shadowing behaves like the tree walk.


# Inside generated code a rational is an unreduced pair (num, den) with
# den > 0; plain ints stay ints. Reduction happens once, on return. This
# avoids the per-operation gcd and allocation cost of Fraction.


def _in(v):
    if type(v) is int:
        return v
    if v.denominator == 1:
        return v.numerator
    return (v.numerator, v.denominator)


def _out(v):
    if type(v) is int:
        return v
    n, d = v
    g = math.gcd(n, d)
    if g == d:
        return n // d
    return Fraction(n // g, d // g, _normalize=False)


def _add(x, y):
    if type(x) is int:
        if type(y) is int:
            return x + y
        return (x * y[1] + y[0], y[1])
    if type(y) is int:
        return (x[0] + y * x[1], x[1])
    xd, yd = x[1], y[1]
    if xd == yd:
        return (x[0] + y[0], xd)
    # sums over k often have nested denominators; keep the larger one
    if xd > yd and xd % yd == 0:
        return (x[0] + y[0] * (xd // yd), xd)
    if yd > xd and yd % xd == 0:
        return (x[0] * (yd // xd) + y[0], yd)
    return (x[0] * yd + y[0] * xd, xd * yd)


def _sub(x, y):
    if type(x) is int:
        if type(y) is int:
            return x - y
        return (x * y[1] - y[0], y[1])
    if type(y) is int:
        return (x[0] - y * x[1], x[1])
    xd, yd = x[1], y[1]
    if xd == yd:
        return (x[0] - y[0], xd)
    # sums over k often have nested denominators; keep the larger one
    if xd > yd and xd % yd == 0:
        return (x[0] - y[0] * (xd // yd), xd)
    if yd > xd and yd % xd == 0:
        return (x[0] * (yd // xd) - y[0], yd)
    return (x[0] * yd - y[0] * xd, xd * yd)


def _mul(x, y):
    if type(x) is int:
        if type(y) is int:
            return x * y
        return (x * y[0], y[1])
    if type(y) is int:
        return (x[0] * y, x[1])
    return (x[0] * y[0], x[1] * y[1])


def _neg(x):
    if type(x) is int:
        return -x
    return (-x[0], x[1])


def _pair_is_zero(x):
    return x == 0 if type(x) is int else x[0] == 0


def _floor_p(v):
    if type(v) is int:
        return v
    return v[0] // v[1]


def _ceil_p(v):
    if type(v) is int:
        return v
    return -((-v[0]) // v[1])


class _Helpers:
    """Runtime helpers referenced by generated code; ``nodes`` maps the
    integer ids baked into the source back to AST nodes for diagnostics."""

    def __init__(self, nodes):
        self.nodes = nodes

    def toint(self, v, nid, what):
        if type(v) is int:
            return v
        if type(v) is tuple:
            n, d = v
            if n % d == 0:
                return n // d
            v = Fraction(n, d)
        elif v.denominator == 1:
            return v.numerator
        raise NonIntegerValue(f"{what} must be an integer, got {v}", self.nodes[nid])

    def div(self, a, b, nid):
        if type(b) is int:
            if b == 0:
                raise DivisionByZero("division by zero", self.nodes[nid])
            if type(a) is int:
                if a % b == 0:
                    return a // b
                return (a, b) if b > 0 else (-a, -b)
            return (a[0], a[1] * b) if b > 0 else (-a[0], -a[1] * b)
        bn, bd = b
        if bn == 0:
            raise DivisionByZero("division by zero", self.nodes[nid])
        if type(a) is int:
            n, d = a * bd, bn
        else:
            n, d = a[0] * bd, a[1] * bn
        return (n, d) if d > 0 else (-n, -d)

    def pow(self, base, exp, nid):
        if type(exp) is not int:
            exp = self.toint(exp, nid, "exponent")
        if exp >= 0:
            if type(base) is int:
                return base ** exp
            return (base[0] ** exp, base[1] ** exp)
        if _pair_is_zero(base):
            raise ZeroToNegativePower("0 raised to a negative power", self.nodes[nid])
        e = -exp
        if type(base) is int:
            if base == 1:
                return 1
            return (1, base ** e) if base > 0 else ((-1) ** e, (-base) ** e)
        n, d = base
        return (d ** e, n ** e) if n > 0 else ((-d) ** e, (-n) ** e)

    def binom(self, upper, lower, nid):
        key = (upper, lower)
        if type(lower) is not int:
            lower = self.toint(lower, nid, "binomial lower argument")
        if type(upper) is int:
            v = B.binom_int(upper, lower)
        else:
            v = _in(B.binom_rat(Fraction(*upper), lower))
        # generated code looks the raw argument pair up inline
        if len(_BINOM_CACHE) < 400_000:
            _BINOM_CACHE[key] = v
        return v

    def fact(self, v, nid):
        if type(v) is not int:
            v = self.toint(v, nid, "factorial argument")
        if v < 0:
            raise NegativeFactorial(f"factorial of negative integer {v}", self.nodes[nid])
        return B.factorial(v)


_BINOM_CACHE: dict = {}


_FIB_R = 1024
_FIB_TAB = [seqcore.fib(j) for j in range(-_FIB_R, _FIB_R + 1)]
_LUC_TAB = [seqcore.lucas_num(j) for j in range(-_FIB_R, _FIB_R + 1)]


def _fib(j):
    if -_FIB_R <= j <= _FIB_R:
        return _FIB_TAB[j + _FIB_R]
    return seqcore.fib(j)


def _luc(j):
    if -_FIB_R <= j <= _FIB_R:
        return _LUC_TAB[j + _FIB_R]
    return seqcore.lucas_num(j)


_MEMO_CAP = 50_000


def _remember(memo: dict, key, vec):
    if len(memo) >= _MEMO_CAP:
        memo.clear()
    memo[key] = vec


def _flat_product(e: A.Expr) -> list:
    """A Mul/Div chain as [(factor, is_denominator)] in source order."""
    if type(e) is A.Mul:
        return _flat_product(e.left) + _flat_product(e.right)
    if type(e) is A.Div:
        return _flat_product(e.left) + [(e.right, True)]
    return [(e, False)]


def _rebuild(factors: list) -> A.Expr:
    if len(factors) == 1 and not factors[0][1]:
        return factors[0][0]
    if factors[0][1]:
        out, rest = A.IntLit(1), factors
    else:
        out, rest = factors[0][0], factors[1:]
    for f, den in rest:
        out = A.Div(out, f) if den else A.Mul(out, f)
    return out


def _size(e: A.Expr) -> int:
    return sum(1 for _ in e.walk())


def _split_factors(e: A.Sum, scope: dict):
    """Pick the body factors that do not depend on some variable ``v``.

    Their product, as a vector over the summation range, is reusable for
    every value of ``v``; the remaining factors are evaluated per case.
    Returns (cached, rest, key variable names) or None when no split
    leaves work on both sides.
    """
    factors = _flat_product(e.body)
    if len(factors) < 2:
        return None
    deps = []
    for f, _ in factors:
        d = A.free_vars(f) - {e.var}
        if A.uses_horadam(f):
            d.add("@h")
        deps.append(d)
    names = set().union(*deps)
    if any(n != "@h" and n not in scope for n in names):
        return None
    bounds = A.free_vars(e.lo) | A.free_vars(e.hi)
    best = None
    for v in sorted(names):
        if v in bounds:
            continue
        cached = [i for i, d in enumerate(deps) if v not in d]
        if not cached or len(cached) == len(factors):
            continue
        score = sum(_size(factors[i][0]) for i in cached)
        if best is None or score > best[0]:
            best = (score, cached)
    if best is None:
        return None
    cached = best[1]
    keyvars = sorted((set().union(*(deps[i] for i in cached)) | bounds) - {"@h"})
    return ([factors[i] for i in cached],
            [f for i, f in enumerate(factors) if i not in cached], keyvars)


class _Gen:
    def __init__(self, int_locals=()):
        self.nodes: list = []
        self.counter = 0
        # locals statically known to hold Python ints
        self.int_locals = set(int_locals)
        self.memos: list = []

    def nid(self, node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def fresh(self, stem: str) -> str:
        self.counter += 1
        return f"_{stem}{self.counter}"

    def is_int(self, e: A.Expr, scope: dict) -> bool:
        t = type(e)
        if t is A.IntLit:
            return True
        if t is A.Var:
            return scope.get(e.name) in self.int_locals
        if t is A.Neg:
            return self.is_int(e.operand, scope)
        if t in (A.Add, A.Sub, A.Mul):
            return self.is_int(e.left, scope) and self.is_int(e.right, scope)
        if t in (A.Fib, A.Luc, A.Factorial, A.Floor, A.Ceil):
            return True
        if t is A.Binom:
            return self.is_int(e.upper, scope)
        if t is A.Pow:
            return (isinstance(e.base, A.Neg) and e.base.operand == A.IntLit(1)) or (
                self.is_int(e.base, scope) and type(e.exp) is A.IntLit and e.exp.value >= 0)
        return False

    def fast2(self, t, left: str, right: str) -> str:
        """Binary op with an inline int-int path; both operands are bound
        to temporaries first so evaluation order stays left to right."""
        op = {A.Add: "+", A.Sub: "-", A.Mul: "*"}[t]
        fn = {A.Add: "_add", A.Sub: "_sub", A.Mul: "_mul"}[t]
        a, b = self.fresh("t"), self.fresh("t")
        return (f"({a} {op} {b} if (type({a} := {left}) is int)"
                f" & (type({b} := {right}) is int) else {fn}({a}, {b}))")

    def sum(self, e: A.Sum, stmts: list, scope: dict) -> str:
        lo, hi = self.fresh("lo"), self.fresh("hi")
        stmts.append(f"{lo} = " + self.intval(self.expr(e.lo, stmts, scope), e,
                                              "lower summation bound", e.lo, scope))
        stmts.append(f"{hi} = " + self.intval(self.expr(e.hi, stmts, scope), e,
                                              "upper summation bound", e.hi, scope))
        plain = self.sum_loop(e, lo, hi, scope, _flat_product(e.body), None)
        split = _split_factors(e, scope)
        if split is None:
            stmts.extend(plain[0])
            return plain[1]
        cached, rest, keyvars = split
        memo = self.fresh("memo")
        self.memos.append(memo)
        key, vec, var, cvar = self.fresh("key"), self.fresh("vec"), self.fresh("k"), self.fresh("c")
        self.int_locals.add(var)
        inner_scope = dict(scope)
        inner_scope[e.var] = var
        body: list = []
        cval = self.expr(_rebuild(cached), body, inner_scope)
        keyparts = [scope[n] for n in keyvars] + [lo, hi]
        if any(A.uses_horadam(f) for f, _ in cached):
            keyparts.append("_sw.key")
        out = ["try:",
               f"    {key} = ({', '.join(keyparts)},)",
               f"    {vec} = {memo}.get({key})",
               f"    if {vec} is None:",
               f"        {vec} = []",
               f"        for {var} in range({lo}, {hi} + 1):"]
        out += ["            " + x for x in body]
        out += [f"            {vec}.append({cval})",
                f"        _remember({memo}, {key}, {vec})"]
        loop, acc = self.sum_loop(e, lo, hi, scope, rest, (cvar, vec))
        out += ["    " + x for x in loop]
        out.append("except EvalError:")
        # the split path reorders factors; on any error redo the sum in
        # source order so the reported error is the tree walk's
        out += ["    " + x for x in plain[0]]
        out.append(f"    {acc} = {plain[1]}")
        stmts.extend(out)
        return acc

    def sum_loop(self, e: A.Sum, lo: str, hi: str, scope: dict, factors, pre):
        acc = self.fresh("acc")
        var = self.fresh("k")
        self.int_locals.add(var)
        inner_scope = dict(scope)
        inner_scope[e.var] = var
        body_stmts: list = []
        body_e = _rebuild(factors)
        body = self.expr(body_e, body_stmts, inner_scope)
        is_int = self.is_int(body_e, inner_scope)
        lines = [f"{acc} = 0"]
        if pre is None:
            lines.append(f"for {var} in range({lo}, {hi} + 1):")
        else:
            cvar, vec = pre
            lines.append(f"for {var}, {cvar} in zip(range({lo}, {hi} + 1), {vec}):")
            body = self.fast2(A.Mul, cvar, body)
            is_int = False
        lines += ["    " + x for x in body_stmts]
        if is_int:
            lines.append(f"    {acc} += {body}")
        else:
            b = self.fresh("t")
            lines.append(f"    {acc} = ({acc} + {b} if (type({acc}) is int)"
                         f" & (type({b} := {body}) is int) else _add({acc}, {b}))")
        return lines, acc

    def intval(self, src: str, node, what: str, e=None, scope=None) -> str:
        if e is not None and self.is_int(e, scope):
            return src
        return f"_toint({src}, {self.nid(node)}, {what!r})"

    def index(self, e, stmts, scope, node):
        src = self.expr(e, stmts, scope)
        return self.intval(src, node, "sequence index", e, scope)

    def expr(self, e: A.Expr, stmts: list, scope: dict) -> str:
        t = type(e)
        if t is A.IntLit:
            return f"({e.value})"
        if t is A.RatLit:
            return f"_rat({e.num}, {e.den}, {self.nid(e)})"
        if t is A.Var:
            return scope.get(e.name) or f"_unbound({e.name!r})"
        if t is A.Neg:
            inner = self.expr(e.operand, stmts, scope)
            if self.is_int(e.operand, scope):
                return f"(-{inner})"
            return f"_neg({inner})"
        if t in (A.Add, A.Sub, A.Mul):
            left = self.expr(e.left, stmts, scope)
            right = self.expr(e.right, stmts, scope)
            if self.is_int(e.left, scope) and self.is_int(e.right, scope):
                op = {A.Add: "+", A.Sub: "-", A.Mul: "*"}[t]
                return f"({left} {op} {right})"
            return self.fast2(t, left, right)
        if t is A.Div:
            return (f"_div({self.expr(e.left, stmts, scope)}, "
                    f"{self.expr(e.right, stmts, scope)}, {self.nid(e)})")
        if t is A.Pow:
            base = e.base
            exp = self.expr(e.exp, stmts, scope)
            if isinstance(base, A.Neg) and base.operand == A.IntLit(1):
                k = self.intval(exp, e, "exponent", e.exp, scope)
                return f"(-1 if ({k}) & 1 else 1)"
            b, x = self.fresh("t"), self.fresh("t")
            # int base and non-negative int exponent inline; the rest in _pow
            return (f"({b} ** {x} if (type({b} := {self.expr(base, stmts, scope)}) is int)"
                    f" & (type({x} := {exp}) is int) and {x} >= 0"
                    f" else _pow({b}, {x}, {self.nid(e)}))")
        if t is A.Binom:
            key = self.fresh("t")
            return (f"(_bc[{key}] if ({key} := ({self.expr(e.upper, stmts, scope)}, "
                    f"{self.expr(e.lower, stmts, scope)})) in _bc"
                    f" else _binom(*{key}, {self.nid(e)}))")
        if t is A.Factorial:
            return f"_fact({self.expr(e.arg, stmts, scope)}, {self.nid(e)})"
        if t is A.Floor:
            return f"_floor({self.expr(e.arg, stmts, scope)})"
        if t is A.Ceil:
            return f"_ceil({self.expr(e.arg, stmts, scope)})"
        if t is A.Fib or t is A.Luc:
            tab, fn = ("_ft", "_fib") if t is A.Fib else ("_lt", "_luc")
            j = self.fresh("t")
            return (f"({tab}[{j} + {_FIB_R}] if -{_FIB_R} <= ({j} := "
                    f"{self.index(e.arg, stmts, scope, e)}) <= {_FIB_R} else {fn}({j}))")
        if t in (A.U, A.V, A.W):
            name = {A.U: "u", A.V: "v", A.W: "w"}[t]
            j = self.fresh("t")
            # windows hold pre-converted values; outside them call through
            return (f"(_tab_{name}[{j} + _rad_{name}] if -_rad_{name} <= ({j} := "
                    f"{self.index(e.arg, stmts, scope, e)}) <= _rad_{name} else _in(_s{name}({j})))")
        if t is A.Sum:
            return self.sum(e, stmts, scope)
        raise TypeError(f"cannot compile {e!r}")


def compile_expr(e: A.Expr, int_names=()) -> Callable:
    """Return ``fn(values, su, sv, sw)`` computing ``e`` exactly.

    ``values`` is the flat env dict; ``su/sv/sw`` map an index to U/V/W.
    Names in ``int_names`` are promised to be bound to Python ints, which
    lets the generated code skip integrality checks on them.
    """
    fv = sorted(A.free_vars(e))
    ints = set(int_names)
    gen = _Gen(f"v_{name}" for name in fv if name in ints)
    stmts: list = []
    result = gen.expr(e, stmts, {name: f"v_{name}" for name in fv})
    lines = ["def _compiled(_env, _su, _sv, _sw):"]
    used = {type(n) for n in e.walk()}
    for name, cls in (("u", A.U), ("v", A.V), ("w", A.W)):
        if cls in used:
            lines.append(f"    _tab_{name} = _s{name}.table")
            lines.append(f"    _rad_{name} = _s{name}.radius")
    # free variables become locals read once from the env dict
    for name in fv:
        read = f"_env[{name!r}] if {name!r} in _env else _unbound({name!r})"
        if name not in ints:
            read = f"_in({read})"
        lines.append(f"    v_{name} = {read}")
    lines += ["    " + s for s in stmts]
    lines.append(f"    return _out({result})")
    src = "\n".join(lines)
    helpers = _Helpers(gen.nodes)

    def _unbound(name):
        raise UnboundVariable(f"unbound variable {name!r}", A.Var(name))

    def _rat(num, den, nid):
        if den == 0:
            raise DivisionByZero("rational literal with zero denominator", gen.nodes[nid])
        return _in(Fraction(num, den))

    ns = {
        "_toint": helpers.toint,
        "_div": helpers.div,
        "_pow": helpers.pow,
        "_binom": helpers.binom,
        "_fact": helpers.fact,
        "_floor": _floor_p,
        "_ceil": _ceil_p,
        "_add": _add,
        "_sub": _sub,
        "_mul": _mul,
        "_neg": _neg,
        "_in": _in,
        "_out": _out,
        "_bc": _BINOM_CACHE,
        "_remember": _remember,
        "EvalError": EvalError,
        "_ft": _FIB_TAB,
        "_lt": _LUC_TAB,
        "_fib": _fib,
        "_luc": _luc,
        "_rat": _rat,
        "_unbound": _unbound,
    }
    for memo in gen.memos:
        ns[memo] = {}
    exec(compile(src, "<binsum-expr>", "exec"), ns)
    fn = ns["_compiled"]
    fn.source = src
    return fn


class CompiledExpr:
    """A compiled expression bound to nothing; call with an assignment."""

    def __init__(self, e: A.Expr, int_names=()):
        self.expr = e
        self.int_names = frozenset(int_names)
        self.fn = compile_expr(e, self.int_names)
        self.uses_horadam = A.uses_horadam(e)

    def __call__(self, env: ParamAssignment, ctx: EvalContext):
        values = env.env()
        su, sv, sw = seq_functions(env.horadam, ctx, self.expr)
        return self.fn(values, su, sv, sw)


def _no_horadam(node):
    def f(j):
        raise UnboundVariable("U/V/W need Horadam parameters", node)

    # an empty window: every index falls through to f
    f.table, f.radius, f.key = (), -1, None
    return f


def seq_functions(h: Optional[HoradamParams], ctx: EvalContext, node=None):
    """(U, V, W) lookups for ``h``; each also exposes ``table``/``radius``,
    a window of pre-converted values used inline by compiled code."""
    keys = _seq_keys(h)
    if keys is None:
        f = _no_horadam(node)
        return f, f, f
    return tuple(_seq_lookup(ctx.cache, k) for k in keys)


_SEQ_R = 64


def _seq_lookup(cache: SeqCache, key: tuple):
    get = cache.get

    def f(j):
        return get(key, j)

    f.key = key
    f.table = [_in(v) for v in cache.window(key, _SEQ_R)]
    f.radius = _SEQ_R
    return f
