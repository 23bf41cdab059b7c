"""Canonical text for expressions, with the parentheses the grammar needs."""

from __future__ import annotations

from . import ast as A

ADD, MUL, UNARY, POW, POSTFIX, ATOM = range(1, 7)


def _prec(e: A.Expr) -> int:
    if isinstance(e, (A.Add, A.Sub)):
        return ADD
    if isinstance(e, (A.Mul, A.Div)):
        return MUL
    if isinstance(e, A.RatLit):
        return MUL
    if isinstance(e, A.Neg):
        return UNARY
    if isinstance(e, A.IntLit) and e.value < 0:
        return UNARY
    if isinstance(e, A.Pow):
        return POW
    if isinstance(e, A.Factorial):
        return POSTFIX
    return ATOM


def _wrap(e: A.Expr, need: int) -> str:
    s = format_expr(e)
    return f"({s})" if _prec(e) < need else s


def _operand(e: A.Expr, need: int) -> str:
    # a negation on the right of an operator is always parenthesized: a*(-b)
    if _prec(e) == UNARY:
        return f"({format_expr(e)})"
    return _wrap(e, need)


def format_expr(e: A.Expr) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.RatLit):
        return f"{e.num}/{e.den}"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Neg):
        inner = e.operand
        if _prec(inner) == UNARY:
            return f"-({format_expr(inner)})"
        return "-" + _wrap(inner, UNARY)
    if isinstance(e, (A.Add, A.Sub)):
        op = "+" if isinstance(e, A.Add) else "-"
        return _wrap(e.left, ADD) + op + _operand(e.right, MUL)
    if isinstance(e, (A.Mul, A.Div)):
        op = "*" if isinstance(e, A.Mul) else "/"
        return _wrap(e.left, MUL) + op + _operand(e.right, POW)
    if isinstance(e, A.Pow):
        return _wrap(e.base, POSTFIX) + "^" + _operand(e.exp, POW)
    if isinstance(e, A.Factorial):
        return _wrap(e.arg, ATOM) + "!"
    if isinstance(e, A.Binom):
        return f"binom({format_expr(e.upper)},{format_expr(e.lower)})"
    if isinstance(e, A.Sum):
        return (f"sum({e.var}={format_expr(e.lo)}..{format_expr(e.hi)}, "
                f"{format_expr(e.body)})")
    if isinstance(e, A.Call):
        return f"{A.CALL_NAMES[type(e)]}({format_expr(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")
