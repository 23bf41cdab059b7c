"""Expression language for binomial sums over Horadam-type sequences."""

from . import ast
from .ast import Expr, free_vars
from .evaluator import (
    CompiledExpr,
    DivisionByZero,
    EvalContext,
    EvalError,
    NegativeFactorial,
    NonIntegerValue,
    ParamAssignment,
    UnboundVariable,
    ZeroToNegativePower,
    compile_expr,
    evaluate,
)
from .formatter import format_expr
from .parser import ParseError, parse, tokenize

__all__ = [
    "ast",
    "Expr",
    "free_vars",
    "CompiledExpr",
    "DivisionByZero",
    "EvalContext",
    "EvalError",
    "NegativeFactorial",
    "NonIntegerValue",
    "ParamAssignment",
    "UnboundVariable",
    "ZeroToNegativePower",
    "compile_expr",
    "evaluate",
    "format_expr",
    "ParseError",
    "parse",
    "tokenize",
]
