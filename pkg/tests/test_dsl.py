from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binsum import catalog
from binsum.dsl import (
    DivisionByZero,
    EvalContext,
    NegativeFactorial,
    NonIntegerValue,
    ParamAssignment,
    ParseError,
    UnboundVariable,
    ZeroToNegativePower,
    ast as A,
    compile_expr,
    evaluate,
    format_expr,
    parse,
)
from binsum.dsl.evaluator import seq_functions
from binsum.seqcore import HoradamParams

from _corpus import MALFORMED


def ev(text, h=None, **binds):
    ints = {k: v for k, v in binds.items() if isinstance(v, int)}
    rats = {k: Fraction(v) for k, v in binds.items() if not isinstance(v, int)}
    return evaluate(parse(text), ParamAssignment(ints, rats, h))


def test_parse_sum_example():
    e = parse("sum(k=0..n, (-1)^k * binom(n+k,k) * L(n+1-k))")
    assert isinstance(e, A.Sum) and e.var == "k"
    factors = []
    node = e.body
    while isinstance(node, A.Mul):
        factors.append(node.right)
        node = node.left
    factors.append(node)
    assert len(factors) == 3
    assert isinstance(factors[0], A.Luc)


def test_parse_call_example():
    assert parse("F(2*k+m)") == A.Fib(A.Add(A.Mul(A.IntLit(2), A.Var("k")), A.Var("m")))


def test_precedence():
    assert parse("-k^2") == A.Neg(A.Pow(A.Var("k"), A.IntLit(2)))
    assert parse("2^3^2") == A.Pow(A.IntLit(2), A.Pow(A.IntLit(3), A.IntLit(2)))
    assert parse("n!^2") == A.Pow(A.Factorial(A.Var("n")), A.IntLit(2))
    assert parse("a-b-c") == A.Sub(A.Sub(A.Var("a"), A.Var("b")), A.Var("c"))
    assert parse("2^-k") == A.Pow(A.IntLit(2), A.Neg(A.Var("k")))
    assert parse(" 1 +\n 2 ") == A.Add(A.IntLit(1), A.IntLit(2))


def test_format_examples():
    e = parse("sum(k=0..n, (-1)^k*binom(n+k,k)*L(n+1-k))")
    assert format_expr(e) == "sum(k=0..n, (-1)^k*binom(n+k,k)*L(n+1-k))"
    assert format_expr(A.Neg(A.Pow(A.Var("k"), A.IntLit(2)))) in ("-(k^2)", "-k^2")
    assert format_expr(A.RatLit(4, 5)) == "4/5"


def catalog_exprs():
    out = []
    for s in catalog.load_bundled():
        out += [(s.id, "lhs", s.lhs), (s.id, "rhs", s.rhs)]
        for c in s.constraints:
            out += [(s.id, "constraint", a) for a in c.args]
    return out


def test_round_trip_every_catalog_expression():
    exprs = catalog_exprs()
    assert len(exprs) > 500
    for rid, side, e in exprs:
        assert parse(format_expr(e)) == e, (rid, side)




def test_malformed_corpus_size():
    assert len(MALFORMED) >= 20


@pytest.mark.parametrize("text,line,column,fragment", MALFORMED)
def test_parse_error_positions(text, line, column, fragment):
    with pytest.raises(ParseError) as info:
        parse(text)
    err = info.value
    assert (err.line, err.column) == (line, column)
    assert fragment in err.message
    assert 0 <= err.offset <= len(text)
    caret = err.diagnostic().split("\n")[2]
    assert caret == " " * (column - 1) + "^"


def test_binom_open_offset_and_expected():
    with pytest.raises(ParseError) as info:
        parse("binom(")
    assert info.value.offset == 6
    assert "integer" in info.value.expected


def test_eval_examples():
    assert ev("sum(k=0..n, (-1)^k*binom(n+k,k)*L(n+1-k))", n=3) == 1
    assert ev("sum(k=0..n, binom(n+k,k) * 2^(-k))", n=2) == 4
    assert ev("sum(k=0..n, x)", n=-1, x=Fraction(7, 3)) == 0
    assert ev("U(4)", HoradamParams(0, 1, 3, 2)) == 15
    assert ev("W(-1)", HoradamParams(0, 1, 3, 2)) == Fraction(-1, 2)
    assert ev("binom(m, 2)", m=Fraction(1, 2)) == Fraction(-1, 8)
    assert ev("floor(n/2) + ceil(n/2)", n=7) == 7
    assert ev("(n+k)!/(k!^3*(n-2*k)!)", n=4, k=1) == 60


@pytest.mark.parametrize("text,binds,exc", [
    ("n + 1", {}, UnboundVariable),
    ("U(1)", {}, UnboundVariable),
    ("1/(n-n)", {"n": 3}, DivisionByZero),
    ("2^(1/2)", {}, NonIntegerValue),
    ("sum(k=0..n/2, k)", {"n": 3}, NonIntegerValue),
    ("binom(4, x)", {"x": Fraction(1, 2)}, NonIntegerValue),
    ("F(x)", {"x": Fraction(1, 2)}, NonIntegerValue),
    ("(n-5)!", {"n": 3}, NegativeFactorial),
    ("x!", {"x": Fraction(1, 2)}, NonIntegerValue),
    ("0^(-1)", {}, ZeroToNegativePower),
])
def test_eval_errors(text, binds, exc):
    with pytest.raises(exc):
        ev(text, **binds)
    fn = compile_expr(parse(text))
    asg = ParamAssignment({k: v for k, v in binds.items() if isinstance(v, int)},
                          {k: v for k, v in binds.items() if not isinstance(v, int)})
    with pytest.raises(exc):
        fn(asg.env(), *seq_functions(None, EvalContext()))


def test_sum_shadows_outer_binding():
    assert ev("k + sum(k=1..3, k)", k=10) == 16


def test_assignment_rejects_double_binding():
    with pytest.raises(ValueError):
        ParamAssignment({"n": 1}, {"n": Fraction(1, 2)})


# --- compiled path agrees with the tree walk ----------------------------------

names = st.sampled_from(["n", "x", "k"])


def exprs(parsed_only=False):
    # the parser never yields negative IntLit or RatLit (those come from
    # Neg and Div), so the round-trip strategy leaves them out
    leaves = [st.integers(0, 5).map(A.IntLit), names.map(A.Var)]
    if not parsed_only:
        leaves += [st.integers(-3, -1).map(A.IntLit),
                   st.tuples(st.integers(-3, 3), st.integers(1, 4)).map(lambda t: A.RatLit(*t))]
    leaf = st.one_of(*leaves)

    def grow(inner):
        return st.one_of(
            st.builds(A.Add, inner, inner),
            st.builds(A.Sub, inner, inner),
            st.builds(A.Mul, inner, inner),
            st.builds(A.Div, inner, inner),
            st.builds(A.Neg, inner),
            st.builds(A.Pow, inner, st.one_of(st.integers(0, 3).map(A.IntLit),
                                                st.integers(1, 2).map(lambda v: A.Neg(A.IntLit(v))))),
            st.builds(A.Binom, inner, st.integers(0, 4).map(A.IntLit)),
            st.builds(A.Fib, inner),
            st.builds(A.W, inner),
            st.builds(A.Floor, inner),
            st.builds(lambda hi, b: A.Sum("k", A.IntLit(0), hi, b),
                      st.integers(0, 3).map(A.IntLit), inner),
        )

    return st.recursive(leaf, grow, max_leaves=8)


def _outcome(f):
    try:
        return ("ok", Fraction(f()))
    except Exception as exc:  # compare error classes, not messages
        return ("err", type(exc).__name__)


@settings(max_examples=300, deadline=None)
@given(exprs(), st.integers(-3, 6), st.fractions(-3, 3, max_denominator=4), st.integers(-2, 4))
def test_compiled_agrees_with_tree_walk(e, n, x, k):
    asg = ParamAssignment({"n": n, "k": k}, {"x": x}, HoradamParams(1, 2, 3, -2))
    ctx = EvalContext()
    want = _outcome(lambda: evaluate(e, asg, ctx))
    for int_names in ((), ("n", "k")):
        fn = compile_expr(e, int_names)
        got = _outcome(lambda: fn(asg.env(), *seq_functions(asg.horadam, ctx)))
        assert got == want, fn.source


@settings(max_examples=100, deadline=None)
@given(exprs(parsed_only=True))
def test_round_trip_generated(e):
    assert parse(format_expr(e)) == e


@settings(max_examples=100, deadline=None)
@given(exprs(), st.integers(-2, 4), st.integers(-3, 3))
def test_sum_is_explicit_fold(body, hi, n):
    asg = ParamAssignment({"n": n}, {"x": Fraction(1, 3)}, HoradamParams(0, 1, 1, -1))
    total = _outcome(lambda: evaluate(A.Sum("k", A.IntLit(0), A.IntLit(hi), body), asg))
    parts = []
    for i in range(0, hi + 1):
        parts.append(_outcome(lambda: evaluate(
            body, ParamAssignment({"n": n, "k": i}, {"x": Fraction(1, 3)}, asg.horadam))))
    errs = [p for p in parts if p[0] == "err"]
    if errs:
        assert total == errs[0]
    else:
        assert total == ("ok", sum((p[1] for p in parts), Fraction(0)))
