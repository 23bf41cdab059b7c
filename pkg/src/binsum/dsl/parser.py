"""Lexer and precedence-climbing parser.

Precedence, loosest first::

    + -   <   * /   <   unary -   <   ^ (right assoc)   <   postfix !   <   atoms
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast as A


class ParseError(Exception):
    def __init__(self, text: str, offset: int, message: str, expected=()):
        self.text = text
        self.offset = offset
        self.message = message
        self.expected = tuple(sorted(set(expected)))
        before = text[:offset]
        self.line = before.count("\n") + 1
        self.column = offset - (before.rfind("\n") + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")

    def diagnostic(self) -> str:
        """The offending line with a caret under the error column."""
        lines = self.text.split("\n")
        src = lines[self.line - 1] if self.line - 1 < len(lines) else ""
        out = [f"parse error: {self.message} (line {self.line}, column {self.column})", src,
               " " * (self.column - 1) + "^"]
        if self.expected:
            out.append("expected: " + ", ".join(self.expected))
        return "\n".join(out)


@dataclass
class Token:
    kind: str  # 'int', 'name', 'op', 'eof'
    text: str
    offset: int


_OPS = ("..", "+", "-", "*", "/", "^", "!", "(", ")", ",", "=")


def tokenize(text: str) -> list:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], i))
            i = j
            continue
        if c.isascii() and (c.isalpha() or c == "_"):
            j = i
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("name", text[i:j], i))
            i = j
            continue
        for op in _OPS:
            if text.startswith(op, i):
                toks.append(Token("op", op, i))
                i += len(op)
                break
        else:
            raise ParseError(text, i, f"unexpected character {c!r}")
    toks.append(Token("eof", "", n))
    return toks


_EXPR_START = ("integer", "name", "'('", "'-'")


@dataclass
class _Parser:
    text: str
    toks: list = field(default_factory=list)
    pos: int = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, expected=(), tok=None):
        tok = tok or self.peek()
        raise ParseError(self.text, tok.offset, message, expected)

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == op

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            tok = self.peek()
            got = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.fail(f"expected '{op}' but found {got}", [f"'{op}'"])
        return self.advance()

    # expr := term (('+'|'-') term)*
    def expr(self) -> A.Expr:
        left = self.term()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance().text
            right = self.term()
            left = A.Add(left, right) if op == "+" else A.Sub(left, right)
        return left

    # term := unary (('*'|'/') unary)*
    def term(self) -> A.Expr:
        left = self.unary()
        while self.at_op("*") or self.at_op("/"):
            op = self.advance().text
            right = self.unary()
            left = A.Mul(left, right) if op == "*" else A.Div(left, right)
        return left

    # unary := '-' unary | power
    def unary(self) -> A.Expr:
        if self.at_op("-"):
            self.advance()
            return A.Neg(self.unary())
        return self.power()

    # power := postfix ('^' unary)?
    def power(self) -> A.Expr:
        base = self.postfix()
        if self.at_op("^"):
            self.advance()
            return A.Pow(base, self.unary())
        return base

    # postfix := atom '!'*
    def postfix(self) -> A.Expr:
        e = self.atom()
        while self.at_op("!"):
            self.advance()
            e = A.Factorial(e)
        return e

    def atom(self) -> A.Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return A.IntLit(int(tok.text))
        if tok.kind == "name":
            self.advance()
            if self.at_op("("):
                return self.call(tok)
            if tok.text in A.RESERVED:
                self.fail(f"function {tok.text!r} needs an argument list", ["'('"])
            return A.Var(tok.text)
        if self.at_op("("):
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        self.fail(f"expected expression but found {got}", _EXPR_START)

    def call(self, name: Token) -> A.Expr:
        self.expect_op("(")
        fn = name.text
        if fn == "sum":
            var = self.peek()
            if var.kind != "name" or var.text in A.RESERVED:
                self.fail("expected summation variable", ["name"])
            self.advance()
            self.expect_op("=")
            lo = self.expr()
            self.expect_op("..")
            hi = self.expr()
            self.expect_op(",")
            body = self.expr()
            self.expect_op(")")
            return A.Sum(var.text, lo, hi, body)
        if fn == "binom":
            upper = self.expr()
            self.expect_op(",")
            lower = self.expr()
            self.expect_op(")")
            return A.Binom(upper, lower)
        cls = A.CALLS.get(fn)
        if cls is None:
            known = sorted(A.RESERVED)
            raise ParseError(self.text, name.offset, f"unknown function {fn!r}", known)
        arg = self.expr()
        self.expect_op(")")
        return cls(arg)


def parse(text: str) -> A.Expr:
    p = _Parser(text, tokenize(text))
    e = p.expr()
    tok = p.peek()
    if tok.kind != "eof":
        p.fail(f"unexpected {tok.text!r} after expression", ["end of input", "operator"])
    return e
