"""Identity catalog: the plain-text record format, constraints, instantiation.

A catalog file is a sequence of records separated by blank lines. Each
record has one ``field: value`` per line::

    id: S3.T1.L
    title: alternating Lucas sum equals one
    anchor: §3 ..., \\binom {n+k}{k} L_{n+1-k} = 1
    params: n:integer
    constraints: ge(n,0)
    lhs: sum(k=0..n, (-1)^k*binom(n+k,k)*L(n+1-k))
    rhs: 1

``params`` is a comma list of ``name:kind`` with kind ``integer`` or
``rational``, optionally followed by a default domain in brackets
(``m:integer[-4..4]``, ``x:rational[1/2|3]``). ``horadam`` declares the
Horadam seeds as a swept parameter; ``horadam(0,1,1,-1)`` pins them.
``constraints`` is a ``;`` list. ``status`` is optional and is either
``expected-pass`` or ``quarantined(<counterexample id>)``. Lines starting
with ``#`` are comments.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .dsl import ast as A
from .dsl.evaluator import (
    HORADAM_NAMES,
    CompiledExpr,
    EvalContext,
    EvalError,
    ParamAssignment,
    seq_functions,
)
from .dsl.formatter import format_expr
from .dsl.parser import ParseError, parse
from .seqcore import HoradamParams

FIELDS = ("id", "title", "anchor", "params", "constraints", "lhs", "rhs", "status")
REQUIRED = ("id", "title", "anchor", "params", "lhs", "rhs")
KINDS = ("integer", "rational", "horadam")


class CatalogError(Exception):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<catalog>"):
        self.line = line
        self.source = source
        self.message = message
        loc = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(loc + message)


@dataclass(frozen=True)
class Param:
    name: str
    kind: str
    # default-domain hint: ('range', lo, hi) or ('values', (v, ...))
    domain: Optional[tuple] = None
    pinned: Optional[HoradamParams] = None

    def __str__(self):
        if self.kind == "horadam":
            return f"horadam({self.pinned})" if self.pinned else "horadam"
        s = f"{self.name}:{self.kind}"
        if self.domain:
            if self.domain[0] == "range":
                s += f"[{self.domain[1]}..{self.domain[2]}]"
            else:
                s += "[" + "|".join(str(v) for v in self.domain[1]) + "]"
        return s


# --- constraints -------------------------------------------------------------

_UNARY = ("nonzero", "even", "odd", "integer_valued")
_BINARY = ("same_parity", "diff_parity")


@dataclass(frozen=True)
class Constraint:
    kind: str
    args: tuple = ()  # Expr nodes
    bound: Optional[int] = None  # for ge

    def __str__(self):
        if self.kind == "delta_nonzero":
            return "delta_nonzero"
        inner = ",".join(format_expr(a) for a in self.args)
        if self.kind == "ge":
            inner += f",{self.bound}"
        return f"{self.kind}({inner})"

    def holds_values(self, vals: list, horadam: Optional[HoradamParams]) -> bool:
        if self.kind == "delta_nonzero":
            return horadam is not None and horadam.delta() != 0
        if self.kind == "nonzero":
            return vals[0] != 0
        v = vals[0]
        if type(v) is int and len(vals) == 1:
            if self.kind == "ge":
                return v >= self.bound
            if self.kind == "even":
                return v % 2 == 0
            if self.kind == "odd":
                return v % 2 == 1
        if self.kind == "integer_valued":
            return _as_int(vals[0]) is not None
        ints = [_as_int(v) for v in vals]
        if any(i is None for i in ints):
            return False
        if self.kind == "even":
            return ints[0] % 2 == 0
        if self.kind == "odd":
            return ints[0] % 2 == 1
        if self.kind == "same_parity":
            return (ints[0] - ints[1]) % 2 == 0
        if self.kind == "diff_parity":
            return (ints[0] - ints[1]) % 2 == 1
        if self.kind == "ge":
            return ints[0] >= self.bound
        raise ValueError(self.kind)


def _as_int(v):
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return None


def _split_top(text: str, sep: str) -> list:
    """Split on ``sep`` outside parentheses and brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def parse_constraint(text: str) -> Constraint:
    text = text.strip()
    if text == "delta_nonzero":
        return Constraint("delta_nonzero")
    m = re.fullmatch(r"([a-z_]+)\((.*)\)", text, re.S)
    if not m:
        raise ValueError(f"malformed constraint {text!r}")
    kind, inner = m.group(1), m.group(2)
    parts = _split_top(inner, ",")
    if kind in _UNARY and len(parts) == 1:
        return Constraint(kind, (parse(parts[0]),))
    if kind in _BINARY and len(parts) == 2:
        return Constraint(kind, (parse(parts[0]), parse(parts[1])))
    if kind == "ge" and len(parts) == 2:
        return Constraint("ge", (parse(parts[0]),), int(parts[1]))
    raise ValueError(f"unknown or malformed constraint {text!r}")


def parse_values(text: str) -> tuple:
    return tuple(Fraction(v) for v in text.split("|") if v.strip())


def parse_param(text: str) -> Param:
    text = text.strip()
    if text == "horadam":
        return Param("horadam", "horadam")
    m = re.fullmatch(r"horadam\((.*)\)", text)
    if m:
        return Param("horadam", "horadam", pinned=HoradamParams.parse(m.group(1)))
    m = re.fullmatch(r"([A-Za-z_]\w*):(\w+)(?:\[(.*)\])?", text)
    if not m:
        raise ValueError(f"malformed parameter {text!r}")
    name, kind, dom = m.groups()
    if kind not in ("integer", "rational"):
        raise ValueError(f"unknown parameter kind {kind!r}")
    domain = None
    if dom is not None:
        r = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", dom)
        if r:
            domain = ("range", int(r.group(1)), int(r.group(2)))
        else:
            domain = ("values", parse_values(dom))
    return Param(name, kind, domain)


# --- records -------------------------------------------------------------


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    title: str
    anchor: str
    params: tuple
    constraints: tuple
    lhs: A.Expr
    rhs: A.Expr
    status: str = "expected-pass"
    line: int = 0
    _compiled: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def quarantined(self) -> bool:
        return self.status.startswith("quarantined")

    @property
    def counterexample_id(self) -> Optional[str]:
        m = re.fullmatch(r"quarantined\((.*)\)", self.status)
        return m.group(1) if m else None

    def param_names(self) -> list:
        return [p.name for p in self.params]

    def swept_params(self) -> list:
        return [p for p in self.params if not (p.kind == "horadam" and p.pinned)]

    def horadam_param(self) -> Optional[Param]:
        for p in self.params:
            if p.kind == "horadam":
                return p
        return None

    def integer_names(self) -> frozenset:
        return frozenset(p.name for p in self.params if p.kind == "integer")

    def compiled(self):
        """(lhs, rhs, [constraint arg fns]) compiled lazily per process."""
        c = self._compiled.get("fns")
        if c is None:
            ints = self.integer_names()
            lhs = CompiledExpr(self.lhs, ints)
            rhs = CompiledExpr(self.rhs, ints)
            cons = [[CompiledExpr(a, ints) for a in con.args] for con in self.constraints]
            c = self._compiled["fns"] = (lhs, rhs, cons)
        return c

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_compiled"] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    def to_text(self) -> str:
        lines = [
            f"id: {self.id}",
            f"title: {self.title}",
            f"anchor: {self.anchor}",
            "params: " + ", ".join(str(p) for p in self.params),
        ]
        if self.constraints:
            lines.append("constraints: " + "; ".join(str(c) for c in self.constraints))
        lines.append("lhs: " + format_expr(self.lhs))
        lines.append("rhs: " + format_expr(self.rhs))
        if self.status != "expected-pass":
            lines.append(f"status: {self.status}")
        return "\n".join(lines)


def _validate(spec: IdentitySpec, source: str):
    names = set()
    for p in spec.params:
        if p.name in names:
            raise CatalogError(f"{spec.id}: parameter {p.name!r} declared twice", spec.line, source)
        names.add(p.name)
    has_h = spec.horadam_param() is not None
    allowed = (names - {"horadam"}) | (set(HORADAM_NAMES) if has_h else set())
    exprs = [("lhs", spec.lhs), ("rhs", spec.rhs)]
    for c in spec.constraints:
        exprs += [("constraint", a) for a in c.args]
    for where, e in exprs:
        extra = A.free_vars(e) - allowed
        if extra:
            raise CatalogError(
                f"{spec.id}: {where} uses undeclared {sorted(extra)}", spec.line, source)
        if A.uses_horadam(e) and not has_h:
            raise CatalogError(
                f"{spec.id}: {where} uses U/V/W but declares no horadam parameter",
                spec.line, source)
    if spec.status != "expected-pass" and not spec.counterexample_id:
        raise CatalogError(f"{spec.id}: bad status {spec.status!r}", spec.line, source)


def _build(fields_: dict, start: int, source: str) -> IdentitySpec:
    for name in REQUIRED:
        if name not in fields_:
            raise CatalogError(f"record is missing field {name!r}", start, source)

    def get(name):
        return fields_[name][0]

    def at(name):
        return fields_[name][1]

    try:
        params = tuple(parse_param(s) for s in _split_top(get("params"), ","))
    except ValueError as exc:
        raise CatalogError(str(exc), at("params"), source) from None
    cons = ()
    if "constraints" in fields_:
        try:
            cons = tuple(parse_constraint(s) for s in _split_top(get("constraints"), ";"))
        except (ValueError, ParseError) as exc:
            raise CatalogError(f"bad constraint: {exc}", at("constraints"), source) from None
    sides = {}
    for side in ("lhs", "rhs"):
        try:
            sides[side] = parse(get(side))
        except ParseError as exc:
            raise CatalogError(f"{side}: {exc}", at(side), source) from None
    status = get("status") if "status" in fields_ else "expected-pass"
    spec = IdentitySpec(
        id=get("id"), title=get("title"), anchor=get("anchor"), params=params,
        constraints=cons, lhs=sides["lhs"], rhs=sides["rhs"], status=status, line=start)
    _validate(spec, source)
    return spec


def loads(text: str, source: str = "<catalog>") -> list:
    specs: list = []
    seen: dict = {}
    cur: dict = {}
    start = None

    def flush():
        nonlocal cur, start
        if cur:
            spec = _build(cur, start, source)
            if spec.id in seen:
                raise CatalogError(
                    f"duplicate id {spec.id!r} (first at line {seen[spec.id]})", start, source)
            seen[spec.id] = start
            specs.append(spec)
        cur, start = {}, None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            flush()
            continue
        if line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in FIELDS:
            raise CatalogError(f"unknown field {key!r}", lineno, source)
        if key in cur:
            raise CatalogError(f"field {key!r} given twice", lineno, source)
        if start is None:
            start = lineno
        cur[key] = (value.strip(), lineno)
    flush()
    return specs


def load(path: Union[str, Path]) -> list:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), str(path))


def dumps(specs) -> str:
    return "\n\n".join(s.to_text() for s in specs) + "\n"


def bundled_path() -> Path:
    return Path(str(resources.files("binsum") / "data" / "identities.cat"))


_BUNDLED: Optional[list] = None


def load_bundled() -> list:
    global _BUNDLED
    if _BUNDLED is None:
        _BUNDLED = load(bundled_path())
    return _BUNDLED


def counterexample_store() -> dict:
    path = resources.files("binsum") / "data" / "counterexamples.json"
    return json.loads(path.read_text(encoding="utf-8"))


# --- instantiation -----------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True)
class ConstraintViolation:
    constraint: Constraint

    def __str__(self):
        return f"ConstraintViolation({self.constraint})"


class InstantiationError(Exception):
    """An evaluation error on one side of an identity."""

    def __init__(self, side: str, error: EvalError):
        self.side = side
        self.error = error
        super().__init__(f"{side}: {error}")


def effective_assignment(spec: IdentitySpec, asg: ParamAssignment) -> ParamAssignment:
    hp = spec.horadam_param()
    if hp is not None and hp.pinned is not None and asg.horadam is None:
        return ParamAssignment(dict(asg.ints), dict(asg.rats), hp.pinned)
    return asg


def check_constraints(spec: IdentitySpec, asg: ParamAssignment, ctx: EvalContext):
    """Return the first violated constraint, or None."""
    _, _, cons = spec.compiled()
    if not spec.constraints:
        return None
    values = asg.env()
    su, sv, sw = seq_functions(asg.horadam, ctx)
    for con, fns in zip(spec.constraints, cons):
        try:
            vals = [f.fn(values, su, sv, sw) for f in fns]
        except EvalError:
            return con
        if not con.holds_values(vals, asg.horadam):
            return con
    return None


def instantiate(spec: IdentitySpec, asg: ParamAssignment,
                ctx: Optional[EvalContext] = None):
    """Both side values, or the ConstraintViolation that excludes ``asg``."""
    ctx = ctx or EvalContext()
    asg = effective_assignment(spec, asg)
    bad = check_constraints(spec, asg, ctx)
    if bad is not None:
        return ConstraintViolation(bad)
    lhs_fn, rhs_fn, _ = spec.compiled()
    values = asg.env()
    su, sv, sw = seq_functions(asg.horadam, ctx)
    out = {}
    for side, fn in (("lhs", lhs_fn), ("rhs", rhs_fn)):
        try:
            out[side] = Fraction(fn.fn(values, su, sv, sw))
        except EvalError as exc:
            raise InstantiationError(side, exc) from None
    return Instance(out["lhs"], out["rhs"])


def coverage_report(specs=None) -> dict:
    specs = load_bundled() if specs is None else specs
    return {s.id: s.anchor for s in specs}


def lookup(key: str, specs=None) -> Optional[IdentitySpec]:
    """Exact id match, else the first record whose id extends ``key``."""
    specs = load_bundled() if specs is None else specs
    for s in specs:
        if s.id == key:
            return s
    for s in specs:
        if s.id.startswith(key):
            return s
    return None


def select(keys, specs=None) -> list:
    """Records named by ``keys``: an exact id, or every id under a dotted prefix."""
    specs = load_bundled() if specs is None else specs
    out, seen = [], set()
    for key in keys:
        exact = [s for s in specs if s.id == key]
        group = exact or [s for s in specs if s.id.startswith(key + ".")]
        if not group:
            raise KeyError(key)
        for s in group:
            if s.id not in seen:
                seen.add(s.id)
                out.append(s)
    return out
