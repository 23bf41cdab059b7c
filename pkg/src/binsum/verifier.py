"""Exhaustive-grid and seeded-random verification of catalog identities."""

from __future__ import annotations

import itertools
import random
import re
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .catalog import (
    IdentitySpec,
    InstantiationError,
    Param,
    effective_assignment,
    instantiate,
)
from .dsl.evaluator import (
    EvalContext,
    EvalError,
    ParamAssignment,
    evaluate,
    seq_functions,
)
from .dsl.parser import parse
from .seqcore import HoradamParams

FAILURE_CAP = 20
BLOCK_SIZE = 2048

DEFAULT_N = (0, 8)
DEFAULT_INT = (-4, 4)
DEFAULT_RATIONALS = tuple(Fraction(v) for v in ("-1/2", "1/2", "3/2", "7/2"))
DEFAULT_M = ("n-1", "n", "n+1", "2*n", "2*n+1")
HORADAM_POOL = tuple(
    HoradamParams.parse(s)
    for s in ("0,1,1,-1", "2,1,1,-1", "1,2,3,2", "-1,2,1,3", "2,-1,-2,5")
)


class GridError(ValueError):
    pass


# --- domains -------------------------------------------------------------


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int

    deps = ()

    def values(self, env) -> list:
        return list(range(self.lo, self.hi + 1))

    def __str__(self):
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class ValueSet:
    items: tuple

    deps = ()

    def values(self, env) -> list:
        return sorted(set(self.items))

    def __str__(self):
        return "|".join(str(v) for v in sorted(set(self.items)))


@dataclass(frozen=True)
class Derived:
    """Values computed from earlier parameters, plus fixed extras."""

    exprs: tuple
    extra: tuple = ()

    @property
    def deps(self):
        from .dsl.ast import free_vars

        out = set()
        for e in self.exprs:
            out |= free_vars(e)
        return tuple(sorted(out))

    def values(self, env) -> list:
        asg = ParamAssignment(rats={k: Fraction(v) for k, v in env.items()})
        vals = {evaluate(e, asg) for e in self.exprs} | set(self.extra)
        return sorted(vals)

    def __str__(self):
        from .dsl.formatter import format_expr

        parts = [format_expr(e) for e in self.exprs] + [str(v) for v in self.extra]
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class HoradamPool:
    items: tuple

    deps = ()

    def values(self, env) -> list:
        return list(self.items)

    def __str__(self):
        return ";".join(str(h) for h in self.items)


def default_domain(p: Param, names: set):
    if p.kind == "horadam":
        return HoradamPool((p.pinned,)) if p.pinned else HoradamPool(HORADAM_POOL)
    if p.domain is not None:
        if p.domain[0] == "range":
            return IntRange(p.domain[1], p.domain[2])
        return ValueSet(p.domain[1])
    if p.kind == "integer":
        if p.name == "n":
            return IntRange(*DEFAULT_N)
        if p.name == "m" and "n" in names:
            return Derived(tuple(parse(s) for s in DEFAULT_M))
        return IntRange(*DEFAULT_INT)
    if p.name == "m" and "n" in names:
        return Derived(tuple(parse(s) for s in DEFAULT_M), DEFAULT_RATIONALS)
    return ValueSet(DEFAULT_RATIONALS)


def parse_domain(text: str, p: Param):
    text = text.strip()
    if p.kind == "horadam":
        try:
            return HoradamPool(tuple(HoradamParams.parse(s) for s in text.split(";") if s.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise GridError(f"bad Horadam list {text!r}: {exc}") from None
    m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise GridError(f"empty range {text!r} for {p.name}")
        return IntRange(lo, hi)
    try:
        vals = tuple(Fraction(v) for v in text.split("|"))
    except (ValueError, ZeroDivisionError):
        raise GridError(f"bad domain {text!r} for {p.name}") from None
    if p.kind == "integer" and any(v.denominator != 1 for v in vals):
        raise GridError(f"non-integer value in domain of integer parameter {p.name}")
    return ValueSet(vals)


@dataclass
class GridSpec:
    """Ordered parameter domains; derived domains follow their inputs."""

    domains: dict

    @classmethod
    def default_for(cls, spec: IdentitySpec) -> "GridSpec":
        names = set(spec.param_names())
        doms = {p.name: default_domain(p, names) for p in spec.params}
        return cls(_order(doms))

    @classmethod
    def parse(cls, text: str, spec: IdentitySpec) -> "GridSpec":
        """``n=0..3,r=0..0,x=1/2|3,horadam=0,1,1,-1;2,1,1,-1`` over the defaults."""
        grid = cls.default_for(spec)
        if not text or not text.strip():
            return grid
        params = {p.name: p for p in spec.params}
        doms = dict(grid.domains)
        for item in re.split(r",(?=\s*[A-Za-z_]\w*\s*=)", text.strip()):
            name, sep, value = item.partition("=")
            name = name.strip()
            if not sep:
                raise GridError(f"expected name=domain, got {item!r}")
            if name not in params:
                raise GridError(f"{spec.id} has no parameter {name!r}")
            doms[name] = parse_domain(value, params[name])
        return cls(_order(doms))

    def names(self) -> list:
        return list(self.domains)

    def size(self) -> int:
        return sum(1 for _ in self.iter_values())

    def iter_values(self):
        """Yield value tuples in lexicographic domain order."""
        names = list(self.domains)
        doms = [self.domains[n] for n in names]
        # domains after the last derived one are a plain product
        cut = max((i + 1 for i, d in enumerate(doms) if d.deps), default=0)
        tail = [d.values({}) for d in doms[cut:]]
        env: dict = {}

        def rec(i, prefix):
            if i == cut:
                for rest in itertools.product(*tail):
                    yield prefix + rest
                return
            for v in doms[i].values(env):
                env[names[i]] = v
                yield from rec(i + 1, prefix + (v,))
            env.pop(names[i], None)

        yield from rec(0, ())

    def describe(self) -> dict:
        return {n: str(d) for n, d in self.domains.items()}


def _order(doms: dict) -> dict:
    out: dict = {}
    pending = list(doms.items())
    while pending:
        progress = False
        for item in list(pending):
            name, dom = item
            if all(d in out or d not in doms for d in dom.deps):
                out[name] = dom
                pending.remove(item)
                progress = True
        if not progress:
            raise GridError("cyclic derived domains")
    return out


# --- reports -------------------------------------------------------------


@dataclass
class Failure:
    assignment: dict
    kind: str  # "mismatch" or "evaluation-error"
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    side: Optional[str] = None
    error: Optional[str] = None


@dataclass
class VerificationReport:
    identity_id: str
    mode: str
    attempted: int = 0
    evaluated: int = 0
    skipped: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    failure_count: int = 0
    seed: Optional[int] = None
    grid: Optional[dict] = None
    elapsed: float = 0.0

    @property
    def skipped_total(self) -> int:
        return sum(self.skipped.values())

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def summary(self) -> str:
        s = f"{self.identity_id}: {self.evaluated} evaluated, {self.failure_count} failures"
        if self.skipped_total:
            s += f", {self.skipped_total} skipped"
        return s


@dataclass
class SuiteReport:
    mode: str
    reports: list
    quarantined: list
    seed: Optional[int] = None
    count: Optional[int] = None
    elapsed: float = 0.0

    @property
    def failure_count(self) -> int:
        return sum(r.failure_count for r in self.reports)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def summary(self) -> str:
        ev = sum(r.evaluated for r in self.reports)
        bad = [r.identity_id for r in self.reports if r.failure_count]
        lines = [f"{len(self.reports)} identities, {ev} evaluated, "
                 f"{self.failure_count} failures ({self.elapsed:.1f}s)"]
        if bad:
            lines.append("failing: " + ", ".join(bad))
        if self.quarantined:
            lines.append("quarantined (not run): " + ", ".join(self.quarantined))
        return "\n".join(lines)


# --- case evaluation -------------------------------------------------------


class _Runner:
    """Evaluates cases of one identity in one process."""

    def __init__(self, spec: IdentitySpec, names: list, ctx: EvalContext):
        self.spec = spec
        self.names = names
        self.ctx = ctx
        self.lhs, self.rhs, cons = spec.compiled()
        self.checks = [(c, [f.fn for f in fns]) for c, fns in zip(spec.constraints, cons)]
        kinds = {p.name: p.kind for p in spec.params}
        self.kinds = [kinds[n] for n in names]
        self.hslot = self.kinds.index("horadam") if "horadam" in self.kinds else None
        self.fields = [(i, n, k == "integer") for i, (n, k) in enumerate(zip(names, self.kinds))
                       if k != "horadam"]
        hp = spec.horadam_param()
        self.pinned = hp.pinned if hp is not None else None
        self._per_h: dict = {}

    def horadam_data(self, h):
        # keyed by identity; the stored object guards against id reuse
        entry = self._per_h.get(id(h))
        if entry is None or entry[0] is not h:
            if h is None:
                seqs, delta_ok, fields = seq_functions(None, self.ctx), False, {}
            else:
                seqs = seq_functions(h, self.ctx)
                delta_ok = h.delta() != 0
                fields = {name: hv.numerator if hv.denominator == 1 else hv
                          for name, hv in zip(("a", "b", "p", "q"), h.as_tuple())}
            entry = self._per_h[id(h)] = (h, seqs, delta_ok, fields)
        return entry

    def env(self, values: tuple):
        h = values[self.hslot] if self.hslot is not None else self.pinned
        entry = self.horadam_data(h)
        env = dict(entry[3])
        for i, name, is_int in self.fields:
            v = values[i]
            if is_int:
                env[name] = v if type(v) is int else int(v)
            else:
                env[name] = v if type(v) is int or v.denominator != 1 else v.numerator
        return env, entry

    def run(self, values: tuple):
        """("skip", constraint) | ("ok",) | ("fail", Failure)."""
        env, entry = self.env(values)
        h, (su, sv, sw), delta_ok = entry[0], entry[1], entry[2]
        for con, fns in self.checks:
            if con.kind == "delta_nonzero":
                if not delta_ok:
                    return ("skip", con)
                continue
            try:
                vals = [f(env, su, sv, sw) for f in fns]
            except EvalError:
                return ("skip", con)
            if not con.holds_values(vals, h):
                return ("skip", con)
        try:
            lhs = self.lhs.fn(env, su, sv, sw)
        except EvalError as exc:
            return ("fail", Failure(self.assignment(values), "evaluation-error",
                                    side="lhs", error=str(exc)))
        try:
            rhs = self.rhs.fn(env, su, sv, sw)
        except EvalError as exc:
            return ("fail", Failure(self.assignment(values), "evaluation-error",
                                    side="rhs", error=str(exc)))
        if lhs != rhs:
            return ("fail", Failure(self.assignment(values), "mismatch",
                                    Fraction(lhs), Fraction(rhs)))
        return ("ok",)

    def assignment(self, values: tuple) -> dict:
        return dict(zip(self.names, values))


_WORKER_CTX: Optional[EvalContext] = None


def _ctx() -> EvalContext:
    global _WORKER_CTX
    if _WORKER_CTX is None:
        _WORKER_CTX = EvalContext()
    return _WORKER_CTX


def _run_block(spec: IdentitySpec, names: list, block: list):
    runner = _Runner(spec, names, _ctx())
    evaluated = 0
    skipped: Counter = Counter()
    failures = []
    nfail = 0
    for values in block:
        res = runner.run(values)
        if res[0] == "skip":
            skipped[str(res[1])] += 1
        else:
            evaluated += 1
            if res[0] == "fail":
                nfail += 1
                if len(failures) < FAILURE_CAP:
                    failures.append(res[1])
    return evaluated, dict(skipped), failures, nfail


def _merge(report: VerificationReport, results):
    skipped: Counter = Counter()
    for evaluated, sk, failures, nfail in results:
        report.evaluated += evaluated
        skipped.update(sk)
        report.failure_count += nfail
        room = FAILURE_CAP - len(report.failures)
        report.failures.extend(failures[:max(room, 0)])
    report.skipped = dict(sorted(skipped.items()))


def _blocks(items: list, size: int) -> list:
    return [items[i:i + size] for i in range(0, len(items), size)] or [[]]


def verify_grid(spec: IdentitySpec, grid: Optional[GridSpec] = None,
                workers: int = 1, pool=None) -> VerificationReport:
    """Evaluate every assignment of the grid's Cartesian product."""
    t0 = time.perf_counter()
    grid = grid or GridSpec.default_for(spec)
    names = grid.names()
    cases = list(grid.iter_values())
    report = VerificationReport(spec.id, "grid", attempted=len(cases), grid=grid.describe())
    blocks = _blocks(cases, BLOCK_SIZE)
    if pool is not None:
        results = list(pool.map(_run_block, [spec] * len(blocks), [names] * len(blocks), blocks))
    elif workers > 1 and len(cases) > BLOCK_SIZE:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_block, [spec] * len(blocks), [names] * len(blocks), blocks))
    else:
        results = [_run_block(spec, names, b) for b in blocks]
    _merge(report, results)
    report.elapsed = time.perf_counter() - t0
    return report


def first_failure(spec: IdentitySpec, grid: Optional[GridSpec] = None) -> Optional[Failure]:
    """The first failing case in grid order, stopping there; None if all pass."""
    grid = grid or GridSpec.default_for(spec)
    runner = _Runner(spec, grid.names(), _ctx())
    for values in grid.iter_values():
        res = runner.run(values)
        if res[0] == "fail":
            return res[1]
    return None


# --- random mode ---------------------------------------------------------


@dataclass(frozen=True)
class RandomSpec:
    seed: int = 0
    count: int = 100
    int_bound: int = 12
    rat_bound: int = 9
    retries: int = 200


def _rand_horadam(rng: random.Random) -> HoradamParams:
    while True:
        a, b = rng.randint(-5, 5), rng.randint(-5, 5)
        p, q = rng.randint(-5, 5), rng.randint(-5, 5)
        if p and q:
            return HoradamParams(a, b, p, q)


def _sample(spec: IdentitySpec, rng: random.Random, rs: RandomSpec) -> tuple:
    vals = []
    for p in spec.swept_params():
        if p.kind == "horadam":
            vals.append(_rand_horadam(rng))
        elif p.kind == "integer":
            vals.append(rng.randint(-rs.int_bound, rs.int_bound))
        else:
            num = rng.randint(-rs.rat_bound, rs.rat_bound)
            vals.append(Fraction(num, rng.randint(1, rs.rat_bound)))
    return tuple(vals)


def verify_random(spec: IdentitySpec, rs: RandomSpec = RandomSpec()) -> VerificationReport:
    """``count`` constraint-passing samples; skipped draws are resampled."""
    t0 = time.perf_counter()
    report = VerificationReport(spec.id, "random", seed=rs.seed)
    # the per-identity stream depends only on the seed and the id
    rng = random.Random(f"{rs.seed}:{spec.id}")
    names = [p.name for p in spec.swept_params()]
    runner = _Runner(spec, names, _ctx())
    skipped: Counter = Counter()
    for _ in range(rs.count):
        for _attempt in range(rs.retries):
            values = _sample(spec, rng, rs)
            report.attempted += 1
            res = runner.run(values)
            if res[0] == "skip":
                skipped[str(res[1])] += 1
                continue
            report.evaluated += 1
            if res[0] == "fail":
                report.failure_count += 1
                if len(report.failures) < FAILURE_CAP:
                    report.failures.append(res[1])
            break
    report.skipped = dict(sorted(skipped.items()))
    report.elapsed = time.perf_counter() - t0
    return report


# --- suite ---------------------------------------------------------------


def verify_all(specs, mode: str = "grid", workers: int = 1, rs: Optional[RandomSpec] = None,
               grids: Optional[dict] = None, include_quarantined: bool = False) -> SuiteReport:
    """Run every expected-pass record; quarantined ones are listed, not run."""
    t0 = time.perf_counter()
    run = [s for s in specs if include_quarantined or not s.quarantined]
    skipped = [s.id for s in specs if s.quarantined and not include_quarantined]
    reports = []
    if mode == "random":
        rs = rs or RandomSpec()
        reports = [verify_random(s, rs) for s in run]
    else:
        grids = grids or {}
        if workers > 1:
            with ProcessPoolExecutor(workers) as ex:
                reports = _grid_suite(run, grids, ex)
        else:
            reports = [verify_grid(s, grids.get(s.id)) for s in run]
    suite = SuiteReport(mode, reports, skipped,
                        seed=rs.seed if rs else None, count=rs.count if rs else None)
    suite.elapsed = time.perf_counter() - t0
    return suite


def _grid_suite(specs, grids, ex) -> list:
    # submit every block of every identity up front, then merge in order
    jobs = []
    for s in specs:
        grid = grids.get(s.id) or GridSpec.default_for(s)
        names = grid.names()
        cases = list(grid.iter_values())
        rep = VerificationReport(s.id, "grid", attempted=len(cases), grid=grid.describe())
        futs = [ex.submit(_run_block, s, names, b) for b in _blocks(cases, BLOCK_SIZE)]
        jobs.append((rep, futs))
    out = []
    for rep, futs in jobs:
        t0 = time.perf_counter()
        _merge(rep, [f.result() for f in futs])
        rep.elapsed = time.perf_counter() - t0
        out.append(rep)
    return out


# --- shrinking -----------------------------------------------------------


def _key(v):
    if isinstance(v, HoradamParams):
        return (0,)
    v = Fraction(v)
    return (abs(v), v.denominator, v < 0)


def _candidates(p: Param, current, dom, env: dict) -> list:
    if p.kind == "horadam":
        pool = list(dom.values(env))
        if current in pool:
            return pool[:pool.index(current)]
        return pool
    vals = set(dom.values(env))
    if p.kind == "integer":
        c = int(current)
        vals |= set(range(-abs(c), abs(c) + 1))
        vals = {int(v) for v in vals if Fraction(v).denominator == 1}
    else:
        vals.add(Fraction(0))
    cur = _key(current)
    return sorted((v for v in vals if _key(v) < cur), key=_key)


def is_failing(spec: IdentitySpec, asg: ParamAssignment, ctx: Optional[EvalContext] = None) -> bool:
    try:
        res = instantiate(spec, asg, ctx or _ctx())
    except InstantiationError:
        return True
    if not hasattr(res, "holds"):
        return False
    return not res.holds


def assignment_from(spec: IdentitySpec, values: dict) -> ParamAssignment:
    ints, rats, h = {}, {}, None
    kinds = {p.name: p.kind for p in spec.params}
    for name, v in values.items():
        kind = kinds.get(name)
        if kind == "horadam":
            h = v
        elif kind == "integer":
            ints[name] = int(v)
        else:
            rats[name] = Fraction(v)
    return effective_assignment(spec, ParamAssignment(ints, rats, h))


def shrink(spec: IdentitySpec, failing: dict, grid: Optional[GridSpec] = None) -> dict:
    """Greedy, deterministic minimisation of a failing assignment.

    Each parameter in turn moves to the smallest-magnitude value of its
    domain that keeps the case failing; passes repeat until stable.
    """
    grid = grid or GridSpec.default_for(spec)
    params = {p.name: p for p in spec.params}
    cur = dict(failing)
    if not is_failing(spec, assignment_from(spec, cur)):
        return cur
    changed = True
    while changed:
        changed = False
        for name in grid.names():
            if name not in cur:
                continue
            dom = grid.domains[name]
            for cand in _candidates(params[name], cur[name], dom, cur):
                trial = dict(cur)
                trial[name] = cand
                if is_failing(spec, assignment_from(spec, trial)):
                    cur = trial
                    changed = True
                    break
    return cur


def mutate(spec: IdentitySpec, rhs: Optional[str] = None, lhs: Optional[str] = None,
           suffix: str = "mutant") -> IdentitySpec:
    """Copy of ``spec`` with a replaced side, for mutation testing."""
    return IdentitySpec(
        id=f"{spec.id}~{suffix}", title=spec.title, anchor=spec.anchor, params=spec.params,
        constraints=spec.constraints,
        lhs=parse(lhs) if lhs is not None else spec.lhs,
        rhs=parse(rhs) if rhs is not None else spec.rhs,
        status="expected-pass")
