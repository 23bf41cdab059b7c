"""Machine-readable report documents.

A document holds run metadata, one entry per identity and the stored
counterexamples. Rationals are written as ``"num/den"`` (or ``"n"``) so
that values stay exact; wall-clock times are left out so that reports are
byte-identical across runs and worker counts.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .seqcore import HoradamParams
from .verifier import Failure, SuiteReport, VerificationReport

FORMAT = "binsum-report"
VERSION = 1

_RAT = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_NULLABLE_RAT = {"anyOf": [_RAT, {"type": "null"}]}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format", "version", "run", "reports", "quarantined"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": FORMAT},
        "version": {"const": VERSION},
        "run": {
            "type": "object",
            "required": ["mode", "seed", "count", "identities", "evaluated", "failures", "passed"],
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["grid", "random"]},
                "seed": {"type": ["integer", "null"]},
                "count": {"type": ["integer", "null"]},
                "identities": {"type": "integer", "minimum": 0},
                "evaluated": {"type": "integer", "minimum": 0},
                "failures": {"type": "integer", "minimum": 0},
                "passed": {"type": "boolean"},
            },
        },
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "mode", "attempted", "evaluated", "skipped",
                             "failure_count", "failures"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "mode": {"enum": ["grid", "random"]},
                    "attempted": {"type": "integer", "minimum": 0},
                    "evaluated": {"type": "integer", "minimum": 0},
                    "skipped": {
                        "type": "object",
                        "additionalProperties": {"type": "integer", "minimum": 0},
                    },
                    "failure_count": {"type": "integer", "minimum": 0},
                    "seed": {"type": ["integer", "null"]},
                    "grid": {
                        "anyOf": [
                            {"type": "null"},
                            {"type": "object", "additionalProperties": {"type": "string"}},
                        ]
                    },
                    "failures": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["kind", "assignment"],
                            "additionalProperties": False,
                            "properties": {
                                "kind": {"enum": ["mismatch", "evaluation-error"]},
                                "assignment": {
                                    "type": "object",
                                    "additionalProperties": {"type": "string"},
                                },
                                "lhs": _NULLABLE_RAT,
                                "rhs": _NULLABLE_RAT,
                                "side": {"type": ["string", "null"]},
                                "error": {"type": ["string", "null"]},
                            },
                        },
                    },
                },
            },
        },
        "quarantined": {"type": "array", "items": {"type": "string"}},
    },
}


def rat_str(v) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def parse_rat(text: str) -> Fraction:
    return Fraction(text)


def _value_str(v) -> str:
    if isinstance(v, HoradamParams):
        return str(v)
    return rat_str(v)


def _value_parse(text: str):
    if "," in text:
        return HoradamParams.parse(text)
    v = Fraction(text)
    return v.numerator if v.denominator == 1 else v


def failure_to_dict(f: Failure) -> dict:
    out = {"kind": f.kind, "assignment": {k: _value_str(v) for k, v in f.assignment.items()}}
    if f.kind == "mismatch":
        out["lhs"] = rat_str(f.lhs)
        out["rhs"] = rat_str(f.rhs)
    else:
        out["side"] = f.side
        out["error"] = f.error
    return out


def failure_from_dict(d: dict) -> Failure:
    asg = {k: _value_parse(v) for k, v in d["assignment"].items()}
    lhs = parse_rat(d["lhs"]) if d.get("lhs") is not None else None
    rhs = parse_rat(d["rhs"]) if d.get("rhs") is not None else None
    return Failure(asg, d["kind"], lhs, rhs, d.get("side"), d.get("error"))


def report_to_dict(r: VerificationReport) -> dict:
    return {
        "id": r.identity_id,
        "mode": r.mode,
        "attempted": r.attempted,
        "evaluated": r.evaluated,
        "skipped": dict(sorted(r.skipped.items())),
        "failure_count": r.failure_count,
        "seed": r.seed,
        "grid": r.grid,
        "failures": [failure_to_dict(f) for f in r.failures],
    }


def report_from_dict(d: dict) -> VerificationReport:
    return VerificationReport(
        identity_id=d["id"], mode=d["mode"], attempted=d["attempted"],
        evaluated=d["evaluated"], skipped=dict(d["skipped"]),
        failures=[failure_from_dict(f) for f in d["failures"]],
        failure_count=d["failure_count"], seed=d.get("seed"), grid=d.get("grid"))


def suite_to_dict(s: SuiteReport) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "run": {
            "mode": s.mode,
            "seed": s.seed,
            "count": s.count,
            "identities": len(s.reports),
            "evaluated": sum(r.evaluated for r in s.reports),
            "failures": s.failure_count,
            "passed": s.passed,
        },
        "reports": [report_to_dict(r) for r in s.reports],
        "quarantined": list(s.quarantined),
    }


def suite_from_dict(d: dict) -> SuiteReport:
    run = d["run"]
    return SuiteReport(run["mode"], [report_from_dict(r) for r in d["reports"]],
                       list(d["quarantined"]), seed=run.get("seed"), count=run.get("count"))


def dumps(s: SuiteReport) -> str:
    return json.dumps(suite_to_dict(s), indent=2, sort_keys=False) + "\n"


def loads(text: str) -> SuiteReport:
    return suite_from_dict(json.loads(text))


def single(r: VerificationReport, count: Optional[int] = None) -> SuiteReport:
    """Wrap one identity report as a document."""
    return SuiteReport(r.mode, [r], [], seed=r.seed, count=count)
