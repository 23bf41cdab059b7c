import json
from fractions import Fraction

import jsonschema
from hypothesis import given, settings
from hypothesis import strategies as st

from binsum import catalog, report, verifier
from binsum.seqcore import HoradamParams
from binsum.verifier import Failure, GridSpec, SuiteReport, VerificationReport


def _suite():
    s = catalog.lookup("S4.T1")
    m = verifier.mutate(s, rhs="sum(k=0..n, binom(n,k)^2*F(6*k-2*n+r+1))")
    g = GridSpec.parse("n=0..2,r=-1..1", m)
    specs = [catalog.lookup("S3.T1.L"), catalog.lookup("S3.L2.B")]
    suite = verifier.verify_all(specs)
    suite.reports.append(verifier.verify_grid(m, g))
    return suite


def test_document_validates_and_round_trips():
    suite = _suite()
    text = report.dumps(suite)
    doc = json.loads(text)
    jsonschema.validate(doc, report.SCHEMA)
    assert doc["run"]["failures"] == suite.failure_count > 0
    assert doc["quarantined"] == ["S3.L2.B"]
    back = report.loads(text)
    assert report.dumps(back) == text
    assert back.reports[1].failures[0].lhs == suite.reports[1].failures[0].lhs


def test_no_wall_time_in_document():
    text = report.dumps(_suite())
    assert "elapsed" not in text and "time" not in text


def test_rationals_are_plain_decimal_strings():
    big = Fraction(10 ** 40 + 1, 3 * 10 ** 25)
    assert report.rat_str(big) == f"{10 ** 40 + 1}/{3 * 10 ** 25}"
    assert report.rat_str(Fraction(-6, 2)) == "-3"
    assert "e" not in report.rat_str(Fraction(10 ** 30))
    assert report.parse_rat(report.rat_str(big)) == big


def test_horadam_assignment_round_trip():
    h = HoradamParams(Fraction(1, 2), 1, 3, 2)
    f = Failure({"horadam": h, "n": 2}, "mismatch", Fraction(1), Fraction(2))
    d = report.failure_to_dict(f)
    assert d["assignment"]["horadam"] == str(h)
    assert report.failure_from_dict(d) == f


def test_evaluation_error_entry():
    f = Failure({"n": 1}, "evaluation-error", side="rhs", error="division by zero")
    d = report.failure_to_dict(f)
    assert "lhs" not in d and d["side"] == "rhs"
    doc = report.suite_to_dict(SuiteReport("grid", [VerificationReport("X", "grid", 1, 1, failures=[f],
                                                                       failure_count=1)], []))
    jsonschema.validate(doc, report.SCHEMA)


@settings(max_examples=100, deadline=None)
@given(st.fractions(max_denominator=10 ** 12))
def test_rat_round_trip(v):
    assert report.parse_rat(report.rat_str(v)) == v
