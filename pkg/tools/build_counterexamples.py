"""Regenerate data/counterexamples.json from the quarantined catalog records.

Each entry holds the shrunk first grid failure of the printed statement.
Run: python3 tools/build_counterexamples.py
"""

import json
from pathlib import Path

from binsum import catalog, report, verifier

NOTES = {
    "S3.T4.F": "outer term printed as F_{mk+t} uses the summation index outside the sum; "
               "F_{mn+t} makes the identity hold",
    "S3.T4.L": "outer term printed as L_{mk+t} uses the summation index outside the sum; "
               "L_{mn+t} makes the identity hold",
    "S3.R1.L": "constant term has the wrong sign; -2(-1)^n makes the identity hold",
    "S3.L2.B": "fails already at n = 0, where the sum is (1-x)+x = 1 for all x; "
               "no single-symbol correction found",
    "S7.T3": "printed W_{2s(m-k)+t} on the left with no V_s^k factor does not follow from "
             "the lemma; V_s^k W_{s(2m-k)+t} does",
    "S7.T3.U": "same misprint as the W form",
    "S7.T3.V": "same misprint as the W form",
    "S7.T3.F": "same misprint as the W form",
    "S7.T3.L": "same misprint as the W form",
    "S7.L4": "right side needs (x+y)^{n-k-r} in place of (x-y)^{n-k-r}",
    "S7.T5.ODD.F": "the two powers of 5 are exchanged between the sums",
    "S7.C1.ODD.F": "power of 5 should be (n-r-1)/2-k",
}


def entry(spec, specs):
    r = verifier.verify_grid(spec)
    if not r.failures:
        raise SystemExit(f"{spec.id} does not fail on its grid")
    small = verifier.shrink(spec, r.failures[0].assignment)
    asg = verifier.assignment_from(spec, small)
    inst = catalog.instantiate(spec, asg)
    fix = spec.id + ".FIX"
    return {
        "identity": spec.id,
        "assignment": {k: report._value_str(v) for k, v in small.items()},
        "lhs": report.rat_str(inst.lhs),
        "rhs": report.rat_str(inst.rhs),
        "note": NOTES[spec.id],
        "fix": fix if any(s.id == fix for s in specs) else None,
    }


def main():
    specs = catalog.load_bundled()
    store = {}
    for spec in specs:
        if spec.quarantined:
            store[spec.counterexample_id] = entry(spec, specs)
            print(spec.counterexample_id, store[spec.counterexample_id]["assignment"])
    out = Path(__file__).resolve().parent.parent / "src" / "binsum" / "data" / "counterexamples.json"
    out.write_text(json.dumps(store, indent=2, sort_keys=True) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
