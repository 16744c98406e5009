"""Enumerate KBO parameters (w0 = 1) that orient every group rule strictly.

Weights range over {0, 1, 2}, precedences over all total orders of the
signature; inadmissible choices are skipped.  The parameters used in the
corpus (samples.GROUP_KBO) are one of the printed witnesses.

    python3 scripts/kbo_witness_search.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from cpfcert.samples import GROUP_ARITIES, GROUP_KBO, GROUP_RULES  # noqa: E402
from oracles import kbo_witness_search  # noqa: E402


def main() -> int:
    found = kbo_witness_search([(r.lhs, r.rhs) for r in GROUP_RULES], GROUP_ARITIES)
    for weights, order in found:
        w = ", ".join(f"w({f})={n}" for f, n in sorted(weights.items()))
        mark = "  <- used" if (weights, order) == (dict(GROUP_KBO.weights), ("inv", "*", "e")) else ""
        print(f"{w}   {' > '.join(order)}{mark}")
    print(f"{len(found)} witnesses")
    return 0 if found else 1


if __name__ == "__main__":
    sys.exit(main())
