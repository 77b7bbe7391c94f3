"""Regenerate frozen oracle outputs and golden demo reports.

    python3 tests/make_golden.py [--oracles] [--demos]

Oracle files come from sympy alone; demo reports come from the CLI and pin
its output format.
"""

from __future__ import annotations

import argparse
import json
import sys

import sympy as sp

from oracles import GOLDEN, sympy_fixture, sympy_minors, sympy_squarefree


def _terms(name: str) -> dict:
    left, syms = sympy_fixture(f"{name}_left")
    right, _ = sympy_fixture(f"{name}_right")
    lm, rm = sympy_minors(left), sympy_minors(right)
    return {
        "vars": list(syms),
        "left_minors": {",".join(map(str, s)): str(v) for s, v in lm.items()},
        "right_minors": {",".join(map(str, s)): str(v) for s, v in rm.items()},
        "h": {",".join(map(str, s)): str(sp.expand(lm[s] * rm[s])) for s in lm},
    }


def _squarefree() -> dict:
    e1, e3 = sp.symbols("e1 e3")
    q, d, unit = sympy_squarefree((e1 - e3) ** 2 * (e1**2 - 6 * e1 * e3 + e3**2), (e1, e3))
    return {"Q": str(q), "D": str(d), "unit": str(unit)}


def write_oracles() -> None:
    for name in ("ex1_2", "ex4_1", "ex5_9"):
        (GOLDEN / f"oracle_{name}.json").write_text(json.dumps(_terms(name), indent=1) + "\n")
    (GOLDEN / "oracle_ex5_3.json").write_text(json.dumps(_squarefree(), indent=1) + "\n")


def write_demos() -> None:
    from cbreduce.cli import EXAMPLES, demo_report

    for ex in EXAMPLES:
        path = GOLDEN / f"demo_{ex.replace('.', '_')}.json"
        path.write_text(json.dumps(demo_report(ex), indent=2) + "\n")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--oracles", action="store_true")
    ap.add_argument("--demos", action="store_true")
    args = ap.parse_args()
    GOLDEN.mkdir(exist_ok=True)
    if args.oracles:
        write_oracles()
    if args.demos:
        write_demos()
    if not (args.oracles or args.demos):
        sys.exit("nothing to do; pass --oracles and/or --demos")
