"""Independent reference computations, built on sympy and on first principles only."""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations, permutations
from pathlib import Path

import sympy as sp

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "cbreduce" / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


def perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def leibniz_det(rows) -> Fraction:
    """Sum over permutations; exponential, for small matrices only."""
    n = len(rows)
    total = Fraction(0)
    for p in permutations(range(n)):
        term = Fraction(perm_sign(p))
        for r, c in enumerate(p):
            term *= rows[r][c]
            if term == 0:
                break
        total += term
    return total


def leibniz_minors(rows) -> dict:
    """Maximal minors over column subsets of a wide matrix."""
    k, n = len(rows), len(rows[0])
    return {s: leibniz_det([[r[c - 1] for c in s] for r in rows]) for s in combinations(range(1, n + 1), k)}


def sympy_fixture(name: str):
    """(matrix, symbols) of a fixture document, parsed by sympy; sqrtD becomes sqrt(D)."""
    doc = json.loads((FIXTURES / f"{name}.json").read_text())
    names = doc.get("vars") or []
    syms = {v: sp.Symbol(v) for v in names}
    local = dict(syms)
    if doc.get("discriminant"):
        local["sqrtD"] = sp.sqrt(sp.sympify(doc["discriminant"].replace("^", "**"), locals=syms))
    vals = [sp.sympify(e.replace("^", "**"), locals=local) for e in doc["entries"]]
    m = sp.Matrix(doc["rows"], doc["cols"], vals)
    if doc.get("transposed"):
        m = m.T
    return m, syms


def sympy_minors(m: sp.Matrix) -> dict:
    wide = m if m.rows <= m.cols else m.T
    k, n = wide.shape
    return {s: sp.expand(wide[:, [c - 1 for c in s]].det(method="berkowitz")) for s in combinations(range(1, n + 1), k)}


def to_sympy(text: str, syms: dict, disc: str | None = None):
    local = dict(syms)
    if disc:
        local["sqrtD"] = sp.sqrt(sp.sympify(disc.replace("^", "**"), locals=syms))
    return sp.sympify(text.replace("^", "**"), locals=local)


def sympy_equal(a, b) -> bool:
    return sp.simplify(sp.radsimp(a - b)) == 0


def sympy_squarefree(expr, gens):
    """(Q, D) with expr = unit * Q^2 * D, D squarefree, from sympy's sqf_list."""
    unit, factors = sp.sqf_list(sp.Poly(expr, *gens))
    q, d = sp.Integer(1), sp.Integer(1)
    for f, mult in factors:
        q *= f.as_expr() ** (mult // 2)
        if mult % 2:
            d *= f.as_expr()
    return sp.expand(q), sp.expand(d), unit


def sympy_y(minors: dict, base, i, j, alpha, beta):
    """Signed cross-ratio of four minors, straight from its definition."""
    def swap(s, out, into):
        return tuple(sorted(set(s) - {out} | {into}))

    sign = -1 if (i - alpha) * (i - beta) * (j - alpha) * (j - beta) > 0 else 1
    num = minors[swap(base, i, alpha)] * minors[swap(base, j, beta)]
    den = minors[swap(base, i, beta)] * minors[swap(base, j, alpha)]
    return sign * num / den
