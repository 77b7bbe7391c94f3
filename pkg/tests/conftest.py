from __future__ import annotations

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from cbreduce.exactmat import ExactMatrix
from cbreduce.laurent import LaurentPoly
from cbreduce.textio import load_matrix, merge_contexts

sys.path.insert(0, str(Path(__file__).resolve().parent))

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "cbreduce" / "fixtures"


def fixture_pair(name: str):
    left, lctx = load_matrix(FIXTURES / f"{name}_left.json")
    right, rctx = load_matrix(FIXTURES / f"{name}_right.json")
    return left, right, merge_contexts(lctx, rctx)


def random_matrix(rng: random.Random, rows: int, cols: int, span: int = 5) -> ExactMatrix:
    return ExactMatrix([[Fraction(rng.randint(-span, span)) for _ in range(cols)] for _ in range(rows)])


def generic_matrix(rng: random.Random, rows: int, cols: int, span: int = 5) -> ExactMatrix:
    """Resample until every maximal minor is nonzero."""
    while True:
        m = random_matrix(rng, rows, cols, span)
        if all(v != 0 for v in m.maximal_minors().values()):
            return m


def planted_reduction(rng: random.Random, k: int, n: int, nvars: int = 1, span: int = 3):
    """L(t) = c t^m0 on the first row times L(1) diag(t^psi0), with L(1) and R generic."""
    l1 = generic_matrix(rng, k, n)
    right = generic_matrix(rng, n, k)
    psi0 = {a: tuple(rng.randint(-span, span) for _ in range(nvars)) for a in range(1, n + 1)}
    shift = tuple(rng.randint(-span, span) for _ in range(nvars))
    unit = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    rows = []
    for r in range(k):
        row = []
        for c in range(n):
            e = psi0[c + 1]
            coef = l1.rows()[r][c]
            if r == 0:
                e = tuple(a + b for a, b in zip(e, shift))
                coef *= unit
            row.append(LaurentPoly.monomial(e, coef) if coef != 0 else LaurentPoly.zero(nvars))
        rows.append(row)
    return ExactMatrix(rows), right, psi0


@pytest.fixture
def rng():
    return random.Random(20240611)
