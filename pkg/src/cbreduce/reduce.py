"""Combinatorial reduction checker: hypotheses, potential construction, verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .exactmat import ExactMatrix, SubsetIndex
from .expansion import (
    TermMap,
    cauchy_binet_terms,
    curvature_scan,
    h_at_ones,
    left_matroid_minors,
    monomial_condition,
)
from .laurent import LaurentPoly
from .matroid import Matroid, MatroidError, exchange, find_generic_columns, from_minor_map

REDUCED = "Reduced"
NOT_REDUCED = "NotReduced"
HYPOTHESIS_FAILED = "HypothesisFailed"

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class AssumptionReport:
    r_generic: bool
    r_witness: SubsetIndex | None
    generic_columns: tuple | None
    dimension_bound: bool
    dualized: bool
    matroid: Matroid | None = None
    matroid_error: str | None = None

    @property
    def ok(self) -> bool:
        return self.r_generic and self.generic_columns is not None and self.dimension_bound

    def failures(self) -> list[str]:
        out = []
        if not self.r_generic:
            out.append("R genericity")
        if self.generic_columns is None:
            out.append("two generic columns")
        if not self.dimension_bound:
            out.append("dimension bound")
        return out


@dataclass(frozen=True)
class ReductionResult:
    verdict: str
    psi: dict[int, Exponent] | None = None
    m0: Exponent | None = None
    witness: dict | None = None
    assumptions: AssumptionReport | None = None
    gauge: dict = field(default_factory=dict)


def check_assumptions(left: ExactMatrix, right: ExactMatrix) -> AssumptionReport:
    """R generic, two generic columns of L(1), and max{k, n-k} >= 5.

    The dimension bound is symmetric under the passage to the dual pair, so
    ``dualized`` only records whether the dual representation is the one with
    n - k >= 5.
    """
    k, n = left.shape
    zero = next((s for s, v in sorted(right.maximal_minors().items()) if v == 0), None)
    matroid, error, witness = None, None, None
    try:
        matroid = from_minor_map(left_matroid_minors(left))
        witness = find_generic_columns(matroid)
    except MatroidError as exc:
        error = str(exc)
    bound = max(k, n - k) >= 5
    return AssumptionReport(zero is None, zero, witness, bound, bound and n - k < 5, matroid, error)


def column_increment(assignment: Mapping, base, j: int, beta: int) -> Exponent | None:
    """chi_J(j; beta) = Psi(J^j_beta) - Psi(J), or None when either set is not a basis."""
    base = tuple(sorted(base))
    other = exchange(base, j, beta)
    if base not in assignment or other not in assignment:
        return None
    return tuple(a - b for a, b in zip(assignment[other][1], assignment[base][1]))


def construct_potential(assignment: Mapping, n: int, base: SubsetIndex, alpha1: int, nvars: int):
    """psi with psi(alpha1) = 0 and the offset m0, built from column increments at ``base``.

    Returns (psi, m0, free) where ``free`` lists the elements that never enter
    a basis (their psi is set to zero).
    """
    zero = (0,) * nvars
    psi: dict[int, Exponent] = {alpha1: zero}
    for m in base:
        inc = column_increment(assignment, base, m, alpha1)
        if inc is None:
            raise ValueError(f"{exchange(base, m, alpha1)} is not a basis")
        psi[m] = tuple(-x for x in inc)
    free = []
    for w in range(1, n + 1):
        if w in psi:
            continue
        m_w = next((m for m in base if exchange(base, m, w) in assignment), None)
        if m_w is None:
            psi[w] = zero
            free.append(w)
            continue
        inc = column_increment(assignment, base, m_w, w)
        psi[w] = tuple(a + b for a, b in zip(psi[m_w], inc))
    total = [0] * nvars
    for m in base:
        total = [a + b for a, b in zip(total, psi[m])]
    m0 = tuple(a - b for a, b in zip(assignment[base][1], total))
    return psi, m0, free


def verify_terms(h: TermMap, h1: TermMap, psi: Mapping[int, Exponent], m0: Exponent):
    """(True, None) when h(I) = t^(m0 + sum psi) h1(I) for every k-subset, else (False, I)."""
    for s in sorted(h.values):
        e = list(m0)
        for a in s:
            e = [x + y for x, y in zip(e, psi[a])]
        lhs, rhs = h.values[s], h1.values[s]
        if rhs == 0:
            if lhs != 0:
                return False, s
            continue
        if lhs != LaurentPoly.monomial(e) * rhs:
            return False, s
    return True, None


def verify_reduction(left: ExactMatrix, right: ExactMatrix, psi: Mapping[int, Exponent], m0: Exponent):
    h = cauchy_binet_terms(left, right, check=False)
    return verify_terms(h, h_at_ones(h), psi, m0)


def check_reduction(left: ExactMatrix, right: ExactMatrix, h: TermMap | None = None) -> ReductionResult:
    """Decide whether the deformed expansion reduces to a per-element potential."""
    if h is None:
        h = cauchy_binet_terms(left, right)
    assumptions = check_assumptions(left, right)
    mono = monomial_condition(h)
    if not mono.ok:
        return ReductionResult(NOT_REDUCED, witness={"kind": "non_monomial", "subset": mono.witness}, assumptions=assumptions)
    for hs, quad, value in curvature_scan(mono.assignment, h.n, h.k):
        return ReductionResult(
            NOT_REDUCED,
            witness={"kind": "curvature", "H": hs, "quadruple": quad, "value": value},
            assumptions=assumptions,
        )
    if assumptions.generic_columns is None:
        return ReductionResult(HYPOTHESIS_FAILED, witness={"kind": "hypothesis", "failed": assumptions.failures()}, assumptions=assumptions)
    base, a1, a2 = assumptions.generic_columns
    try:
        psi, m0, free = construct_potential(mono.assignment, h.n, base, a1, h.nvars)
    except ValueError as exc:
        return ReductionResult(HYPOTHESIS_FAILED, witness={"kind": "hypothesis", "failed": [str(exc)]}, assumptions=assumptions)
    ok, bad = verify_terms(h, h_at_ones(h), psi, m0)
    gauge = {"basis": base, "alpha1": a1, "alpha2": a2, "free": free}
    if ok:
        return ReductionResult(REDUCED, psi, m0, assumptions=assumptions, gauge=gauge)
    if not assumptions.ok:
        return ReductionResult(
            HYPOTHESIS_FAILED, witness={"kind": "hypothesis", "failed": assumptions.failures(), "subset": bad},
            assumptions=assumptions, gauge=gauge,
        )
    return ReductionResult(NOT_REDUCED, witness={"kind": "verification", "subset": bad}, assumptions=assumptions, gauge=gauge)
