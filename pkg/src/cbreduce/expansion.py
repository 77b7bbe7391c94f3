"""Cauchy-Binet term maps, chi-triples, curvature and the monomial condition."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Mapping

from .exactmat import ExactMatrix, SubsetIndex, _all_column_minors, _eval_quad
from .laurent import LaurentPoly, RationalFunction, ground_monomial
from .matroid import exchange, exchange2
from .quadext import QuadExt

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class TermMap:
    """h(I) = Delta_L(I) Delta_R(I) over every k-subset of [n] (zeros included)."""

    n: int
    k: int
    nvars: int
    values: Mapping[SubsetIndex, object]

    def h(self, s) -> object:
        return self.values[tuple(sorted(s))]

    def nonzero(self) -> list[SubsetIndex]:
        return sorted(s for s, v in self.values.items() if v != 0)

    def total(self):
        out = Fraction(0)
        for v in self.values.values():
            if v != 0:
                out = v + out
        return out

    def map(self, f) -> "TermMap":
        return TermMap(self.n, self.k, self.nvars, {s: f(v) for s, v in self.values.items()})


def _nvars_of(*matrices: ExactMatrix) -> int:
    for m in matrices:
        for row in m.rows():
            for x in row:
                v = _value_nvars(x)
                if v:
                    return v
    return 0


def _value_nvars(x) -> int:
    if isinstance(x, (LaurentPoly, RationalFunction)):
        return x.nvars
    if isinstance(x, QuadExt):
        return max(_value_nvars(x.rat), _value_nvars(x.rad), _value_nvars(x.disc) if x.disc is not None else 0)
    return 0


def cauchy_binet_terms(left: ExactMatrix, right: ExactMatrix, check: bool = True) -> TermMap:
    """All terms h(I); with check=True the sum is compared against det(L R)."""
    k, n = left.shape
    if right.shape != (n, k):
        raise ValueError(f"shape mismatch: L is {left.shape}, R is {right.shape}")
    lm, rm = left.maximal_minors(), right.maximal_minors()
    values = {}
    for s, a in lm.items():
        b = rm[s]
        values[s] = a * b if a != 0 and b != 0 else Fraction(0)
    tm = TermMap(n, k, _nvars_of(left, right), values)
    if check:
        product = left @ right
        d = _all_column_minors(product.rows())[tuple(range(1, k + 1))]
        if tm.total() != d:
            raise ArithmeticError("Cauchy-Binet sum differs from det(L R)")
    return tm


def terms_from_minor_maps(n: int, k: int, nvars: int, left: Mapping, right: Mapping) -> TermMap:
    return TermMap(n, k, nvars, {s: left[s] * right[s] for s in left})


# monomial reading


def monomial_data(x, nvars: int):
    """(g, e) with x = g t^e, or None when x is not a monomial.

    Over the quadratic extension a value counts as a monomial when its radical
    part vanishes or its square is a monomial with even exponents.
    """
    if isinstance(x, (int, Fraction)):
        return (Fraction(x), (0,) * nvars) if x != 0 else None
    if isinstance(x, LaurentPoly):
        if not x.is_monomial():
            return None
        e = x.exponent()
        return x.coefficient(e), e + (0,) * (nvars - len(e))
    if isinstance(x, RationalFunction):
        return monomial_data(x.num, nvars) if x.is_polynomial() else None
    if isinstance(x, QuadExt):
        if x.rad == 0:
            return monomial_data(x.rat, nvars)
        sq = monomial_data(x * x, nvars)
        if sq is None or any(v % 2 for v in sq[1]):
            return None
        e = tuple(v // 2 for v in sq[1])
        return x / LaurentPoly.monomial(e), e
    raise TypeError(f"unsupported value type {type(x).__name__}")


def as_poly(x, nvars: int) -> LaurentPoly:
    """View a base-field value as a Laurent polynomial (error otherwise)."""
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.constant(x, nvars)
    if isinstance(x, RationalFunction) and x.is_polynomial():
        return x.num
    if isinstance(x, QuadExt) and x.rad == 0:
        return as_poly(x.rat, nvars)
    raise ValueError(f"value {x} is not a Laurent polynomial")


@dataclass(frozen=True)
class ChiTriple:
    base: SubsetIndex
    i: int
    j: int
    alpha: int
    beta: int
    central: object
    second: object
    third: object
    nvars: int

    @property
    def values(self) -> tuple:
        return self.central, self.second, self.third

    @property
    def observable(self) -> bool:
        return any(v != 0 for v in self.values)

    @property
    def zero_free(self) -> bool:
        return all(v != 0 for v in self.values)

    @property
    def integrable(self) -> bool:
        exps = set()
        for v in self.values:
            if v == 0:
                continue
            md = monomial_data(v, self.nvars)
            if md is None:
                return False
            exps.add(md[1])
        return len(exps) == 1

    def ground(self) -> LaurentPoly:
        return ground_monomial([as_poly(v, self.nvars) for v in self.values if v != 0])

    @property
    def context(self) -> tuple:
        return self.base, self.i, self.j, self.alpha, self.beta


def chi_triple(h: TermMap, base, i: int, j: int, alpha: int, beta: int) -> ChiTriple:
    base = tuple(sorted(base))
    if i == j or alpha == beta:
        raise ValueError("chi_triple needs i != j and alpha != beta")
    if i not in base or j not in base:
        raise ValueError(f"i, j must lie in {base}")
    if alpha in base or beta in base:
        raise ValueError(f"alpha, beta must lie outside {base}")
    central = h.h(base) * h.h(exchange2(base, (i, j), (alpha, beta)))
    second = h.h(exchange(base, i, alpha)) * h.h(exchange(base, j, beta))
    third = h.h(exchange(base, i, beta)) * h.h(exchange(base, j, alpha))
    return ChiTriple(base, i, j, alpha, beta, central, second, third, h.nvars)


def all_contexts(n: int, k: int) -> Iterator[tuple]:
    """Canonical contexts (I, i<j, alpha<beta)."""
    for base in combinations(range(1, n + 1), k):
        rest = [x for x in range(1, n + 1) if x not in base]
        for i, j in combinations(base, 2):
            for a, b in combinations(rest, 2):
                yield base, i, j, a, b


# monomial condition and curvature


@dataclass(frozen=True)
class MonomialCheck:
    assignment: dict | None
    witness: SubsetIndex | None = None

    @property
    def ok(self) -> bool:
        return self.assignment is not None


def monomial_condition(h: TermMap) -> MonomialCheck:
    """Read every nonzero h(I) as g t^Psi(I), or return the first non-monomial I."""
    out = {}
    for s in sorted(h.values):
        v = h.values[s]
        if v == 0:
            continue
        md = monomial_data(v, h.nvars)
        if md is None:
            return MonomialCheck(None, s)
        out[s] = md
    return MonomialCheck(out)


def curvature(assignment: Mapping, h_set, a1: int, a2: int, b1: int, b2: int):
    """Psi(H a1 a2) + Psi(H b1 b2) - Psi(H a1 b2) - Psi(H b1 a2); None when not evaluable."""
    hs = tuple(h_set)
    if len({a1, a2, b1, b2}) != 4 or any(x in hs for x in (a1, a2, b1, b2)):
        raise ValueError("indices must be distinct and outside H")
    sets = [tuple(sorted(hs + p)) for p in ((a1, a2), (b1, b2), (a1, b2), (b1, a2))]
    if any(s not in assignment for s in sets):
        return None
    e = [assignment[s][1] for s in sets]
    return tuple(w + x - y - z for w, x, y, z in zip(*e))


def curvature_scan(assignment: Mapping, n: int, k: int) -> Iterator[tuple]:
    """Every evaluable quadruple with nonzero curvature as (H, (a1, a2, b1, b2), value)."""
    if k < 2:
        return
    for hs in combinations(range(1, n + 1), k - 2):
        rest = [x for x in range(1, n + 1) if x not in hs]
        for a, b, c, d in combinations(rest, 4):
            for quad in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
                v = curvature(assignment, hs, *quad)
                if v is not None and any(v):
                    yield hs, quad, v


def h_at_ones(h: TermMap) -> TermMap:
    """Terms evaluated at t = 1 (constants are kept)."""
    point = (Fraction(1),) * h.nvars

    def ev(x):
        if isinstance(x, (LaurentPoly, RationalFunction)):
            return x.evaluate(point)
        if isinstance(x, QuadExt):
            return _eval_quad(x, point)
        return x

    return TermMap(h.n, h.k, 0, {s: ev(v) for s, v in h.values.items()})


def left_matroid_minors(left: ExactMatrix) -> dict:
    """Maximal minors of L(1)."""
    return left.evaluate((Fraction(1),) * _nvars_of(left)).maximal_minors() if _nvars_of(left) else left.maximal_minors()

