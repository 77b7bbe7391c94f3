"""Sparse multivariate Laurent polynomials over Q and their fraction field.

Polynomials are stored as maps from exponent tuples to ``Fraction``
coefficients; zero coefficients are never stored.  Variables are indexed
``0 .. nvars-1`` and printed as ``t1 .. td`` unless names are supplied.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, NamedTuple, Sequence

Exponent = tuple[int, ...]


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def _sub_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


@dataclass(frozen=True)
class MonomialOrder:
    """Lexicographic order with a declared variable priority."""

    priority: tuple[int, ...]

    @classmethod
    def lex(cls, nvars: int) -> "MonomialOrder":
        return cls(tuple(range(nvars)))

    def key(self, e: Exponent) -> tuple[int, ...]:
        return tuple(e[p] for p in self.priority)


class LaurentPoly:
    """Immutable exact Laurent polynomial in ``nvars`` indeterminates."""

    __slots__ = ("_terms", "nvars")

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None, nvars: int | None = None):
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
        clean = {e: c for e, c in clean.items() if c}
        if nvars is None:
            if not terms:
                raise ValueError("nvars required for an empty polynomial")
            nvars = len(next(iter(terms)))
        for e in clean:
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
        self._terms = clean
        self.nvars = nvars

    @classmethod
    def _raw(cls, terms: dict[Exponent, Fraction], nvars: int) -> "LaurentPoly":
        p = object.__new__(cls)
        p._terms = terms
        p.nvars = nvars
        return p

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls._raw({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "LaurentPoly":
        c = Fraction(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "LaurentPoly":
        e = [0] * nvars
        e[i] = 1
        return cls._raw({tuple(e): Fraction(1)}, nvars)

    @classmethod
    def monomial(cls, e: Sequence[int], c=1) -> "LaurentPoly":
        c = Fraction(c)
        e = tuple(int(x) for x in e)
        return cls._raw({e: c} if c else {}, len(e))

    # read access
    def items(self):
        return self._terms.items()

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def exponent(self) -> Exponent:
        """Exponent vector of a monomial (the reduced reading of Psi)."""
        if len(self._terms) != 1:
            raise ValueError("exponent() needs a monomial")
        return next(iter(self._terms))

    def leading_coefficient_of_monomial(self) -> Fraction:
        if len(self._terms) != 1:
            raise ValueError("not a monomial")
        return next(iter(self._terms.values()))

    def support(self) -> frozenset[Exponent]:
        return frozenset(self._terms)

    def support_exponents(self) -> tuple[list["LaurentPoly"], frozenset[Exponent]]:
        """Return Supp(P) as coefficient-carrying monomials and the exponent set."""
        monos = [LaurentPoly._raw({e: c}, self.nvars) for e, c in sorted(self._terms.items(), reverse=True)]
        return monos, frozenset(self._terms)

    def variables(self) -> set[int]:
        used = set()
        for e in self._terms:
            used.update(i for i, x in enumerate(e) if x)
        return used

    def min_exponents(self) -> Exponent:
        if not self._terms:
            raise ValueError("zero polynomial has no exponents")
        return tuple(min(col) for col in zip(*self._terms))

    def max_exponents(self) -> Exponent:
        if not self._terms:
            raise ValueError("zero polynomial has no exponents")
        return tuple(max(col) for col in zip(*self._terms))

    def lead(self, order: MonomialOrder | None = None) -> tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        if order is None:
            e = max(self._terms)
        else:
            e = max(self._terms, key=order.key)
        return e, self._terms[e]

    def degree_in(self, v: int) -> int:
        return max(e[v] for e in self._terms)

    # arithmetic
    def _coerce(self, other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(other, self.nvars)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly._raw(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self._terms.items()}, self.nvars)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self._terms or not o._terms:
            return LaurentPoly._raw({}, self.nvars)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._raw({e: c for e, c in out.items() if c}, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if not self.is_monomial():
                return RationalFunction(LaurentPoly.constant(1, self.nvars), self**-k)
            e, c = next(iter(self._terms.items()))
            return LaurentPoly._raw({tuple(x * k for x in e): c**k}, self.nvars)
        result = LaurentPoly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            inv = 1 / Fraction(other)
            return LaurentPoly._raw({e: c * inv for e, c in self._terms.items()}, self.nvars)
        if isinstance(other, LaurentPoly):
            o = self._coerce(other)
            if o.is_zero():
                raise ZeroDivisionError("division by zero polynomial")
            if o.is_monomial():
                e0, c0 = next(iter(o._terms.items()))
                return LaurentPoly._raw(
                    {_sub_exp(e, e0): c / c0 for e, c in self._terms.items()}, self.nvars
                )
            return RationalFunction(self, o)
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash(frozenset(self._terms.items()))

    # calculus and substitution
    def shift(self, e: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial t^e."""
        e = tuple(e)
        return LaurentPoly._raw({_add_exp(x, e): c for x, c in self._terms.items()}, self.nvars)

    def derivative(self, v: int) -> "LaurentPoly":
        out = {}
        for e, c in self._terms.items():
            if e[v]:
                f = list(e)
                f[v] -= 1
                out[tuple(f)] = c * e[v]
        return LaurentPoly._raw(out, self.nvars)

    def evaluate(self, point: Sequence) -> Fraction:
        """Evaluate at a point of nonzero rationals (or any field values)."""
        total = 0
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * (x**k if k > 0 else 1 / x ** (-k))
            total = total + term
        return total if self._terms else Fraction(0)

    def divexact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient in the Laurent ring; raises ArithmeticError otherwise."""
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        ma, mb = self.min_exponents(), o.min_exponents()
        q = _poly_divexact(self.shift(tuple(-x for x in ma)), o.shift(tuple(-x for x in mb)))
        return q.shift(_sub_exp(ma, mb))

    def format(self, names: Sequence[str] | None = None) -> str:
        return format_poly(self, names)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)!r}, nvars={self.nvars})"


# ---------------------------------------------------------------------------
# polynomial (nonnegative exponent) algorithms used by gcd and squarefree parts


def _poly_divexact(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if a.is_zero():
        return a
    lb, cb = max(b._terms), b._terms[max(b._terms)]
    r = dict(a._terms)
    q: dict[Exponent, Fraction] = {}
    while r:
        le = max(r)
        diff = _sub_exp(le, lb)
        if any(x < 0 for x in diff):
            raise ArithmeticError("inexact polynomial division")
        coef = r[le] / cb
        q[diff] = coef
        for e, c in b._terms.items():
            f = _add_exp(e, diff)
            s = r.get(f, 0) - coef * c
            if s:
                r[f] = s
            else:
                r.pop(f, None)
    return LaurentPoly._raw(q, a.nvars)


def _coeffs_in(p: LaurentPoly, v: int) -> dict[int, LaurentPoly]:
    groups: dict[int, dict[Exponent, Fraction]] = {}
    for e, c in p._terms.items():
        f = list(e)
        f[v] = 0
        groups.setdefault(e[v], {})[tuple(f)] = c
    return {d: LaurentPoly._raw(t, p.nvars) for d, t in groups.items()}


def _lc_in(p: LaurentPoly, v: int) -> LaurentPoly:
    d = p.degree_in(v)
    return LaurentPoly._raw({e[:v] + (0,) + e[v + 1:]: c for e, c in p._terms.items() if e[v] == d}, p.nvars)


def _var_power(v: int, k: int, nvars: int) -> LaurentPoly:
    e = [0] * nvars
    e[v] = k
    return LaurentPoly._raw({tuple(e): Fraction(1)}, nvars)


def _normalize(p: LaurentPoly) -> LaurentPoly:
    """Scale to integer coefficients with content 1 and positive lex-leading coefficient."""
    if p.is_zero():
        return p
    coeffs = list(p._terms.values())
    den = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in coeffs), 1)
    num = reduce(math.gcd, (abs(c.numerator) * (den // c.denominator) for c in coeffs), 0)
    scale = Fraction(den, num)
    if p._terms[max(p._terms)] < 0:
        scale = -scale
    return LaurentPoly._raw({e: c * scale for e, c in p._terms.items()}, p.nvars)


def _content_in(p: LaurentPoly, v: int) -> LaurentPoly:
    g = None
    for c in _coeffs_in(p, v).values():
        g = c if g is None else _poly_gcd(g, c)
        if g.is_constant():
            return LaurentPoly.constant(1, p.nvars)
    return _normalize(g)


def _prem(a: LaurentPoly, b: LaurentPoly, v: int) -> LaurentPoly:
    db = b.degree_in(v)
    lcb = _lc_in(b, v)
    r = a
    e = a.degree_in(v) - db + 1
    while not r.is_zero() and r.degree_in(v) >= db:
        t = _lc_in(r, v) * _var_power(v, r.degree_in(v) - db, a.nvars)
        r = lcb * r - t * b
        e -= 1
    return lcb**e * r


def _subresultant_gcd(a: LaurentPoly, b: LaurentPoly, v: int) -> LaurentPoly:
    """Last nonzero subresultant of two v-primitive polynomials."""
    one = LaurentPoly.constant(1, a.nvars)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    g = h = one
    while True:
        delta = a.degree_in(v) - b.degree_in(v)
        r = _prem(a, b, v)
        if r.is_zero():
            return b
        if r.degree_in(v) == 0:
            return one
        a, b = b, _poly_divexact(r, g * h**delta)
        g = _lc_in(a, v)
        if delta:
            h = _poly_divexact(g**delta, h ** (delta - 1))


def _poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if a.is_zero():
        return _normalize(b)
    if b.is_zero():
        return _normalize(a)
    if a.is_constant() or b.is_constant():
        return LaurentPoly.constant(1, a.nvars)
    va, vb = a.variables(), b.variables()
    v = min(va | vb)
    if v not in va:
        return _poly_gcd(a, _content_in(b, v))
    if v not in vb:
        return _poly_gcd(_content_in(a, v), b)
    ca, cb = _content_in(a, v), _content_in(b, v)
    c = _poly_gcd(ca, cb)
    g = _subresultant_gcd(_poly_divexact(a, ca), _poly_divexact(b, cb), v)
    if g.variables():
        g = _poly_divexact(g, _content_in(g, v))
    return _normalize(c * g)


def _strip_monomial(p: LaurentPoly) -> tuple[LaurentPoly, Exponent]:
    m = p.min_exponents()
    return p.shift(tuple(-x for x in m)), m


def gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Gcd in the Laurent ring, normalized to a primitive polynomial with no monomial factor."""
    if p.nvars != q.nvars:
        raise ValueError("dimension mismatch")
    if p.is_zero() and q.is_zero():
        return p
    if p.is_zero():
        return _normalize(_strip_monomial(q)[0])
    if q.is_zero():
        return _normalize(_strip_monomial(p)[0])
    return _poly_gcd(_strip_monomial(p)[0], _strip_monomial(q)[0])


# ---------------------------------------------------------------------------
# squarefree decomposition


class SquarefreeParts(NamedTuple):
    """P = unit * q**2 * d with d squarefree, primitive, positive, no monomial factor."""

    q: LaurentPoly
    d: LaurentPoly
    unit: LaurentPoly


def _sqf_list(p: LaurentPoly) -> list[tuple[LaurentPoly, int]]:
    """Squarefree factors (with multiplicity) of a primitive polynomial."""
    if p.is_constant():
        return []
    v = min(p.variables())
    cont = _content_in(p, v)
    pp = _poly_divexact(p, cont)
    out = _sqf_list(cont)
    dp = pp.derivative(v)
    a0 = _poly_gcd(pp, dp)
    b = _poly_divexact(pp, a0)
    c = _poly_divexact(dp, a0)
    d = c - b.derivative(v)
    i = 1
    while v in b.variables():
        a = _poly_gcd(b, d)
        if not a.is_constant():
            out.append((a, i))
        b = _poly_divexact(b, a)
        c = _poly_divexact(d, a)
        d = c - b.derivative(v)
        i += 1
    return out


def squarefree_decompose(p: LaurentPoly) -> SquarefreeParts:
    """Split P as unit * Q^2 * D with D squarefree over Q.

    The monomial content of P goes to Q (its even part) and to the unit
    (its odd part, with the rational constant).  D is primitive with a
    positive leading coefficient and no monomial factor.
    """
    if p.is_zero():
        raise ValueError("squarefree_decompose of zero")
    n = p.nvars
    body, m = _strip_monomial(p)
    prim = _normalize(body)
    q = LaurentPoly.monomial(tuple(x // 2 for x in m))
    d = LaurentPoly.constant(1, n)
    for f, mult in _sqf_list(prim):
        if mult // 2:
            q = q * f ** (mult // 2)
        if mult % 2:
            d = d * f
    d = _normalize(d)
    unit = p.divexact(q * q * d)
    if not unit.is_monomial():
        raise ArithmeticError("internal error: squarefree cofactor is not a unit")
    return SquarefreeParts(q, d, unit)


def ground_monomial(values: Sequence[LaurentPoly]) -> LaurentPoly:
    """Monic monomial t^m with m the componentwise minimum over all exponents."""
    if not values:
        raise ValueError("ground_monomial of an empty list")
    if any(v.is_zero() for v in values):
        raise ValueError("ground_monomial with a zero value")
    mins = [v.min_exponents() for v in values]
    return LaurentPoly.monomial(tuple(min(col) for col in zip(*mins)))


def support_exponents(p: LaurentPoly) -> tuple[list[LaurentPoly], frozenset[Exponent]]:
    return p.support_exponents()


def _int_matrix_inverse(v: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(v)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(v)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    inv = [row[n:] for row in a]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def unimodular_substitute(p: LaurentPoly, v: Sequence[Sequence[int]]) -> LaurentPoly:
    """Image of P under t = s^(V^-1): the exponent e maps to (V^-1)^T e."""
    n = p.nvars
    if len(v) != n or any(len(row) != n for row in v):
        raise ValueError("V must be a d x d integer matrix")
    w = _int_matrix_inverse(v)
    out = {}
    for e, c in p.items():
        out[tuple(sum(w[i][j] * e[i] for i in range(n)) for j in range(n))] = c
    return LaurentPoly._raw(out, n)


# ---------------------------------------------------------------------------
# fraction field


class RationalFunction:
    """Element num/den of the fraction field, kept in canonical form.

    Canonical form: gcd removed, den carries no monomial factor and its
    lexicographically largest coefficient is 1.  Equality is structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, nvars: int | None = None):
        if nvars is None:
            nvars = next((x.nvars for x in (num, den) if isinstance(x, LaurentPoly)), None)
            if nvars is None:
                raise ValueError("nvars required for constant rational functions")
        num = _as_poly(num, nvars)
        den = _as_poly(den, nvars)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, LaurentPoly.constant(1, nvars)
            return
        if den.is_monomial():
            self.num, self.den = num / den, LaurentPoly.constant(1, nvars)
            return
        den, m = _strip_monomial(den)
        num = num.shift(tuple(-x for x in m))
        nb, _ = _strip_monomial(num)
        if not nb.is_constant():
            g = _poly_gcd(nb, den)
            if not g.is_constant():
                num, den = num.divexact(g), den.divexact(g)
        lc = den.lead()[1]
        self.num, self.den = num / lc, den / lc

    @classmethod
    def _raw(cls, num: LaurentPoly, den: LaurentPoly) -> "RationalFunction":
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == 1

    def is_constant(self) -> bool:
        return self.den == 1 and self.num.is_constant()

    def is_monomial(self) -> bool:
        return self.den == 1 and self.num.is_monomial()

    def as_poly(self) -> LaurentPoly:
        if self.den != 1:
            raise ValueError("not a Laurent polynomial")
        return self.num

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.nvars != self.nvars:
                raise ValueError("dimension mismatch")
            return other
        if isinstance(other, (int, Fraction, LaurentPoly)):
            return RationalFunction._raw(_as_poly(other, self.nvars), LaurentPoly.constant(1, self.nvars))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == 1 and o.den == 1:
            return RationalFunction._raw(self.num * o.num, self.den)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction(self.den**-k, self.num**-k)
        return RationalFunction._raw(self.num**k, self.den**k) if self.den == 1 else RationalFunction(
            self.num**k, self.den**k
        )

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, LaurentPoly)):
            return self.den == 1 and self.num == other
        return NotImplemented

    def __hash__(self):
        if self.den == 1:
            return hash(self.num)
        return hash((self.num, self.den))

    def evaluate(self, point: Sequence):
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    def format(self, names: Sequence[str] | None = None) -> str:
        if self.den == 1:
            return format_poly(self.num, names)
        return f"({format_poly(self.num, names)})/({format_poly(self.den, names)})"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RationalFunction({self.format()!r})"


def _as_poly(x, nvars: int) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        if x.nvars != nvars:
            raise ValueError("dimension mismatch")
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.constant(x, nvars)
    raise TypeError(f"cannot use {type(x).__name__} as a Laurent polynomial")


# ---------------------------------------------------------------------------
# square roots in the base field


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def rational_sqrt(x: Fraction) -> Fraction | None:
    x = Fraction(x)
    a, b = _isqrt_exact(x.numerator), _isqrt_exact(x.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def _reduce_integer_radicand(n: int) -> tuple[int, int]:
    """Write n = s^2 * r, removing square factors of small primes and exact squares."""
    if n == 0:
        return 0, 0
    s, r = 1, n
    p = 2
    while p * p <= abs(r) and p < 1000:
        while r % (p * p) == 0:
            r //= p * p
            s *= p
        p += 1
    root = _isqrt_exact(abs(r))
    if root is not None and root > 1:
        s *= root
        r //= root * root
    return s, r


def sqrt_split(x):
    """Write x = coef^2 * radicand with a reduced radicand (1 for perfect squares).

    Works for Fraction, LaurentPoly and RationalFunction values.  The radicand
    is squarefree as a polynomial; its rational constant is reduced by
    removing small square factors only, which is enough for deciding
    squareness since a perfect square always reduces to 1.
    """
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x == 0:
            return Fraction(0), Fraction(1)
        s, r = _reduce_integer_radicand(x.numerator * x.denominator)
        return Fraction(s, x.denominator), Fraction(r)
    if isinstance(x, RationalFunction):
        if x.den == 1:
            return sqrt_split(x.num)
        coef, rad = sqrt_split(x.num * x.den)
        return coef / x.den, rad
    if isinstance(x, LaurentPoly):
        n = x.nvars
        if x.is_zero():
            return x, LaurentPoly.constant(1, n)
        parts = squarefree_decompose(x)
        e, c = next(iter(parts.unit.items()))
        s, r = _reduce_integer_radicand(c.numerator * c.denominator)
        half = tuple(v // 2 for v in e)
        odd = tuple(v % 2 for v in e)
        coef = parts.q.shift(half) * Fraction(s, c.denominator)
        rad = parts.d.shift(odd) * r
        return coef, rad
    raise TypeError(f"sqrt_split unsupported for {type(x).__name__}")


def base_sqrt(x):
    """Exact square root in the base field, or None."""
    coef, rad = sqrt_split(x)
    if rad == 1:
        return coef
    return None


# ---------------------------------------------------------------------------
# text syntax

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def default_names(nvars: int) -> tuple[str, ...]:
    return tuple(f"t{i + 1}" for i in range(nvars))


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: LaurentPoly, names: Sequence[str] | None = None) -> str:
    """Canonical text: terms in decreasing lex order, e.g. ``3*t1^2*t2^-1 + 1``."""
    names = tuple(names) if names else default_names(p.nvars)
    if p.is_zero():
        return "0"
    parts = []
    for e, c in sorted(p.items(), reverse=True):
        factors = []
        for name, k in zip(names, e):
            if k == 1:
                factors.append(name)
            elif k:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if not factors:
            body = _fmt_coef(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_fmt_coef(mag)] + factors)
        parts.append(("-" if c < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class _Parser:
    def __init__(self, text: str, nvars: int, names: Sequence[str], symbols: Mapping[str, object]):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
            self.tokens.append(m.group(1) or m.group(2) or m.group(3))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0
        self.nvars = nvars
        self.vars = {name: LaurentPoly.var(k, nvars) for k, name in enumerate(names)}
        if nvars == 1 and "t" not in self.vars and "t" not in symbols:
            self.vars["t"] = LaurentPoly.var(0, 1)
        self.symbols = dict(symbols)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected or 'token'}, found {tok!r}")
        self.i += 1
        return tok

    def parse(self):
        value = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input at {self.peek()!r}")
        return value

    def expr(self):
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.power()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.power()
            value = value * rhs if op == "*" else value / rhs
        return value

    def power(self):
        base = self.atom()
        if self.peek() in ("^", "**"):
            self.take()
            sign = 1
            if self.peek() == "(":
                self.take("(")
                while self.peek() in ("+", "-"):
                    sign = -sign if self.take() == "-" else sign
                k = int(self.take())
                self.take(")")
            else:
                while self.peek() in ("+", "-"):
                    sign = -sign if self.take() == "-" else sign
                tok = self.take()
                if not tok.isdigit():
                    raise ValueError(f"exponent must be an integer, found {tok!r}")
                k = int(tok)
            return base ** (sign * k)
        return base

    def atom(self):
        tok = self.take()
        if tok == "(":
            value = self.expr()
            self.take(")")
            return value
        if tok == "-":
            return -self.power()
        if tok.isdigit():
            return Fraction(int(tok))
        if tok in self.vars:
            return self.vars[tok]
        if tok in self.symbols:
            return self.symbols[tok]
        raise ValueError(f"unknown symbol {tok!r}")


def parse_expression(text: str, nvars: int, names: Sequence[str] | None = None, symbols=None):
    """Parse an arithmetic expression over the variables; returns an exact value."""
    names = tuple(names) if names else default_names(nvars)
    if len(names) != nvars:
        raise ValueError("number of names must equal nvars")
    value = _Parser(text, nvars, names, symbols or {}).parse()
    if isinstance(value, (int, Fraction)):
        return LaurentPoly.constant(value, nvars)
    return value


def parse_poly(text: str, nvars: int, names: Sequence[str] | None = None) -> LaurentPoly:
    value = parse_expression(text, nvars, names)
    if isinstance(value, RationalFunction):
        if value.den != 1:
            raise ValueError(f"{text!r} is not a Laurent polynomial")
        value = value.num
    if not isinstance(value, LaurentPoly):
        raise ValueError(f"{text!r} is not a Laurent polynomial")
    return value


def parse_rational_function(text: str, nvars: int, names: Sequence[str] | None = None) -> RationalFunction:
    value = parse_expression(text, nvars, names)
    if isinstance(value, LaurentPoly):
        return RationalFunction(value, 1)
    if isinstance(value, RationalFunction):
        return value
    raise ValueError(f"{text!r} is not a rational function")


def lcm_denominators(values: Iterable[Fraction]) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), (Fraction(v).denominator for v in values), 1)


def unit_normal(p: LaurentPoly) -> LaurentPoly:
    """Representative of P modulo units: no monomial factor, primitive, positive lead."""
    if p.is_zero():
        return p
    return _normalize(_strip_monomial(p)[0])


def _int_root(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        return None
    lo, hi = 0, 1
    while hi**k < n:
        hi *= 2
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid**k
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def rational_root(x: Fraction, k: int) -> Fraction | None:
    """Exact real k-th root of a rational, or None (odd k keeps the sign)."""
    x = Fraction(x)
    if x < 0:
        if k % 2 == 0:
            return None
        r = rational_root(-x, k)
        return -r if r is not None else None
    a, b = _int_root(x.numerator, k), _int_root(x.denominator, k)
    if a is None or b is None:
        return None
    return Fraction(a, b)
