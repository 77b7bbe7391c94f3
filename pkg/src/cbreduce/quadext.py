"""Elements rat + rad*sqrt(disc) of a quadratic extension of the base field.

The base field is Q (``Fraction``) or the Laurent fraction field
(``RationalFunction``).  Arithmetic results whose radical part vanishes are
returned as plain base-field elements, so radical values only persist where
they are genuinely needed.
"""

from __future__ import annotations

from fractions import Fraction

from .laurent import LaurentPoly, RationalFunction, base_sqrt, sqrt_split

BASE_TYPES = (int, Fraction, LaurentPoly, RationalFunction)


def _base(x):
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, LaurentPoly):
        return RationalFunction(x, 1)
    return x


def _is_zero(x) -> bool:
    return x == 0


class QuadExt:
    __slots__ = ("rat", "rad", "disc")

    def __init__(self, rat, rad=0, disc=None):
        rad = _base(rad)
        if not _is_zero(rad) and disc is None:
            raise ValueError("a radical part needs a discriminant")
        if disc is not None and base_sqrt(_base(disc)) is not None:
            raise ValueError(f"discriminant {disc} is a perfect square")
        self.rat = _base(rat)
        self.rad = rad
        self.disc = _base(disc) if disc is not None else None

    @staticmethod
    def make(rat, rad, disc):
        """Build a value, collapsing to the base field when rad = 0."""
        if _is_zero(rad):
            return _base(rat)
        q = object.__new__(QuadExt)
        q.rat, q.rad, q.disc = _base(rat), _base(rad), disc
        return q

    @staticmethod
    def sqrt(x):
        """Square root of a base-field element: base element or radical value."""
        coef, radicand = sqrt_split(_base(x))
        if radicand == 1:
            return _base(coef)
        return QuadExt.make(0, coef, _base(radicand))

    def _align(self, other):
        """Return (rat, rad) of other expressed over this element's discriminant."""
        if isinstance(other, QuadExt):
            if other.disc == self.disc or _is_zero(other.rad):
                return other.rat, other.rad
            if self.disc is None:
                raise ValueError("radical operand needs a discriminant context")
            scale = base_sqrt(other.disc / self.disc)
            if scale is None:
                raise ValueError(f"mixing discriminants {self.disc} and {other.disc}")
            return other.rat, other.rad * scale
        if isinstance(other, BASE_TYPES):
            return _base(other), 0
        return None

    def __add__(self, other):
        if isinstance(other, QuadExt) and self.disc is None:
            return other + self.rat
        o = self._align(other)
        if o is None:
            return NotImplemented
        return QuadExt.make(self.rat + o[0], self.rad + o[1], self.disc)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt.make(-self.rat, -self.rad, self.disc)

    def __sub__(self, other):
        if isinstance(other, QuadExt) and self.disc is None:
            return (-other) + self.rat
        o = self._align(other)
        if o is None:
            return NotImplemented
        return QuadExt.make(self.rat - o[0], self.rad - o[1], self.disc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QuadExt) and self.disc is None:
            return other * self.rat
        o = self._align(other)
        if o is None:
            return NotImplemented
        a, b = self.rat, self.rad
        c, e = o
        return QuadExt.make(a * c + b * e * self.disc, a * e + b * c, self.disc)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadExt.make(self.rat, -self.rad, self.disc)

    def norm(self):
        return self.rat * self.rat - self.rad * self.rad * self.disc

    def inverse(self):
        n = self.norm()
        if _is_zero(n):
            raise ZeroDivisionError("division by zero")
        return QuadExt.make(self.rat / n, -self.rad / n, self.disc)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            return self * other.inverse()
        if isinstance(other, BASE_TYPES):
            if _is_zero(other):
                raise ZeroDivisionError("division by zero")
            o = _base(other)
            return QuadExt.make(self.rat / o, self.rad / o, self.disc)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, BASE_TYPES):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = 1, self
        while k:
            if k & 1:
                result = base * result
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            try:
                o = self._align(other)
            except ValueError:
                return False
            return self.rat == o[0] and self.rad == o[1]
        if isinstance(other, BASE_TYPES):
            return _is_zero(self.rad) and self.rat == _base(other)
        return NotImplemented

    def __hash__(self):
        if _is_zero(self.rad):
            return hash(self.rat)
        return hash(("quadext", self.rat))

    def __bool__(self):
        return not (_is_zero(self.rat) and _is_zero(self.rad))

    def format(self, names=None) -> str:
        return f"{fmt_base(self.rat, names)} + ({fmt_base(self.rad, names)})*sqrtD"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"QuadExt({self.format()!r}, disc={fmt_base(self.disc)})"


def fmt_base(x, names=None) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (LaurentPoly, RationalFunction)):
        return x.format(names)
    return str(x)


def fmt_value(x, names=None) -> str:
    if isinstance(x, QuadExt):
        return x.format(names)
    return fmt_base(_base(x), names)


def simplify(x):
    """Cheapest exact representation: Fraction, then LaurentPoly, then RationalFunction."""
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, LaurentPoly):
        return x.constant_value() if x.is_constant() else x
    if isinstance(x, RationalFunction):
        return simplify(x.as_poly()) if x.is_polynomial() else x
    if isinstance(x, QuadExt):
        return QuadExt.make(simplify(x.rat), simplify(x.rad), x.disc) if x.rad != 0 else simplify(x.rat)
    return x
