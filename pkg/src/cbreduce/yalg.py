"""Y-terms: A/B/F-terms, roots, local transformations, identities,
squarefree classification, reconstruction from D and root disambiguation."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import gcd as igcd
from typing import NamedTuple, Sequence

from .exactmat import ExactMatrix, SubsetIndex, minor
from .expansion import ChiTriple, TermMap, all_contexts, as_poly, chi_triple, monomial_data
from .laurent import LaurentPoly, lcm_denominators, rational_root, squarefree_decompose, unit_normal
from .matroid import exchange
from .quadext import QuadExt, simplify


class InconsistentData(ValueError):
    """The data cannot come from a genuine pair of matrices."""


def c1c2(i: int, j: int, alpha: int, beta: int) -> int:
    """-sign[(i-alpha)(i-beta)(j-alpha)(j-beta)]."""
    return -1 if (i - alpha) * (i - beta) * (j - alpha) * (j - beta) > 0 else 1


@dataclass(frozen=True)
class YTerm:
    value: object
    base: SubsetIndex
    i: int
    j: int
    alpha: int
    beta: int

    @property
    def sign(self) -> int:
        return c1c2(self.i, self.j, self.alpha, self.beta)

    @property
    def context(self) -> tuple:
        return self.base, self.i, self.j, self.alpha, self.beta


def y_from_matrix(r: ExactMatrix, base, i: int, j: int, alpha: int, beta: int) -> YTerm:
    """c1c2 Delta_R(I^i_alpha) Delta_R(I^j_beta) / (Delta_R(I^i_beta) Delta_R(I^j_alpha))."""
    base = tuple(sorted(base))
    num = minor(r, exchange(base, i, alpha)) * minor(r, exchange(base, j, beta))
    den = minor(r, exchange(base, i, beta)) * minor(r, exchange(base, j, alpha))
    if den == 0:
        raise ZeroDivisionError(f"vanishing R-minor in the window {base}, {(i, j, alpha, beta)}")
    value = simplify(num / den)
    return YTerm(value if c1c2(i, j, alpha, beta) > 0 else -value, base, i, j, alpha, beta)


def transform_y(y: YTerm, op: str) -> YTerm:
    """Local transformations: invert (alpha <-> beta), vertical and diagonal."""
    v = y.value
    if op == "invert":
        return YTerm(simplify(1 / v), y.base, y.i, y.j, y.beta, y.alpha)
    if op == "vertical":
        return YTerm(simplify(-v - 1), exchange(y.base, y.i, y.alpha), y.alpha, y.j, y.i, y.beta)
    if op == "diagonal":
        if v == 0 or v == -1:
            raise ZeroDivisionError("diagonal transformation needs Y not in {0, -1}")
        return YTerm(simplify(-1 / (1 + 1 / v)), exchange(y.base, y.i, y.beta), y.beta, y.j, y.alpha, y.i)
    raise ValueError(f"unknown transformation {op!r}")


def check_identities(r: ExactMatrix, base, indices: Sequence[int]) -> dict[str, object]:
    """Residuals of the associativity, quadrilateral, vertical and diagonal identities.

    ``indices`` is (i, j, m, alpha, beta, gamma) with i, j, m in the basis and
    alpha, beta, gamma outside it.
    """
    i, j, m, a, b, g = indices

    def y(bs, *idx):
        return y_from_matrix(r, bs, *idx).value

    base = tuple(sorted(base))
    yab = y(base, i, j, a, b)
    return {
        "assoc_lower": simplify(yab * y(base, i, j, b, g) + y(base, i, j, a, g)),
        "assoc_upper": simplify(y(base, i, m, a, b) * y(base, m, j, a, b) + yab),
        "quadrilateral": simplify(
            yab + y(base, i, m, a, g) * y(base, m, j, a, g) * y(base, i, m, g, b) * y(base, m, j, g, b)
        ),
        "vertical": simplify(y(exchange(base, i, a), a, j, i, b) + yab + 1),
        "diagonal": simplify(y(exchange(base, i, b), b, j, a, i) + 1 / (1 + 1 / yab)),
    }


# A/B-terms and roots


def b_function(x, y, z):
    return (x - y - z) ** 2 - 4 * y * z


@dataclass(frozen=True)
class ABData:
    chi: ChiTriple
    a: LaurentPoly
    b: LaurentPoly
    ground: LaurentPoly
    q: LaurentPoly
    d: LaurentPoly
    kind: str
    config_type: str | None
    config_class: str | None
    proportional: tuple[tuple[int, int], ...] = ()

    @property
    def omega(self) -> int:
        return len(self.d.support())


def _poly_values(chi: ChiTriple) -> list[LaurentPoly]:
    try:
        return [as_poly(v, chi.nvars) for v in chi.values]
    except ValueError:
        raise ValueError("A/B-terms need Laurent polynomial h-values") from None


def ab_terms(chi: ChiTriple) -> ABData:
    if not chi.observable:
        raise ValueError(f"context {chi.context} is not observable")
    central, second, third = _poly_values(chi)
    n = chi.nvars
    a = central - second - third
    b = a * a - 4 * second * third
    ground = chi.ground()
    one = LaurentPoly.constant(1, n)
    if b.is_zero():
        q, d, unit = LaurentPoly.zero(n), one, one
    else:
        q, d, unit = squarefree_decompose(b)
    roots = y_roots(chi)
    if any(isinstance(rt.value, QuadExt) for rt in roots):
        kind = "Radical"
    elif all(monomial_data(rt.value, n) is not None and not any(monomial_data(rt.value, n)[1]) for rt in roots):
        kind = "ConstantY"
    else:
        kind = "RationalY"
    omega = len(d.support())
    if omega <= 1:
        ctype, cclass = None, None
    elif omega == 2:
        ctype, cclass = "S", None
    else:
        ctype, cclass = "G", ("I" if q.is_monomial() else "II")
    prop = []
    vals = [central, second, third]
    for u, w in combinations(range(3), 2):
        if vals[u].is_monomial() and vals[w].is_monomial() and vals[u].exponent() == vals[w].exponent():
            prop.append((u + 1, w + 1))
    return ABData(chi, a, b, ground, q, d, kind, ctype, cclass, tuple(prop))


def y_roots(chi: ChiTriple) -> tuple[YTerm, ...]:
    """Roots of third*X^2 - A*X + second (one root in the degenerate linear case)."""
    central, second, third = chi.values
    if not chi.observable:
        raise ValueError(f"context {chi.context} is not observable")
    a = central - second - third

    def term(v):
        return YTerm(simplify(v), chi.base, chi.i, chi.j, chi.alpha, chi.beta)

    if third == 0:
        if a == 0:
            raise InconsistentData(f"F-polynomial is a nonzero constant at {chi.context}")
        return (term(second / a),)
    disc = a * a - 4 * second * third
    if isinstance(disc, QuadExt):
        raise ValueError("B-term outside the base field")
    if disc == 0:
        r = term(a / (2 * third))
        return r, r
    s = QuadExt.sqrt(simplify(disc))
    return term((a + s) / (2 * third)), term((a - s) / (2 * third))


def _order_key(v):
    if isinstance(v, Fraction):
        return (0, v, "")
    return (1, Fraction(0), str(v))


def _dedupe(values) -> list:
    out = []
    for v in values:
        if not any(v == w for w in out):
            out.append(v)
    return out


def admissible_roots(chi: ChiTriple) -> list:
    """Distinct roots other than 0 and -1, sorted deterministically."""
    vals = [rt.value for rt in y_roots(chi)]
    return sorted(_dedupe(v for v in vals if v != 0 and v != -1), key=_order_key)


# entropy resonance


def resonance_constant(d1: int, d2: int) -> Fraction:
    return Fraction(d1 - d2, d1) ** (-2 * (d1 - d2)) * Fraction(d2, d1) ** (-2 * d2)


def resonance_check(e1, e2, e3, d1: int, d2: int) -> bool:
    """E2^d1 / (E3^(d1-d2) E1^d2) equals the binary-entropy constant."""
    if not (isinstance(d1, int) and isinstance(d2, int) and d1 > d2 > 0):
        raise ValueError("need integers d1 > d2 > 0")
    nv = max((x.nvars for x in (e1, e2, e3) if isinstance(x, LaurentPoly)), default=0)
    m = [monomial_data(x, nv) for x in (e1, e2, e3)]
    if any(x is None for x in m):
        raise ValueError("resonance_check needs monomials")
    (g1, x1), (g2, x2), (g3, x3) = m
    if any(d1 * b - (d1 - d2) * c - d2 * a for a, b, c in zip(x1, x2, x3)):
        return False
    return g2**d1 / (g3 ** (d1 - d2) * g1**d2) == resonance_constant(d1, d2)


# reconstruction of configurations from D


class Candidate(NamedTuple):
    triple: tuple[LaurentPoly, LaurentPoly, LaurentPoly]
    config_class: str
    q: LaurentPoly


class Reconstruction(NamedTuple):
    candidates: list[Candidate]
    unrealized: list[str]


def normalize_triple(triple: Sequence[LaurentPoly]) -> tuple:
    """Canonical representative of a monomial triple modulo a common unit.

    The ground monomial is divided out and the coefficients are scaled to
    coprime integers with the sign fixed by the first entry in exponent order.
    """
    mons = [monomial_data(x, x.nvars) for x in triple]
    if any(m is None for m in mons):
        raise ValueError("triple entries must be monomials")
    low = tuple(min(col) for col in zip(*(e for _, e in mons)))
    den = lcm_denominators(c for c, _ in mons)
    nums = [int(c * den) for c, _ in mons]
    g = 0
    for x in nums:
        g = igcd(g, abs(x))
    keys = []
    for s in (1, -1):
        key = tuple(sorted((tuple(a - b for a, b in zip(e, low)), Fraction(s * x, g)) for x, (_, e) in zip(nums, mons)))
        keys.append(key)
    positive = [k for k in keys if k[0][1] > 0]
    return min(positive or keys)


def triple_from_key(key, nvars: int) -> tuple[LaurentPoly, ...]:
    return tuple(LaurentPoly.monomial(e, c) for e, c in key)


def _univariate_b(triple) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    (c1, k1), (c2, k2), (c3, k3) = triple
    terms = [(c1 * c1, 2 * k1), (c2 * c2, 2 * k2), (c3 * c3, 2 * k3),
             (-2 * c1 * c2, k1 + k2), (-2 * c1 * c3, k1 + k3), (-2 * c2 * c3, k2 + k3)]
    for c, k in terms:
        out[k] = out.get(k, Fraction(0)) + c
    return {k: c for k, c in out.items() if c}


def _collinear(d: LaurentPoly):
    """(g, {position: coefficient}) when Supp(D) lies on a lattice line, else None."""
    exps = sorted(d.support())
    v0 = exps[0]
    diffs = [tuple(a - b for a, b in zip(e, v0)) for e in exps[1:]]
    first = diffs[0]
    g0 = 0
    for x in first:
        g0 = igcd(g0, abs(x))
    g = tuple(x // g0 for x in first)
    pos = {0: d.coefficient(v0)}
    for e, dv in zip(exps[1:], diffs):
        ratios = {Fraction(a, b) for a, b in zip(dv, g) if b}
        if len(ratios) != 1 or any(a and not b for a, b in zip(dv, g)):
            return None
        m = ratios.pop()
        if m.denominator != 1:
            return None
        pos[int(m)] = d.coefficient(e)
    low = min(pos)
    return g, {k - low: c for k, c in pos.items()}


def _reverse(p: dict[int, Fraction]) -> dict[int, Fraction]:
    top = max(p)
    return {top - k: c for k, c in p.items()}


def _case_distinct(p: dict[int, Fraction]) -> list:
    n = max(p)
    if n % 2 or len(p) < 3:
        return []
    lam = 1 / p[0]
    low = min(k for k in p if k > 0)
    top = n // 2
    if low >= top:
        return []
    root = rational_root(lam * p[n], 2)
    if root is None:
        return [("irrational", "top coefficient is not a rational square")]
    c_low = -lam * p[low] / 2
    return [((Fraction(1), 0), (c_low, low), (s * root, top)) for s in (1, -1)]


def _case_low_pair(p: dict[int, Fraction]) -> list:
    n = max(p)
    if n % 2 or set(p) - {0, n // 2, n} or n == 0:
        return []
    k = n // 2
    p0, pk, pn = p[0], p.get(k, Fraction(0)), p[n]
    rho = rational_root(pn / p0, 2)
    if rho is None:
        return [("irrational", "extreme coefficient ratio is not a rational square")]
    out = []
    for sigma in (1, -1):
        w = sigma * pk / (2 * abs(p0) * rho)
        if w == -1:
            continue
        c1 = (w - 1) / (w + 1)
        if c1 == 0:
            continue
        lam = (1 - c1) ** 2 / p0
        if c1 == -1:
            c2s = [s * rational_root(lam * pn, 2) for s in (1, -1)] if rational_root(lam * pn, 2) else []
        else:
            c2s = [-lam * pk / (2 * (1 + c1))]
        out.extend(((Fraction(1), 0), (c1, 0), (c2, k)) for c2 in c2s)
    return out


def _family_b(a: int, b: int) -> LaurentPoly:
    rho = Fraction(b, a)
    u = LaurentPoly.var(0, 1)
    return b_function(rho * rho * u**a, u**b, LaurentPoly.constant((1 - rho) ** 2, 1))


def _case_class_two(p: dict[int, Fraction]) -> list:
    n = max(p)
    out = []
    for a in range(2, n // 2 + 2):
        if n % (2 * a - 2):
            continue
        gp = n // (2 * a - 2)
        for b in range(1, a):
            if igcd(a, b) != 1:
                continue
            d_f = squarefree_decompose(_family_b(a, b)).d
            df = {e[0]: c for e, c in d_f.items()}
            if max(df) != 2 * a - 2 or min(df) != 0:
                continue
            ratio = (p[n] / p[0]) / (df[2 * a - 2] / df[0])
            lam = rational_root(ratio, 2 * a - 2)
            if lam is None:
                continue
            for s in (1, -1):
                lm = s * lam
                image = {k * gp: c * lm**k for k, c in df.items()}
                scale = p[0] / image[0]
                if {k: c * scale for k, c in image.items()} != p:
                    continue
                rho = Fraction(b, a)
                out.append(((rho * rho * lm**a, a * gp), (lm**b, b * gp), ((1 - rho) ** 2, 0)))
    return out


def _s_type(d: LaurentPoly) -> tuple[list, list[str]]:
    (e1, c1), (e2, c2) = sorted(d.items())
    nv = d.nvars
    out, notes = [], []
    for (ea, ca), (eb, cb) in (((e1, c1), (e2, c2)), ((e2, c2), (e1, c1))):
        x = LaurentPoly.monomial(ea, ca)
        y = LaurentPoly.monomial(eb, cb)
        out.append((x / 4, x / 4, -y))
    kappa = c2 / c1
    half = [a - b for a, b in zip(e2, e1)]
    root = rational_root(kappa, 2)
    if root is None or any(x % 2 for x in half):
        notes.append("S-type sets with c_S = -1 need a square root of the ratio of the two terms of D")
    else:
        one = LaurentPoly.constant(1, nv)
        f = LaurentPoly.monomial(tuple(x // 2 for x in half), root)
        out.append((one / 2, -one / 2, f))
        out.append((one, f / 2, -f / 2))
    return out, notes


def _triangle(d: LaurentPoly) -> list:
    exps = sorted(d.support())
    if len(exps) != 6:
        return []
    sup = set(exps)
    out = []
    for v1, v2, v3 in combinations(exps, 3):
        mids = []
        for a, b in ((v1, v2), (v1, v3), (v2, v3)):
            s = [x + y for x, y in zip(a, b)]
            if any(x % 2 for x in s):
                break
            mids.append(tuple(x // 2 for x in s))
        else:
            if set(mids) | {v1, v2, v3} != sup:
                continue
            lam = 1 / d.coefficient(v1)
            e2 = tuple((x - y) // 2 for x, y in zip(v2, v1))
            e3 = tuple((x - y) // 2 for x, y in zip(v3, v1))
            out.append((
                LaurentPoly.constant(1, d.nvars),
                LaurentPoly.monomial(e2, -lam * d.coefficient(mids[0]) / 2),
                LaurentPoly.monomial(e3, -lam * d.coefficient(mids[1]) / 2),
            ))
    return out


def reconstruct_from_D(d: LaurentPoly, class_hint: str | None = None) -> Reconstruction:
    """Monomial configurations (E1, E2, E3), up to a common unit, whose B-term has squarefree part D."""
    if d.is_zero() or len(d.support()) < 2:
        raise ValueError("D needs at least two terms")
    if not squarefree_decompose(d).q.is_constant():
        raise ValueError("D is not squarefree")
    nv = d.nvars
    target = unit_normal(d)
    raw, notes = [], []
    if len(d.support()) == 2:
        raw, notes = _s_type(d)
    else:
        line = _collinear(d)
        if line is None:
            raw = _triangle(d)
        else:
            g, p = line
            found = []
            for orient, poly in ((1, p), (-1, _reverse(p))):
                for case in (_case_distinct, _case_low_pair, _case_class_two):
                    for item in case(poly):
                        if item[0] == "irrational":
                            notes.append(f"{case.__name__[6:]}: {item[1]}")
                            continue
                        found.append((orient, item))
            for orient, triple in found:
                raw.append(tuple(LaurentPoly.monomial(tuple(orient * k * x for x in g), c) for c, k in triple))
    seen, out = set(), []
    for triple in raw:
        b = b_function(*triple)
        if b.is_zero():
            continue
        parts = squarefree_decompose(b)
        if unit_normal(parts.d) != target:
            continue
        cls = "S" if len(d.support()) == 2 else ("I" if parts.q.is_monomial() else "II")
        if class_hint and cls != class_hint:
            continue
        key = normalize_triple(triple)
        if key in seen:
            continue
        seen.add(key)
        out.append(Candidate(triple_from_key(key, nv), cls, parts.q))
    return Reconstruction(out, sorted(set(notes)))


# global root disambiguation


def _canon(base, i, j, a, b) -> tuple[tuple, int]:
    e = 1
    if i > j:
        i, j, e = j, i, -e
    if a > b:
        a, b, e = b, a, -e
    return (tuple(base), i, j, a, b), e


def _pw(v, e):
    return v if e > 0 else 1 / v


def build_relations(n: int, k: int) -> list[tuple[str, tuple]]:
    """Associativity and vertical relations among canonical Y contexts."""
    rels = []
    for base in combinations(range(1, n + 1), k):
        rest = [x for x in range(1, n + 1) if x not in base]
        for i, j in combinations(base, 2):
            for a, b, c in combinations(rest, 3):
                rels.append(("mul", (((base, i, j, a, b), 1), ((base, i, j, b, c), 1), ((base, i, j, a, c), 1))))
        for a, b in combinations(rest, 2):
            for i, m, j in combinations(base, 3):
                rels.append(("mul", (((base, i, m, a, b), 1), ((base, m, j, a, b), 1), ((base, i, j, a, b), 1))))
        for i, j in combinations(base, 2):
            for a, b in combinations(rest, 2):
                for ii, jj, aa, bb in ((i, j, a, b), (j, i, a, b), (i, j, b, a), (j, i, b, a)):
                    lhs = _canon(exchange(base, ii, aa), aa, jj, ii, bb)
                    rhs = _canon(base, ii, jj, aa, bb)
                    rels.append(("vert", (lhs, rhs)))
    return rels


def _valid(v) -> bool:
    return v is not None and v != 0 and v != -1


def _solve_one(kind: str, vals: list, idx: int, exps: list):
    """Value of variable idx given the others, or None if undefined."""
    try:
        if kind == "vert":
            other = vals[1 - idx]
            return simplify(_pw(-1 - _pw(other, exps[1 - idx]), exps[idx]))
        a, b, c = vals
        ea, eb, ec = exps
        if idx == 2:
            return simplify(_pw(-_pw(a, ea) * _pw(b, eb), ec))
        known, kexp = (b, eb) if idx == 0 else (a, ea)
        return simplify(_pw(-_pw(c, ec) / _pw(known, kexp), exps[idx]))
    except (ZeroDivisionError, ValueError):
        return None


def _holds(kind: str, vals: list, exps: list) -> bool:
    """Relation residual is zero; values from different quadratic fields never satisfy it."""
    try:
        if kind == "vert":
            return _pw(vals[0], exps[0]) + _pw(vals[1], exps[1]) + 1 == 0
        return _pw(vals[0], exps[0]) * _pw(vals[1], exps[1]) + _pw(vals[2], exps[2]) == 0
    except ValueError:
        return False


@dataclass
class Disambiguation:
    seed: tuple
    choice: int
    values: dict
    unresolved: list = field(default_factory=list)
    branches: int = 0

    def y(self, base, i: int, j: int, alpha: int, beta: int):
        key, e = _canon(tuple(sorted(base)), i, j, alpha, beta)
        v = self.values.get(key)
        if v is None:
            return None
        return v if e > 0 else simplify(1 / v)


def _propagate(cand: dict, rels: list, by_var: dict, start) -> None:
    queue = deque(start)
    queued = set(queue)
    while queue:
        r = queue.popleft()
        queued.discard(r)
        kind, terms = rels[r]
        keys = [t[0] for t in terms]
        exps = [t[1] for t in terms]
        sets = [cand[kk] for kk in keys]
        free = [p for p, s in enumerate(sets) if s is None]
        if len(free) > 1:
            continue
        options = [s if s is not None else [None] for s in sets]
        survivors = []
        for combo in product(*options):
            vals = list(combo)
            if free:
                v = _solve_one(kind, vals, free[0], exps)
                if not _valid(v):
                    continue
                vals[free[0]] = v
            elif not _holds(kind, vals, exps):
                continue
            survivors.append(vals)
        if not survivors:
            raise InconsistentData(f"no consistent Y values for relation {kind} on {keys}")
        for p, kk in enumerate(keys):
            new = _dedupe(v[p] for v in survivors)
            old = cand[kk]
            if old is None or len(new) < len(old):
                cand[kk] = sorted(new, key=_order_key)
                for r2 in by_var[kk]:
                    if r2 != r and r2 not in queued:
                        queue.append(r2)
                        queued.add(r2)


def _search(cand: dict, rels: list, by_var: dict, start, observable: list, budget: list) -> dict:
    _propagate(cand, rels, by_var, start)
    open_ = [kk for kk in observable if len(cand[kk]) > 1]
    if not open_:
        return cand
    kk = open_[0]
    last = None
    for v in cand[kk]:
        if budget[0] <= 0:
            break
        budget[0] -= 1
        trial = dict(cand)
        trial[kk] = [v]
        try:
            return _search(trial, rels, by_var, by_var[kk], observable, budget)
        except InconsistentData as exc:
            last = exc
    raise last or InconsistentData("search budget exhausted")


def disambiguate_roots(h: TermMap, matroid=None, choice: int = 0, max_branches: int = 64) -> Disambiguation:
    """Fix one root at the seed context and propagate through the Y identities.

    ``choice`` selects the seed root (0 or 1); the two choices correspond to
    exchanging the roles of the two factors.  Raises InconsistentData when no
    consistent assignment exists.
    """
    n, k = h.n, h.k
    cand: dict = {}
    observable = []
    seed = None
    for ctx in all_contexts(n, k):
        chi = chi_triple(h, *ctx)
        if not chi.observable:
            cand[ctx] = None
            continue
        try:
            roots = admissible_roots(chi)
        except InconsistentData:
            raise
        if not roots:
            raise InconsistentData(f"only forbidden roots at {ctx}")
        cand[ctx] = roots
        observable.append(ctx)
        if seed is None and len(roots) == 2:
            seed = ctx
    rels = build_relations(n, k)
    by_var: dict = {kk: [] for kk in cand}
    for r, (_, terms) in enumerate(rels):
        for kk, _ in terms:
            by_var[kk].append(r)
    if seed is not None:
        cand[seed] = [cand[seed][choice]]
    budget = [max_branches]
    solved = _search(cand, rels, by_var, range(len(rels)), observable, budget)
    values = {kk: v[0] for kk, v in solved.items() if v is not None and len(v) == 1}
    unresolved = sorted(kk for kk, v in solved.items() if v is None or len(v) != 1)
    return Disambiguation(seed, choice, values, unresolved, max_branches - budget[0])
