"""Unlabeled query protocol: simulated oracle, queries, decoding, labeling and
recovery of a matrix pair, plus the two-scalar integer shortcut."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Mapping, Sequence

from .exactmat import ExactMatrix, SubsetIndex, all_plucker_residuals
from .expansion import TermMap
from .matroid import Matroid, find_generic_columns
from .yalg import InconsistentData, c1c2, disambiguate_roots


class ProtocolError(ValueError):
    """A stage of the protocol rejected its input; ``stage`` names it."""

    def __init__(self, stage: str, message: str, witness=None):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.witness = witness


@dataclass(frozen=True)
class UnlabeledAnswer:
    t0: tuple[Fraction, ...]
    values: tuple[Fraction, ...]


@dataclass(frozen=True)
class Bounds:
    lam: Fraction
    mu: Fraction


@dataclass(frozen=True)
class RecoveredChain:
    decoded: dict[SubsetIndex, Fraction]
    chain: tuple[SubsetIndex | None, ...]
    thresholds: tuple[Fraction, ...]
    psi: dict[int, int] | None = None


@dataclass(frozen=True)
class DecompositionPair:
    a: ExactMatrix
    q: ExactMatrix
    gmap: dict[SubsetIndex, Fraction]
    witness: tuple = ()
    choice: int = 0


@dataclass
class ProtocolResult:
    induced: bool
    stage: str
    psi: dict[int, int] | None = None
    pair: DecompositionPair | None = None
    reason: str = ""
    t0: tuple = ()
    extra: dict = field(default_factory=dict)


# set maps


def induced_set_map(psi: Mapping[int, int], bases) -> dict[SubsetIndex, SubsetIndex]:
    return {s: tuple(sorted(psi[a] for a in s)) for s in bases}


def _t_power(t0: Sequence, s: SubsetIndex):
    out = Fraction(1)
    for a in s:
        out *= t0[a - 1]
    return out


def gmap_of(a: ExactMatrix, q: ExactMatrix) -> dict[SubsetIndex, Fraction]:
    """g(I) = Delta_a(I) Delta_q(I) on the bases of a."""
    ma, mq = a.maximal_minors(), q.maximal_minors()
    return {s: ma[s] * mq[s] for s in ma if ma[s] != 0}


def oracle_answer(a: ExactMatrix, q: ExactMatrix, set_map: Mapping, t0: Sequence) -> UnlabeledAnswer:
    """Sorted multiset {g(I) t0^Psi(I)} over the bases of a."""
    g = gmap_of(a, q)
    if set(set_map) != set(g) or set(set_map.values()) != set(g):
        raise ValueError("Psi is not a permutation of the bases of a")
    t0 = tuple(Fraction(x) for x in t0)
    return UnlabeledAnswer(t0, tuple(sorted(g[s] * _t_power(t0, set_map[s]) for s in g)))


def bounds_query(values: Sequence, integer: bool = False) -> Bounds:
    """Rational bracket lam < |v| < mu; ``integer`` uses lam = 1 and mu = 2 + max."""
    if not values:
        raise ValueError("empty answer")
    if any(v == 0 for v in values):
        raise ValueError("zero value in the answer")
    mags = [abs(Fraction(v)) for v in values]
    if integer:
        return Bounds(Fraction(1), 2 + max(mags))
    return Bounds(min(mags) / 2, 2 * max(mags))


def build_query(b: Bounds, n: int, k: int, g_size: int) -> tuple[int, ...]:
    """Least integers t_1 = 1 < t_2 < ... with t_{s+1} t_1^(k-1) t_s^(-k) > (2#G - 1) mu / lam."""
    bound = (2 * g_size - 1) * b.mu / b.lam
    t = [1]
    for _ in range(n - 1):
        need = bound * t[-1] ** k
        t.append(need.numerator // need.denominator + 1)
    return tuple(t)


def separation_holds(t0: Sequence, b: Bounds, k: int, g_size: int) -> bool:
    bound = (2 * g_size - 1) * b.mu / b.lam
    return all(Fraction(t0[s + 1]) * Fraction(t0[0]) ** (k - 1) / Fraction(t0[s]) ** k > bound for s in range(len(t0) - 1))


# decoding and the chain


def _decode_value(v: Fraction, t0: Sequence, b: Bounds, k: int) -> SubsetIndex | None:
    """Exponent set A with lam t0^A <= |v| < mu t0^A, by greedy choice of the largest element."""
    mag = abs(v)
    chosen: list[int] = []
    top = len(t0)
    for size in range(k, 0, -1):
        low = _t_power(t0, tuple(range(1, size)))
        z = None
        for s in range(top, size - 1, -1):
            if b.lam * low * t0[s - 1] <= mag:
                z = s
                break
        if z is None:
            return None
        chosen.append(z)
        mag = mag / t0[z - 1]
        top = z - 1
    a = tuple(sorted(chosen))
    mag = abs(v) / _t_power(t0, a)
    return a if b.lam <= mag < b.mu else None


def decode_answer(answer: UnlabeledAnswer, b: Bounds, k: int) -> dict[SubsetIndex, Fraction]:
    out: dict[SubsetIndex, Fraction] = {}
    for v in answer.values:
        a = _decode_value(v, answer.t0, b, k)
        if a is None:
            raise ProtocolError("decode", f"value {v} matches no exponent set")
        if a in out:
            raise ProtocolError("decode", f"two values decode to the exponent set {a}")
        out[a] = v / _t_power(answer.t0, a)
    return out


def _chain(decoded: Mapping[SubsetIndex, Fraction], t0: Sequence, b: Bounds, n: int, k: int):
    weight = {s: abs(g) * _t_power(t0, s) for s, g in decoded.items()}
    order = sorted(weight, key=weight.get)
    chain, thresholds = [order[0]], []
    for u in range(k, n + 1):
        t_u = b.mu * _t_power(t0, tuple(range(u - k + 1, u + 1)))
        thresholds.append(t_u)
        chain.append(next((s for s in order if weight[s] > t_u), None))
    return tuple(chain), tuple(thresholds)


def _label_psi(decoded: Mapping, reference: Mapping, n: int, limit: int = 20000) -> dict[int, int] | None:
    """psi with reference(psi^-1(A)) = decoded(A) for every decoded A, or None."""
    labels = {a: [s for s, g in reference.items() if g == v] for a, v in decoded.items()}
    if any(not x for x in labels.values()):
        return None
    options = {}
    for s in range(1, n + 1):
        cand = set(range(1, n + 1))
        for a, ls in labels.items():
            if s in a:
                cand &= set().union(*ls)
        options[s] = sorted(cand)
    if any(not x for x in options.values()):
        return None
    images = list(range(1, n + 1))
    tried = 0
    for combo in product(*(options[s] for s in images)):
        if len(set(combo)) != n:
            continue
        tried += 1
        if tried > limit:
            return None
        inv = dict(zip(images, combo))
        if all(reference.get(tuple(sorted(inv[x] for x in a))) == v for a, v in decoded.items()):
            return {inv[s]: s for s in images}
    return None


def recover_chain(answer: UnlabeledAnswer, b: Bounds, n: int, k: int, reference: Mapping | None = None) -> RecoveredChain:
    """Decode exponent sets by magnitude, build the threshold chain and, given a
    labeled reference g-map, the element permutation psi."""
    decoded = decode_answer(answer, b, k)
    chain, thresholds = _chain(decoded, answer.t0, b, n, k)
    for u in range(1, len(chain)):
        prev, cur = chain[u - 1], chain[u]
        if prev is None or cur is None:
            continue
        if len(set(cur) - set(prev)) > 1:
            raise ProtocolError("chain", f"{cur} minus {prev} is not a singleton", (prev, cur))
    psi = None
    if reference is not None:
        psi = _label_psi(decoded, reference, n)
        if psi is None:
            raise ProtocolError("label", "no element permutation matches the reference labels")
    return RecoveredChain(decoded, chain, thresholds, psi)


def verify_and_label(answer: UnlabeledAnswer, psi: Mapping[int, int], reference: Mapping) -> tuple[bool, dict]:
    """Compare the answer sum with the expansion rebuilt from psi; return the labeled g-map."""
    total = sum(answer.values, Fraction(0))
    rebuilt = sum((g * _t_power(answer.t0, tuple(sorted(psi[a] for a in s))) for s, g in reference.items()), Fraction(0))
    labeled = {tuple(sorted(psi[a] for a in s)): g for s, g in reference.items()}
    return total == rebuilt, labeled


# matrix recovery


def _relabel(n: int, base: SubsetIndex, a1: int, a2: int) -> list[int]:
    """New order of the old labels: base, a1, a2, then the rest."""
    rest = [x for x in range(1, n + 1) if x not in base and x not in (a1, a2)]
    return list(base) + [a1, a2] + rest


def recover_matrices(gmap: Mapping[SubsetIndex, Fraction], n: int, k: int, choice: int = 0) -> DecompositionPair:
    """Matrices a (k x n) and q (n x k, gauge form) with Delta_a Delta_q = g on every k-subset."""
    gmap = {tuple(sorted(s)): Fraction(v) for s, v in gmap.items() if v != 0}
    matroid = Matroid(n, k, frozenset(gmap))
    witness = find_generic_columns(matroid)
    if witness is None:
        raise ProtocolError("hypothesis", "the matroid has no two generic columns")
    base, a1, a2 = witness
    order = _relabel(n, base, a1, a2)
    new_of = {old: new for new, old in enumerate(order, start=1)}
    relabeled = {tuple(sorted(new_of[x] for x in s)): v for s, v in gmap.items()}
    values = {s: relabeled.get(s, Fraction(0)) for s in combinations(range(1, n + 1), k)}
    h = TermMap(n, k, 0, values)
    try:
        dis = disambiguate_roots(h, choice=choice)
    except InconsistentData as exc:
        raise ProtocolError("plucker", f"no consistent Y-terms: {exc}") from None
    v = tuple(range(1, k + 1))
    rows = [[Fraction(int(r == c)) for c in range(k)] for r in range(k)]
    rows.append([Fraction(1)] * k)
    for alpha in range(k + 2, n + 1):
        row = [Fraction(1)]
        for j in range(2, k + 1):
            y = dis.y(v, 1, j, k + 1, alpha)
            if y is None:
                raise ProtocolError("ytrace", f"Y-term at {(v, 1, j, k + 1, alpha)} is not determined")
            row.append(c1c2(1, j, k + 1, alpha) * y)
        rows.append(row)
    q = ExactMatrix(rows)
    mq = q.maximal_minors()
    da = {}
    for s, g in values.items():
        if g == 0:
            da[s] = Fraction(0)
        elif mq[s] == 0:
            raise ProtocolError("plucker", f"recovered q has a vanishing minor at {s}", s)
        else:
            da[s] = g / mq[s]
    bad = next(((hs, ds) for hs, ds, r in all_plucker_residuals(da, n, k) if r != 0), None)
    if bad is not None:
        raise ProtocolError("plucker", f"minors of a violate a Plucker relation at H={bad[0]}, {bad[1]}", bad)
    dv = da[v]
    if dv == 0:
        raise ProtocolError("plucker", "leading minor of a vanishes")
    a_rows = [[Fraction(int(r == c)) for c in range(n)] for r in range(k)]
    for r in range(k):
        for c in range(k, n):
            swapped = tuple(sorted(set(v) - {r + 1} | {c + 1}))
            a_rows[r][c] = (-1) ** (k - 1 - r) * da[swapped] / dv
    a_rows[0] = [x * dv for x in a_rows[0]]
    a = ExactMatrix(a_rows)
    ma = a.maximal_minors()
    bad_s = next((s for s in values if ma[s] != da[s]), None)
    if bad_s is not None:
        raise ProtocolError("plucker", f"minor family of a is not realizable at {bad_s}", bad_s)
    back = [new_of[old] - 1 for old in range(1, n + 1)]
    a_orig = ExactMatrix([[row[c] for c in back] for row in a.rows()])
    q_orig = ExactMatrix([q.rows()[c] for c in back])
    pair = DecompositionPair(a_orig, q_orig, dict(gmap), witness, choice)
    got = gmap_of(a_orig, q_orig)
    if got != gmap:
        raise ProtocolError("plucker", "recovered pair does not reproduce the g-map")
    return pair


# integer shortcut


def _exp_bounds(terms: int) -> tuple[Fraction, Fraction]:
    low = sum((Fraction(1, factorial(i)) for i in range(terms + 1)), Fraction(0))
    return low, low + Fraction(2, factorial(terms + 1))


def ceil_log(x: int) -> int:
    """Exact ceiling of the natural logarithm of an integer x >= 1."""
    if x < 1:
        raise ValueError("ceil_log needs x >= 1")
    if x == 1:
        return 0
    c = 1
    terms = 12
    while True:
        lo, hi = _exp_bounds(terms)
        if lo**c >= x:
            return c
        if hi**c < x:
            c += 1
            continue
        terms *= 2


@dataclass(frozen=True)
class ShortcutQuery:
    base: int
    block: int
    t0: tuple[int, ...]


def shortcut_query(maxg: int, n: int, k: int, g_size: int) -> ShortcutQuery:
    """B = 2 + maxG, c = ceil(log(2 #G) + log B), t_s = B^(c (k^(s-1) - 1)/(k - 1))."""
    base = 2 + maxg
    c = ceil_log(2 * g_size * base)
    if k == 1:
        powers = [s - 1 for s in range(1, n + 1)]
    else:
        powers = [(k ** (s - 1) - 1) // (k - 1) for s in range(1, n + 1)]
    return ShortcutQuery(base, c, tuple(base ** (c * p) for p in powers))


def _position_set(p: int, n: int, k: int) -> SubsetIndex | None:
    """Exponent set whose block position is p, read from base-k digits of (k-1) p + k."""
    if k == 1:
        return (p + 1,) if 0 <= p < n else None
    x = (k - 1) * p + k
    digits = []
    while x:
        x, d = divmod(x, k)
        digits.append(d)
    if any(d > 1 for d in digits) or sum(digits) != k or len(digits) > n:
        return None
    return tuple(i + 1 for i, d in enumerate(digits) if d)


def decode_shortcut(maxg: int, delta: int, n: int, k: int, g_size: int) -> dict[SubsetIndex, Fraction]:
    """Split delta into balanced base-B^c blocks; each nonzero block is one g-value."""
    sq = shortcut_query(maxg, n, k, g_size)
    radix = sq.base**sq.block
    half = radix // 2
    out = {}
    x, p = int(delta), 0
    while x:
        x, r = divmod(x, radix)
        if r > half:
            r -= radix
            x += 1
        if r:
            s = _position_set(p, n, k)
            if s is None:
                raise ProtocolError("decode", f"block {p} does not encode a {k}-subset")
            if abs(r) > maxg:
                raise ProtocolError("decode", f"block {p} exceeds the announced maximum")
            out[s] = Fraction(r)
        p += 1
    if len(out) != g_size:
        raise ProtocolError("decode", f"decoded {len(out)} terms, expected {g_size}")
    if max(abs(v) for v in out.values()) != maxg:
        raise ProtocolError("decode", "decoded maximum differs from the announced maximum")
    return out


def integer_shortcut(maxg: int, delta: int, n: int, k: int, g_size: int, choice: int = 0) -> DecompositionPair:
    return recover_matrices(decode_shortcut(maxg, delta, n, k, g_size), n, k, choice)


# full pipeline


def run_protocol(a: ExactMatrix, q: ExactMatrix, set_map: Mapping, use_reference: bool = True, shortcut: bool = False) -> ProtocolResult:
    """Simulate both queries and run every recovery stage."""
    k, n = a.shape
    reference = gmap_of(a, q)
    g_size = len(reference)
    first = oracle_answer(a, q, set_map, (1,) * n)
    integer = all(v.denominator == 1 for v in first.values)
    if shortcut:
        if not integer:
            raise ValueError("the shortcut needs integer g-values")
        maxg = int(max(abs(v) for v in first.values))
        sq = shortcut_query(maxg, n, k, g_size)
        delta = sum(oracle_answer(a, q, set_map, sq.t0).values, Fraction(0))
        try:
            decoded = decode_shortcut(maxg, int(delta), n, k, g_size)
        except ProtocolError as exc:
            return ProtocolResult(False, exc.stage, reason=str(exc), t0=sq.t0)
        answer = UnlabeledAnswer(tuple(Fraction(x) for x in sq.t0), tuple(sorted(g * _t_power(sq.t0, s) for s, g in decoded.items())))
        bounds = Bounds(Fraction(1), Fraction(sq.base))
    else:
        bounds = bounds_query(first.values)
        t0 = build_query(bounds, n, k, g_size)
        answer = oracle_answer(a, q, set_map, t0)
    return recover_from_answer(answer, bounds, n, k, reference if use_reference else None)


def recover_from_answer(answer: UnlabeledAnswer, bounds: Bounds, n: int, k: int, reference: Mapping | None) -> ProtocolResult:
    try:
        rc = recover_chain(answer, bounds, n, k, reference)
    except ProtocolError as exc:
        return ProtocolResult(False, exc.stage, reason=str(exc), t0=answer.t0)
    extra = {"chain": rc.chain, "thresholds": rc.thresholds}
    if rc.psi is not None:
        ok, _ = verify_and_label(answer, rc.psi, reference)
        if not ok:
            return ProtocolResult(False, "sum", psi=rc.psi, reason="answer sum differs from the expansion induced by psi", t0=answer.t0, extra=extra)
    try:
        pair = recover_matrices(rc.decoded, n, k)
    except ProtocolError as exc:
        return ProtocolResult(False, exc.stage, psi=rc.psi, reason=str(exc), t0=answer.t0, extra=extra)
    return ProtocolResult(True, "done", rc.psi, pair, t0=answer.t0, extra=extra)
