"""Matroids of non-vanishing maximal minors, exchange chains and generic columns."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Mapping

from .exactmat import SubsetIndex


class MatroidError(ValueError):
    pass


def exchange(s: SubsetIndex, out: int, into: int) -> SubsetIndex:
    """The set s with element `out` replaced by `into`, kept sorted."""
    return tuple(sorted((set(s) - {out}) | {into}))


def exchange2(s: SubsetIndex, outs: Iterable[int], intos: Iterable[int]) -> SubsetIndex:
    return tuple(sorted((set(s) - set(outs)) | set(intos)))


@dataclass(frozen=True)
class Matroid:
    n: int
    k: int
    bases: frozenset

    def __post_init__(self):
        if not self.bases:
            raise MatroidError("empty basis family")

    def __contains__(self, s) -> bool:
        return tuple(sorted(s)) in self.bases

    def __len__(self) -> int:
        return len(self.bases)

    def sorted_bases(self) -> list[SubsetIndex]:
        return sorted(self.bases)

    @property
    def is_uniform(self) -> bool:
        return len(self.bases) == comb(self.n, self.k)

    def exchange_violation(self):
        """First (A, B, alpha) breaking the exchange axiom, or None."""
        if self.is_uniform:
            return None
        bases = self.sorted_bases()
        for a in bases:
            for b in bases:
                if a == b:
                    continue
                b_minus_a = [x for x in b if x not in a]
                for alpha in a:
                    if alpha in b:
                        continue
                    if not any(exchange(a, alpha, beta) in self.bases for beta in b_minus_a):
                        return a, b, alpha
        return None


def uniform(n: int, k: int) -> Matroid:
    return Matroid(n, k, frozenset(combinations(range(1, n + 1), k)))


def from_bases(n: int, k: int, bases: Iterable[Iterable[int]], validate: bool = True) -> Matroid:
    m = Matroid(n, k, frozenset(tuple(sorted(b)) for b in bases))
    if validate:
        bad = m.exchange_violation()
        if bad is not None:
            a, b, alpha = bad
            raise MatroidError(f"exchange axiom fails for A={a}, B={b}, alpha={alpha}")
    return m


def from_minor_map(minors: Mapping[SubsetIndex, object], validate: bool = True) -> Matroid:
    """Bases are the subsets with non-vanishing minor; n and k are read off the keys."""
    if not minors:
        raise MatroidError("empty minor map")
    k = len(next(iter(minors)))
    n = max(max(s) for s in minors if s) if k else 0
    if len(minors) != comb(n, k):
        raise MatroidError(f"minor map covers {len(minors)} of {comb(n, k)} subsets")
    return from_bases(n, k, (s for s, v in minors.items() if v != 0), validate)


def exchange_chain(m: Matroid, start: Iterable[int], end: Iterable[int]) -> list[SubsetIndex]:
    """Chain start = L0, ..., Lr = end of bases, each step a single exchange."""
    cur, target = tuple(sorted(start)), tuple(sorted(end))
    if cur not in m.bases or target not in m.bases:
        raise MatroidError("chain endpoints must be bases")
    chain = [cur]
    while cur != target:
        ins = [x for x in target if x not in cur]
        step = next(
            (exchange(cur, a, b) for a in cur if a not in target for b in ins if exchange(cur, a, b) in m.bases),
            None,
        )
        if step is None:
            raise MatroidError(f"no exchange step from {cur} towards {target}")
        cur = step
        chain.append(cur)
    return chain


def generic_columns_hold(m: Matroid, base: SubsetIndex, a1: int, a2: int) -> bool:
    """Every J with J minus base inside {a1, a2} is a basis."""
    if base not in m.bases:
        return False
    for i in base:
        for a in (a1, a2):
            if exchange(base, i, a) not in m.bases:
                return False
    for i, j in combinations(base, 2):
        if exchange2(base, (i, j), (a1, a2)) not in m.bases:
            return False
    return True


def find_generic_columns(m: Matroid):
    """Lexicographically least witness (I, a1, a2) with a1 < a2, or None."""
    if m.n - m.k < 2:
        return None
    for base in m.sorted_bases():
        rest = [x for x in range(1, m.n + 1) if x not in base]
        for a1, a2 in combinations(rest, 2):
            if generic_columns_hold(m, base, a1, a2):
                return base, a1, a2
    return None
