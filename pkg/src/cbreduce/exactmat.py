"""Exact matrices, maximal minors, signed minors and Pluecker residuals.

Subset indices are sorted tuples of 1-based column (or row) labels.  A
k x n matrix with k <= n is read through its column minors; an n x k right
factor (more rows than columns) through its row minors.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .quadext import QuadExt

SubsetIndex = tuple[int, ...]


def _norm_entry(x):
    return Fraction(x) if isinstance(x, int) else x


class ExactMatrix:
    """Immutable matrix with exact entries (Fraction, Laurent, rational function, QuadExt)."""

    __slots__ = ("_rows", "nrows", "ncols", "_minors")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(_norm_entry(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ValueError("empty matrix")
        if any(len(r) != len(data[0]) for r in data):
            raise ValueError("ragged rows")
        self._rows = data
        self.nrows = len(data)
        self.ncols = len(data[0])
        self._minors = None

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self._rows))

    def map(self, f: Callable) -> "ExactMatrix":
        return ExactMatrix([[f(x) for x in r] for r in self._rows])

    def evaluate(self, point: Sequence) -> "ExactMatrix":
        """Entrywise evaluation at a point (constants are kept)."""

        def ev(x):
            if isinstance(x, Fraction):
                return x
            if isinstance(x, QuadExt):
                return _eval_quad(x, point)
            return x.evaluate(point)

        return self.map(ev)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [other.column(j) for j in range(other.ncols)]
        out = []
        for r in self._rows:
            out.append([_dot(r, c) for c in cols])
        return ExactMatrix(out)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self._rows, other._rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.shape)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        """0-based row and column selection."""
        return ExactMatrix([[self._rows[i][j] for j in cols] for i in rows])

    def scale_rows(self, factors: Sequence) -> "ExactMatrix":
        return ExactMatrix([[f * x for x in r] for f, r in zip(factors, self._rows)])

    def scale_columns(self, factors: Sequence) -> "ExactMatrix":
        return ExactMatrix([[f * x for f, x in zip(factors, r)] for r in self._rows])

    @property
    def k(self) -> int:
        return min(self.nrows, self.ncols)

    @property
    def n(self) -> int:
        return max(self.nrows, self.ncols)

    def maximal_minors(self) -> dict[SubsetIndex, object]:
        """All C(n,k) maximal minors, computed once and cached."""
        if self._minors is None:
            m = self if self.nrows <= self.ncols else self.transpose()
            self._minors = _all_column_minors(m._rows)
        return self._minors

    def inverse(self) -> "ExactMatrix":
        """Gauss-Jordan inverse over a field."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self._rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            a[col], a[piv] = a[piv], a[col]
            pv = a[col][col]
            a[col] = [x / pv for x in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return ExactMatrix([r[n:] for r in a])

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols})"


def _eval_quad(x: QuadExt, point):
    rat = x.rat if isinstance(x.rat, Fraction) else x.rat.evaluate(point)
    rad = x.rad if isinstance(x.rad, Fraction) else x.rad.evaluate(point)
    disc = x.disc if isinstance(x.disc, Fraction) else x.disc.evaluate(point)
    return rat + rad * QuadExt.sqrt(disc)


def _dot(a: Sequence, b: Sequence):
    total = Fraction(0)
    for x, y in zip(a, b):
        if x != 0 and y != 0:
            total = x * y + total
    return total


def _all_column_minors(rows: tuple[tuple, ...]) -> dict[SubsetIndex, object]:
    """Cofactor expansion along successive rows, sharing sub-minors across subsets."""
    k, n = len(rows), len(rows[0])
    prev: dict[tuple[int, ...], object] = {(): Fraction(1)}
    for r in range(k):
        row = rows[r]
        cur = {}
        for s in combinations(range(n), r + 1):
            total = Fraction(0)
            for pos, c in enumerate(s):
                entry = row[c]
                if entry == 0:
                    continue
                sub = prev[s[:pos] + s[pos + 1:]]
                if sub == 0:
                    continue
                term = entry * sub
                total = total + term if (r + pos) % 2 == 0 else total - term
            cur[s] = total
        prev = cur
    return {tuple(c + 1 for c in s): v for s, v in prev.items()}


def det(m: ExactMatrix):
    """Determinant: Bareiss elimination for rational matrices, cofactor expansion otherwise."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    if all(isinstance(x, Fraction) for r in m.rows() for x in r):
        return bareiss_det(m)
    return _all_column_minors(m.rows())[tuple(range(1, m.ncols + 1))]


def bareiss_det(m: ExactMatrix):
    """Fraction-free Bareiss elimination (exact divisions) over a field."""
    n = m.nrows
    a = [list(r) for r in m.rows()]
    sign, prev = 1, Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def _check_subset(m: ExactMatrix, subset: Iterable[int]) -> SubsetIndex:
    s = tuple(sorted(subset))
    if len(set(s)) != len(s):
        raise ValueError(f"repeated index in {s}")
    if len(s) != m.k:
        raise ValueError(f"subset {s} has size {len(s)}, expected {m.k}")
    if s and (s[0] < 1 or s[-1] > m.n):
        raise IndexError(f"subset {s} out of range 1..{m.n}")
    return s


def minor(m: ExactMatrix, subset: Iterable[int]):
    """Maximal minor on the given 1-based columns (rows for a right factor)."""
    return m.maximal_minors()[_check_subset(m, subset)]


def _count_below(a: int, h: Iterable[int]) -> int:
    return sum(1 for x in h if x < a)


def signed_minor(m: ExactMatrix, alpha: int, beta: int, h: Iterable[int]):
    """Delta(alpha, beta | H) = Delta(H+{alpha,beta}) (-1)^(1+S(alpha,H)+S(beta,H)) sign(alpha-beta)."""
    h = tuple(h)
    if alpha == beta:
        raise ValueError("signed minor needs alpha != beta")
    if alpha in h or beta in h:
        raise ValueError("alpha and beta must lie outside H")
    value = minor(m, h + (alpha, beta))
    exponent = 1 + _count_below(alpha, h) + _count_below(beta, h)
    sign = (-1) ** exponent * (1 if alpha > beta else -1)
    return value if sign > 0 else -value


def plucker_residual(m: ExactMatrix, h: Iterable[int], d1: int, d2: int, d3: int, d4: int):
    """Three-term Pluecker combination; zero for every genuine matrix."""
    h = tuple(h)
    if len({d1, d2, d3, d4}) != 4:
        raise ValueError("indices must be pairwise distinct")

    def s(a, b):
        return signed_minor(m, a, b, h)

    return s(d1, d2) * s(d3, d4) - s(d1, d3) * s(d2, d4) + s(d1, d4) * s(d2, d3)


def plucker_residual_from_map(minors: dict, h: Sequence[int], d1: int, d2: int, d3: int, d4: int):
    """Same combination evaluated on a bare minor family (no matrix needed)."""
    h = tuple(h)

    def s(a, b):
        value = minors[tuple(sorted(h + (a, b)))]
        exponent = 1 + _count_below(a, h) + _count_below(b, h)
        sign = (-1) ** exponent * (1 if a > b else -1)
        return value if sign > 0 else -value

    return s(d1, d2) * s(d3, d4) - s(d1, d3) * s(d2, d4) + s(d1, d4) * s(d2, d3)


def all_plucker_residuals(minors: dict, n: int, k: int):
    """Yield (H, deltas, residual) for every three-term relation of a minor family."""
    for h in combinations(range(1, n + 1), k - 2):
        rest = [x for x in range(1, n + 1) if x not in h]
        for ds in combinations(rest, 4):
            yield h, ds, plucker_residual_from_map(minors, h, *ds)


def gauge_normalize(left: ExactMatrix, right: ExactMatrix):
    """Bring the right factor to the canonical gauge.

    Returns (L~, R~, D, d) with R~ = diag(D) R d and L~ = d^-1 L diag(D)^-1, so
    L~ R~ = d^-1 (L R) d and every Cauchy-Binet term is unchanged.  R~ has the
    identity on its top k rows, ones on row k+1, ones in column 1 below.
    """
    n, k = right.shape
    if left.shape != (k, n):
        raise ValueError("left must be k x n and right n x k")
    if n < k + 1:
        raise ValueError("gauge form needs n > k")
    top = right.submatrix(range(k), range(k))
    try:
        t = top.inverse()
    except ZeroDivisionError:
        raise ZeroDivisionError("top k x k block of R is singular (R not generic)") from None
    x = right @ t
    pivots = [x[k, j] for j in range(k)]
    if any(p == 0 for p in pivots):
        raise ZeroDivisionError("row k+1 pivot vanishes (R not generic)")
    col_scale = [1 / p for p in pivots]
    d = t.scale_columns(col_scale)
    first = [x[a, 0] for a in range(k + 1, n)]
    if any(v == 0 for v in first):
        raise ZeroDivisionError("column-1 pivot vanishes (R not generic)")
    diag = list(pivots) + [Fraction(1)] + [pivots[0] / v for v in first]
    r_t = (right @ d).scale_rows(diag)
    l_t = (d.inverse() @ left).scale_columns([1 / v for v in diag])
    return l_t, r_t, diag, d


def _kernel_rows(m: ExactMatrix, basis: SubsetIndex) -> ExactMatrix:
    """Rows spanning the orthogonal complement of the row space of a k x n matrix."""
    k, n = m.shape
    order = [c - 1 for c in basis] + [c for c in range(n) if c + 1 not in basis]
    perm = m.submatrix(range(k), order)
    inv = perm.submatrix(range(k), range(k)).inverse()
    echelon = inv @ perm
    ell = [[echelon[i, j] for j in range(k, n)] for i in range(k)]
    rows = []
    for a in range(n - k):
        permuted = [ell[i][a] for i in range(k)] + [Fraction(-1) if b == a else Fraction(0) for b in range(n - k)]
        original = [Fraction(0)] * n
        for p, c in enumerate(order):
            original[c] = permuted[p]
        rows.append([v if c % 2 == 0 else -v for c, v in enumerate(original)])
    return ExactMatrix(rows)


def complement(subset: Iterable[int], n: int) -> SubsetIndex:
    s = set(subset)
    return tuple(x for x in range(1, n + 1) if x not in s)


def dual_pair(left: ExactMatrix, right: ExactMatrix, basis: Iterable[int]):
    """Alternating dual representation of a pair.

    Returns (L_perp, R_perp, C_L, C_R) with L_perp of shape (n-k) x n and
    R_perp of shape n x (n-k) such that minor(L_perp, J^C) = C_L minor(L, J)
    and minor(R_perp, J^C) = C_R minor(R, J) for every k-subset J.
    """
    k, n = left.shape
    if right.shape != (n, k):
        raise ValueError("left must be k x n and right n x k")
    basis = _check_subset(left, basis)
    if minor(left, basis) == 0:
        raise ValueError(f"{basis} is not a basis of the left factor")
    if minor(right, basis) == 0:
        raise ValueError(f"{basis} is not a basis of the right factor")
    if k == n:
        raise ValueError("duality needs k < n")
    l_perp = _kernel_rows(left, basis)
    r_perp = _kernel_rows(right.transpose(), basis).transpose()
    cb = complement(basis, n)
    c_l = minor(l_perp, cb) / minor(left, basis)
    c_r = minor(r_perp, cb) / minor(right, basis)
    return l_perp, r_perp, c_l, c_r
