import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from cbreduce.exactmat import (
    ExactMatrix,
    all_plucker_residuals,
    bareiss_det,
    complement,
    det,
    dual_pair,
    gauge_normalize,
    minor,
    plucker_residual,
    signed_minor,
)
from cbreduce.expansion import cauchy_binet_terms
from cbreduce.laurent import LaurentPoly
from cbreduce.yalg import y_from_matrix

from conftest import generic_matrix
from oracles import leibniz_det, leibniz_minors

small = st.integers(-4, 4).map(Fraction)


@st.composite
def wide_matrices(draw, kmax=4, nmax=7):
    k = draw(st.integers(1, kmax))
    n = draw(st.integers(k, nmax))
    return ExactMatrix([[draw(small) for _ in range(n)] for _ in range(k)])


@given(wide_matrices())
def test_minors_match_leibniz(m):
    assert m.maximal_minors() == leibniz_minors(m.rows())


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_matches_leibniz(rows):
    m = ExactMatrix(rows)
    assert bareiss_det(m) == leibniz_det(rows)
    assert det(m) == leibniz_det(rows)


@given(wide_matrices())
def test_tall_matrix_uses_row_minors(m):
    assert m.transpose().maximal_minors() == m.maximal_minors()


def test_polynomial_minors_match_sympy():
    rng = random.Random(7)
    t = LaurentPoly.var(0, 1)
    ts = sp.Symbol("t")
    for _ in range(5):
        coeffs = [[(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-1, 2)) for _ in range(5)] for _ in range(3)]
        m = ExactMatrix([[a + b * t ** e for a, b, e in row] for row in coeffs])
        s = sp.Matrix([[a + b * ts ** e for a, b, e in row] for row in coeffs])
        for sub, v in m.maximal_minors().items():
            ref = s[:, [c - 1 for c in sub]].det()
            got = sum(c * ts ** e[0] for e, c in v.items()) if isinstance(v, LaurentPoly) else v
            assert sp.simplify(got - ref) == 0


@given(st.integers(2, 4).flatmap(lambda k: st.tuples(st.just(k), st.integers(k + 2, 7))), st.integers(0, 10**6))
def test_plucker_residuals_vanish(shape, seed):
    k, n = shape
    rng = random.Random(seed)
    m = ExactMatrix([[Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(k)])
    assert all(r == 0 for _, _, r in all_plucker_residuals(m.maximal_minors(), n, k))


def test_plucker_residual_direct_form():
    m = ExactMatrix([[Fraction(x) for x in row] for row in ([1, 2, 0, 3, 1], [0, 1, 4, -1, 2], [2, 0, 1, 1, 5])])
    assert plucker_residual(m, (2,), 1, 3, 4, 5) == 0
    with pytest.raises(ValueError):
        plucker_residual(m, (2,), 1, 1, 4, 5)


def test_signed_minor_is_antisymmetric():
    m = ExactMatrix([[Fraction(x) for x in row] for row in ([1, 2, 0, 3], [0, 1, 4, -1])])
    assert signed_minor(m, 1, 3, ()) == -signed_minor(m, 3, 1, ())
    assert abs(signed_minor(m, 1, 3, ())) == abs(minor(m, (1, 3)))


def test_minor_rejects_bad_subsets():
    m = ExactMatrix.identity(3)
    with pytest.raises(ValueError):
        minor(m, (1, 1, 2))
    with pytest.raises(IndexError):
        minor(m, (1, 2, 4))


def test_gauge_normalize_keeps_terms_and_y(rng):
    for k, n in ((2, 5), (3, 6)):
        left, right = generic_matrix(rng, k, n), generic_matrix(rng, n, k)
        l_t, r_t, diag, d = gauge_normalize(left, right)
        assert cauchy_binet_terms(l_t, r_t).values == cauchy_binet_terms(left, right).values
        rows = r_t.rows()
        assert all(rows[a][b] == (1 if a == b else 0) for a in range(k) for b in range(k))
        assert all(x == 1 for x in rows[k])
        assert all(rows[a][0] == 1 for a in range(k, n))
        base = tuple(range(1, k + 1))
        for i, j in combinations(base, 2):
            for a, b in combinations(range(k + 1, n + 1), 2):
                assert y_from_matrix(r_t, base, i, j, a, b).value == y_from_matrix(right, base, i, j, a, b).value


def test_dual_pair_minors_are_proportional(rng):
    left, right = generic_matrix(rng, 2, 6), generic_matrix(rng, 6, 2)
    l_perp, r_perp, c_l, c_r = dual_pair(left, right, (1, 2))
    assert l_perp.shape == (4, 6) and r_perp.shape == (6, 4)
    for s in combinations(range(1, 7), 2):
        cs = complement(s, 6)
        assert minor(l_perp, cs) == c_l * minor(left, s)
        assert minor(r_perp, cs) == c_r * minor(right, s)
