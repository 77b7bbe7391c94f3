import random
from fractions import Fraction
from itertools import combinations
from math import exp, log

import pytest
from hypothesis import given, settings, strategies as st

from cbreduce.cli import planted_protocol_instance
from cbreduce.exactmat import ExactMatrix
from cbreduce.protocol import (
    Bounds,
    ProtocolError,
    UnlabeledAnswer,
    bounds_query,
    build_query,
    ceil_log,
    decode_shortcut,
    gmap_of,
    induced_set_map,
    integer_shortcut,
    oracle_answer,
    recover_chain,
    recover_matrices,
    run_protocol,
    separation_holds,
    shortcut_query,
    verify_and_label,
)

from conftest import fixture_pair


def non_induced_map(rng, bases):
    """Random permutation of the bases that breaks adjacency, so no element permutation induces it."""
    bases = sorted(bases)
    while True:
        images = bases[:]
        rng.shuffle(images)
        sm = dict(zip(bases, images))
        if any(len(set(a) & set(b)) == len(a) - 1 and len(set(sm[a]) & set(sm[b])) != len(a) - 1 for a, b in combinations(bases, 2)):
            return sm


def reproduces(pair, psi, reference) -> bool:
    got = gmap_of(pair.a, pair.q)
    return all(got[tuple(sorted(psi[x] for x in s))] == g for s, g in reference.items()) and len(got) == len(reference)


def forward_shortcut(a, q, set_map):
    reference = gmap_of(a, q)
    k, n = a.shape
    maxg = int(max(abs(v) for v in reference.values()))
    sq = shortcut_query(maxg, n, k, len(reference))
    delta = sum(oracle_answer(a, q, set_map, sq.t0).values, Fraction(0))
    return maxg, int(delta), sq


@settings(max_examples=10)
@given(st.integers(0, 10**6), st.sampled_from([(2, 7), (2, 9), (3, 7)]))
def test_full_protocol_round_trip(seed, shape):
    k, n = shape
    a, q, psi = planted_protocol_instance(k, n, seed)
    reference = gmap_of(a, q)
    res = run_protocol(a, q, induced_set_map(psi, reference))
    assert res.induced and res.psi == psi
    assert reproduces(res.pair, psi, reference)


@pytest.mark.parametrize("seed", range(4))
def test_non_induced_maps_are_rejected(seed):
    rng = random.Random(seed)
    a, q, _ = planted_protocol_instance(2, 7, 100 + seed)
    sm = non_induced_map(rng, gmap_of(a, q))
    assert not run_protocol(a, q, sm).induced
    assert not run_protocol(a, q, sm, use_reference=False).induced


def test_identity_map_gives_identity_psi():
    a, q, _ = planted_protocol_instance(2, 6, 3)
    reference = gmap_of(a, q)
    res = run_protocol(a, q, {s: s for s in reference})
    assert res.psi == {x: x for x in range(1, 7)}
    assert res.extra["chain"][0] == (1, 2)


def test_query_satisfies_separation_and_injectivity():
    a, q, psi = planted_protocol_instance(2, 6, 8)
    reference = gmap_of(a, q)
    first = oracle_answer(a, q, induced_set_map(psi, reference), (1,) * 6)
    b = bounds_query(first.values)
    t0 = build_query(b, 6, 2, len(reference))
    assert separation_holds(t0, b, 2, len(reference))
    answer = oracle_answer(a, q, induced_set_map(psi, reference), t0)
    mags = [abs(v) for v in answer.values]
    sums = set()
    for mask in range(1 << len(mags)):
        if mask >= 1 << 12:
            break
        sums.add(sum((m for i, m in enumerate(mags) if mask >> i & 1), Fraction(0)))
    assert len(sums) == min(1 << len(mags), 1 << 12)


def test_verify_and_label_rejects_a_wrong_psi():
    a, q, psi = planted_protocol_instance(2, 6, 4)
    reference = gmap_of(a, q)
    sm = induced_set_map(psi, reference)
    first = oracle_answer(a, q, sm, (1,) * 6)
    b = bounds_query(first.values)
    answer = oracle_answer(a, q, sm, build_query(b, 6, 2, len(reference)))
    ok, labeled = verify_and_label(answer, psi, reference)
    assert ok and labeled == {sm[s]: g for s, g in reference.items()}
    wrong = dict(psi)
    wrong[1], wrong[2] = psi[2], psi[1]
    assert not verify_and_label(answer, wrong, reference)[0]


def test_decode_rejects_values_outside_every_window():
    answer = UnlabeledAnswer((Fraction(1), Fraction(100), Fraction(10**6)), (Fraction(50),))
    with pytest.raises(ProtocolError) as exc:
        recover_chain(answer, Bounds(Fraction(1), Fraction(2)), 3, 2)
    assert exc.value.stage == "decode"


def test_recover_matrices_round_trip_and_perturbation():
    a, q, _ = planted_protocol_instance(2, 7, 21)
    g = gmap_of(a, q)
    pair = recover_matrices(g, 7, 2)
    assert gmap_of(pair.a, pair.q) == g
    other = recover_matrices(g, 7, 2, choice=1)
    assert gmap_of(other.a, other.q) == g
    bad = dict(g)
    bad[(1, 2)] += 1
    with pytest.raises(ProtocolError) as exc:
        recover_matrices(bad, 7, 2)
    assert exc.value.stage == "plucker"


def test_example_1_2_gmap_lacks_generic_columns():
    from cbreduce.expansion import cauchy_binet_terms, h_at_ones

    left, right, _ = fixture_pair("ex1_2")
    h1 = h_at_ones(cauchy_binet_terms(left, right))
    with pytest.raises(ProtocolError) as exc:
        recover_matrices({s: v for s, v in h1.values.items() if v != 0}, 12, 6)
    assert exc.value.stage == "hypothesis"


@given(st.integers(1, 10**9))
def test_ceil_log_brackets_the_logarithm(x):
    c = ceil_log(x)
    assert c >= 0
    if x > 1 and abs(log(x) - round(log(x))) > 1e-9:
        assert c == int(-(-log(x) // 1))
        assert exp(c - 1) < x <= exp(c) * (1 + 1e-12)


def test_shortcut_round_trip_and_equivalence():
    a, q, psi = planted_protocol_instance(2, 7, 5)
    reference = gmap_of(a, q)
    sm = induced_set_map(psi, reference)
    maxg, delta, _ = forward_shortcut(a, q, sm)
    pair = integer_shortcut(maxg, delta, 7, 2, len(reference))
    full = run_protocol(a, q, sm)
    assert pair.a == full.pair.a and pair.q == full.pair.q
    assert reproduces(pair, psi, reference)
    short = run_protocol(a, q, sm, shortcut=True)
    assert short.induced and short.psi == psi


def test_shortcut_detects_single_digit_corruption():
    rng = random.Random(3)
    a, q, psi = planted_protocol_instance(2, 6, 12)
    reference = gmap_of(a, q)
    maxg, delta, sq = forward_shortcut(a, q, induced_set_map(psi, reference))
    digits = 0
    x = abs(delta)
    while x:
        x //= sq.base
        digits += 1
    for j in rng.sample(range(digits + 2), 12):
        for sign in (1, -1):
            with pytest.raises(ProtocolError):
                integer_shortcut(maxg, delta + sign * sq.base**j, 6, 2, len(reference))


def test_single_basis_shortcut():
    a = ExactMatrix([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]])
    q = ExactMatrix([[Fraction(1), Fraction(0)], [Fraction(4), Fraction(1)]])
    g = gmap_of(a, q)
    assert g == {(1, 2): Fraction(5)}
    maxg, delta, sq = forward_shortcut(a, q, {(1, 2): (1, 2)})
    assert delta == 5 * sq.t0[0] * sq.t0[1]
    assert decode_shortcut(maxg, delta, 2, 2, 1) == {(1, 2): Fraction(5)}
