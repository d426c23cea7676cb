from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oracles import enumerate_qubo, mwis_enumerate
from qopt.graph import WeightedGraph, generate_random_graph
from qopt.qubo import (
    IsingModel,
    ModelFormatError,
    Qubo,
    bits_from_spins,
    decode_mwis,
    default_penalty,
    evaluate_ising,
    evaluate_qubo,
    ising_to_qubo,
    mwis_direct_qubo,
    parse_ising,
    parse_qubo,
    qubo_to_ising,
    spins_from_bits,
    write_ising,
    write_qubo,
)
from qopt.solvers import brute_force_qubo

K3 = WeightedGraph([3, 5, 4], [(0, 1), (1, 2), (0, 2)])
P3 = WeightedGraph([2, 3, 2], [(0, 1), (1, 2)])


def random_qubo(rng: random.Random, n: int) -> Qubo:
    coeffs = {}
    for i in range(n):
        for j in range(i, n):
            if rng.random() < 0.6:
                coeffs[(i, j)] = Fraction(rng.randint(-20, 20), rng.choice([1, 2, 3, 4, 6]))
    return Qubo(n, coeffs, Fraction(rng.randint(-5, 5), rng.choice([1, 2, 5])))


def test_evaluate_qubo_examples():
    assert evaluate_qubo(Qubo(1, {(0, 0): -3}), (1,)) == -3
    q = Qubo(2, {(0, 1): 11, (0, 0): -3, (1, 1): -5})
    assert evaluate_qubo(q, (1, 1)) == 3
    assert evaluate_qubo(Qubo(2, {(0, 1): 4}, Fraction(7, 2)), (0, 0)) == Fraction(7, 2)


def test_qubo_canonicalizes_pairs():
    q = Qubo(2, {(1, 0): 2, (0, 1): 3, (1, 1): 0})
    assert q.coefficients == {(0, 1): 5}


def test_qubo_rejects_bad_indices():
    with pytest.raises(ValueError):
        Qubo(2, {(0, 2): 1})
    with pytest.raises(ValueError):
        evaluate_qubo(Qubo(2), (1,))


def test_evaluate_ising_examples():
    assert evaluate_ising(IsingModel(1, [1]), (1,)) == -1
    m = IsingModel(2, [0, 0], {(0, 1): 1})
    assert evaluate_ising(m, (1, -1)) == 1
    for s in product((-1, 1), repeat=2):
        assert evaluate_ising(m, s) == evaluate_ising(m, tuple(-v for v in s))
    with pytest.raises(ValueError):
        evaluate_ising(m, (0, 1))


def test_single_diagonal_conversion():
    m = qubo_to_ising(Qubo(1, {(0, 0): 1}))
    assert m.offset == Fraction(1, 2) and m.h == (Fraction(-1, 2),) and not m.J
    assert evaluate_ising(m, (-1,)) == 0 and evaluate_ising(m, (1,)) == 1


def test_zero_qubo_to_zero_ising():
    m = qubo_to_ising(Qubo(3))
    assert m.offset == 0 and all(v == 0 for v in m.h) and not m.J


def test_spin_bit_maps():
    assert spins_from_bits((0, 1)) == (-1, 1)
    assert bits_from_spins((-1, 1)) == (0, 1)


def test_random_eight_qubit_conversion_exhaustive():
    rng = random.Random(8)
    q = random_qubo(rng, 8)
    m = qubo_to_ising(q)
    diffs = [abs(evaluate_qubo(q, x) - evaluate_ising(m, spins_from_bits(x))) for x in product((0, 1), repeat=8)]
    assert max(diffs) == 0
    assert ising_to_qubo(m) == q


def test_argmin_preserved_under_conversion():
    rng = random.Random(3)
    for _ in range(20):
        q = random_qubo(rng, rng.randint(1, 6))
        m = qubo_to_ising(q)
        _, argmin = enumerate_qubo(q)
        energies = {s: evaluate_ising(m, s) for s in product((-1, 1), repeat=q.n)}
        low = min(energies.values())
        assert sorted(spins_from_bits(x) for x in argmin) == sorted(s for s, e in energies.items() if e == low)


def test_positive_scaling_keeps_argmin():
    rng = random.Random(5)
    for _ in range(10):
        q = random_qubo(rng, 5)
        scaled = Qubo(q.n, {k: 7 * v / 3 for k, v in q.coefficients.items()}, q.offset)
        assert enumerate_qubo(q)[1] == enumerate_qubo(scaled)[1]


def test_k3_direct_qubo():
    q = mwis_direct_qubo(K3, 11)
    assert [q.linear(i) for i in range(3)] == [-3, -5, -4]
    assert {k: v for k, v in q.coefficients.items() if k[0] != k[1]} == {(0, 1): 11, (0, 2): 11, (1, 2): 11}
    value, argmin = enumerate_qubo(q)
    assert value == -5 and argmin == [(0, 1, 0)]


def test_single_vertex_and_edgeless_direct_qubo():
    for p in (1, 5, 100):
        assert enumerate_qubo(mwis_direct_qubo(WeightedGraph([7]), p)) == (-7, [(1,)])
    g = WeightedGraph([2, 3, 4])
    assert enumerate_qubo(mwis_direct_qubo(g, 1)) == (-9, [(1, 1, 1)])


@pytest.mark.parametrize(
    "g, expected",
    [
        (K3, 11),
        (WeightedGraph([9, 1, 2]), 1),
        (WeightedGraph([2] * 5, [(0, i) for i in range(1, 5)]), 9),
    ],
)
def test_default_penalty(g, expected):
    assert default_penalty(g) == expected


def test_decode_mwis_examples():
    d = decode_mwis(K3, (1, 1, 0))
    assert d.weight == 8 and not d.feasible
    d = decode_mwis(P3, (1, 0, 1))
    assert d.weight == 4 and d.feasible and d.vertices == (0, 2)
    d = decode_mwis(P3, (0, 0, 0))
    assert d.weight == 0 and d.feasible and d.vertices == ()


def test_penalty_exactness_small_graphs():
    for seed in range(40):
        g = generate_random_graph(1 + seed % 9, 0.5, seed)
        q = mwis_direct_qubo(g, default_penalty(g))
        _, argmin = enumerate_qubo(q)
        opt = mwis_enumerate(g.weights, g.edges)
        for x in argmin:
            d = decode_mwis(g, x)
            assert d.feasible and d.weight == opt


def test_qubo_file_round_trip():
    rng = random.Random(11)
    for _ in range(20):
        q = random_qubo(rng, rng.randint(1, 7))
        assert parse_qubo(write_qubo(q)) == q
        assert write_qubo(parse_qubo(write_qubo(q))) == write_qubo(q)


def test_ising_file_round_trip():
    rng = random.Random(12)
    for _ in range(20):
        m = qubo_to_ising(random_qubo(rng, rng.randint(1, 7)))
        assert parse_ising(write_ising(m)) == m


@pytest.mark.parametrize(
    "text",
    ["", "2\n0 2 1\n", "2\n0 1 x\n", "2\n0 1\n", "-1\n", "2\n1 0 1\n1 0 1\n"],
)
def test_parse_qubo_rejects(text):
    with pytest.raises(ModelFormatError):
        parse_qubo(text)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 5).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.dictionaries(
                st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).map(lambda t: tuple(sorted(t))),
                st.fractions(min_value=-10, max_value=10, max_denominator=8),
                max_size=8,
            ),
        )
    )
)
def test_conversion_round_trip_property(arg):
    n, coeffs = arg
    q = Qubo(n, coeffs, 0)
    m = qubo_to_ising(q)
    assert ising_to_qubo(m) == q
    for x in product((0, 1), repeat=n):
        assert evaluate_qubo(q, x) == evaluate_ising(m, spins_from_bits(x))


def test_brute_force_matches_enumeration_oracle():
    rng = random.Random(21)
    for _ in range(30):
        q = random_qubo(rng, rng.randint(1, 8))
        value, argmin = enumerate_qubo(q)
        res = brute_force_qubo(q)
        assert res.value == value
        assert res.num_optima == len(argmin)
        assert tuple(res.assignment) == argmin[0]
