from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from scipy.stats import chisquare

from oracles import enumerate_qubo, mwis_enumerate
from qopt.graph import WeightedGraph, generate_random_graph
from qopt.qubo import IsingModel, Qubo, decode_mwis, default_penalty, evaluate_qubo, mwis_direct_qubo, qubo_to_ising
from qopt.solvers import (
    Sample,
    SampleSet,
    SizeGuardError,
    brute_force_qubo,
    exact_sampleset,
    mwis_branch_and_bound,
    simulated_annealing,
)

K3 = WeightedGraph([3, 5, 4], [(0, 1), (1, 2), (0, 2)])
P3 = WeightedGraph([2, 3, 2], [(0, 1), (1, 2)])


def optimal_set_count(g):
    best, count = -1, 0
    for r in range(g.n + 1):
        for s in combinations(range(g.n), r):
            if any(u in s and v in s for u, v in g.edges):
                continue
            w = sum(g.weights[i] for i in s)
            if w > best:
                best, count = w, 1
            elif w == best:
                count += 1
    return best, count


def test_brute_force_examples():
    r = brute_force_qubo(Qubo(1, {(0, 0): -3}))
    assert (r.value, r.assignment, r.num_optima, r.certified) == (-3, (1,), 1, True)
    r = brute_force_qubo(Qubo(3))
    assert r.value == 0 and r.num_optima == 8
    r = brute_force_qubo(mwis_direct_qubo(K3, 11))
    assert r.value == -5 and r.assignment == (0, 1, 0)


def test_brute_force_assignment_evaluates_to_value():
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(1, 12)
        q = Qubo(n, {(rng.randrange(n), rng.randrange(n)): Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(2 * n)})
        r = brute_force_qubo(q)
        assert evaluate_qubo(q, r.assignment) == r.value


def test_brute_force_size_guard():
    n = 26
    dense = Qubo(n, {(i, j): 1 for i in range(n) for j in range(i + 1, n)})
    with pytest.raises(SizeGuardError):
        brute_force_qubo(dense)
    # a decoupled 40-qubit model only enumerates its empty core
    r = brute_force_qubo(Qubo(40, {(i, i): -1 for i in range(40)}))
    assert r.value == -40 and r.num_optima == 1


def test_branch_and_bound_examples():
    r = mwis_branch_and_bound(K3)
    assert r.value == 5 and r.assignment == (0, 1, 0)
    r = mwis_branch_and_bound(P3)
    assert r.value == 4 and r.assignment == (1, 0, 1)


def test_branch_and_bound_k14_cross_oracle():
    g = generate_random_graph(14, 0.5, seed=42)
    bnb = mwis_branch_and_bound(g)
    bf = brute_force_qubo(mwis_direct_qubo(g, default_penalty(g)))
    d = decode_mwis(g, bf.assignment)
    assert d.feasible and d.weight == bnb.value == -bf.value


def test_exact_solvers_agree_on_200_graphs():
    for seed in range(200):
        g = generate_random_graph(1 + seed % 16, 0.5, seed)
        bnb = mwis_branch_and_bound(g)
        bf = brute_force_qubo(mwis_direct_qubo(g, default_penalty(g)))
        assert bnb.value == -bf.value
        assert bnb.num_optima == bf.num_optima
        assert decode_mwis(g, bnb.assignment).weight == bnb.value


def test_branch_and_bound_counts_optima():
    for seed in range(60):
        g = generate_random_graph(2 + seed % 9, 0.4, seed)
        g = WeightedGraph([1 + w % 3 for w in g.weights], g.edges)  # low weights force ties
        value, count = optimal_set_count(g)
        r = mwis_branch_and_bound(g)
        assert (r.value, r.num_optima) == (value, count)
        assert value == mwis_enumerate(g.weights, g.edges)


def test_sa_single_spin():
    s = simulated_annealing(IsingModel(1, [1]), 100, (0.1, 10.0), 1000, seed=0)
    up = sum(e.count for e in s.entries if e.bits == (1,))
    assert up / 1000 >= 0.99


def test_sa_zero_model_uniform():
    n = 3
    s = simulated_annealing(IsingModel(n, [0] * n), 100, (0.1, 10.0), 4000, seed=1)
    counts = {e.bits: e.count for e in s.entries}
    observed = [counts.get(tuple((k >> i) & 1 for i in range(n)), 0) for k in range(1 << n)]
    assert chisquare(observed).pvalue > 0.001


def test_sa_p3_finds_optimum():
    q = mwis_direct_qubo(P3, 7)
    s = simulated_annealing(qubo_to_ising(q), shots=1000, seed=0)
    assert s.best.bits == (1, 0, 1)
    d = decode_mwis(P3, s.best.bits)
    assert d.feasible and d.weight == 4


def test_sa_determinism_and_conservation():
    g = generate_random_graph(8, 0.5, 3)
    m = qubo_to_ising(mwis_direct_qubo(g, default_penalty(g)))
    a = simulated_annealing(m, shots=300, seed=5)
    b = simulated_annealing(m, shots=300, seed=5)
    assert a == b and a.shots == 300
    q = mwis_direct_qubo(g, default_penalty(g))
    for e in a.entries:
        assert e.energy == evaluate_qubo(q, e.bits)


def test_sa_rejects_bad_schedule():
    with pytest.raises(ValueError):
        simulated_annealing(IsingModel(1, [1]), beta_schedule=(0, 1))
    with pytest.raises(ValueError):
        simulated_annealing(IsingModel(1, [1]), shots=0)


def test_sampleset_merges_and_sorts():
    s = SampleSet([Sample((1, 0), Fraction(2), 3), Sample((0, 1), Fraction(-1), 1), Sample((1, 0), Fraction(2), 2)])
    assert s.shots == 6
    assert [e.bits for e in s.entries] == [(0, 1), (1, 0)]
    assert s.best.count == 1 and s.entries[1].count == 5


def test_sampleset_json_round_trip():
    q = mwis_direct_qubo(K3, Fraction(23, 2))
    s = SampleSet.from_assignments(q, np.array([[0, 1, 0], [1, 1, 0], [0, 1, 0]]), solver="x", seed=3, params={"a": 1})
    back = SampleSet.from_json(s.to_json())
    assert back == s
    with pytest.raises(ValueError):
        SampleSet.from_json(s.to_json().replace('"shots": 3', '"shots": 4'))


def test_exact_sampleset():
    q = mwis_direct_qubo(K3, 11)
    s = exact_sampleset(q, brute_force_qubo(q), "bruteforce")
    assert s.shots == 1 and s.best.bits == (0, 1, 0) and s.best.energy == -5
