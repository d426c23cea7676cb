from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from instances import K3, P4, anneal_fixtures, mwis_ising
from oracles import anneal_dense, ising_diagonal, qaoa_dense
from qopt.qubo import IsingModel, ising_to_qubo
from qopt.quantum import (
    AnnealSchedule,
    AnnealTrace,
    NormalizationError,
    StateVector,
    anneal_evolve,
    basis_to_assignment,
    expectation,
    ground_state_indices,
    problem_diagonal,
    qaoa_optimize,
    qaoa_state,
    quantum_annealing,
    sample_state,
)
from qopt.solvers import SizeGuardError, brute_force_qubo


def test_problem_diagonal_examples():
    assert problem_diagonal(IsingModel(1, [1])).tolist() == [-1, 1]
    assert problem_diagonal(IsingModel(3, [0, 0, 0])).tolist() == [0] * 8
    assert problem_diagonal(IsingModel(2, [0, 0], {(0, 1): 1})).tolist() == [-1, 1, 1, -1]


def test_problem_diagonal_matches_direct_evaluation():
    m = mwis_ising(K3, Fraction(23, 2))
    assert np.allclose(problem_diagonal(m), ising_diagonal(m), atol=1e-12)


def test_schedule():
    s = AnnealSchedule(50, 0.01)
    assert s.steps == 5000
    assert (s.A(0), s.A(50), s.B(0), s.B(50)) == (1, 0, 0, 1)
    with pytest.raises(ValueError):
        AnnealSchedule(1, 2)
    with pytest.raises(ValueError):
        AnnealSchedule(0, 0)


def test_zero_time_keeps_uniform_state():
    m = mwis_ising(K3, 11)
    p = anneal_evolve(m, AnnealSchedule(1e-6, 1e-6)).probabilities()
    assert np.max(np.abs(p - 1 / 8)) <= 1e-6


def test_single_spin_adiabatic_against_dense_oracle():
    m = IsingModel(1, [1])
    psi = anneal_evolve(m, AnnealSchedule(50, 0.01))
    ground = ground_state_indices(m)
    assert ground.tolist() == [0]
    pop = psi.probabilities()[0]
    assert pop >= 0.99
    ref = np.abs(anneal_dense(m, 50, 10000)) ** 2
    assert abs(pop - ref[0]) < 1e-5


def test_small_instance_against_dense_oracle():
    m = mwis_ising(K3, 11)
    a = anneal_evolve(m, AnnealSchedule(5, 0.005)).probabilities()
    b = np.abs(anneal_dense(m, 5, 1000)) ** 2
    assert np.max(np.abs(a - b)) < 1e-4


def test_p4_population_matches_brute_force_ground():
    m = mwis_ising(P4)
    best = brute_force_qubo(ising_to_qubo(m)).assignment
    index = sum((1 - x) << i for i, x in enumerate(best))  # x = 1 - basis bit
    assert ground_state_indices(m).tolist() == [index]
    assert anneal_evolve(m, AnnealSchedule(50, 0.01)).probabilities()[index] >= 0.9


def test_split_step_is_second_order():
    m = mwis_ising(P4)
    probs = [anneal_evolve(m, AnnealSchedule(5.0, dt)).probabilities() for dt in (0.1, 0.05, 0.025)]
    coarse = np.max(np.abs(probs[0] - probs[1]))
    fine = np.max(np.abs(probs[1] - probs[2]))
    assert coarse / fine >= 3


def test_norm_after_ten_thousand_steps():
    m = mwis_ising(K3, 11)
    psi = anneal_evolve(m, AnnealSchedule(100, 0.01))
    assert abs(psi.norm_squared() - 1) <= 1e-6


def test_population_rises_with_time():
    for name, m in anneal_fixtures().items():
        ground = ground_state_indices(m)
        pops = [anneal_evolve(m, AnnealSchedule(T, 0.01)).probabilities()[ground].sum() for T in (1, 5, 20, 50)]
        assert all(b >= a - 0.02 for a, b in zip(pops, pops[1:])), (name, pops)


def test_trace_csv():
    trace = AnnealTrace()
    anneal_evolve(IsingModel(1, [1]), AnnealSchedule(1, 0.1), trace, trace_every=5)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "t,ground_state_population,norm"
    assert len(lines) == 4
    assert float(lines[1].split(",")[1]) == pytest.approx(0.5)


def test_state_vector_norm_check():
    psi = StateVector(1, np.array([1.0, 0.1], dtype=complex))
    with pytest.raises(NormalizationError):
        psi.check_norm()


def test_measure_basis_state():
    psi = StateVector.basis(2, 0b10)
    s = sample_state(psi, 100, seed=0)
    assert [(e.bitstring, e.count) for e in s.entries] == [("01", 100)]


def test_measure_uniform_state():
    s = sample_state(StateVector.uniform(2), 1000, seed=0)
    sigma = np.sqrt(1000 * 0.25 * 0.75)
    assert len(s.entries) == 4
    assert all(abs(e.count - 250) <= 5 * sigma for e in s.entries)


def test_measurement_determinism():
    psi = anneal_evolve(mwis_ising(K3, 11), AnnealSchedule(2, 0.1))
    assert sample_state(psi, 500, seed=9) == sample_state(psi, 500, seed=9)


def test_basis_bits_map_to_qubo_values():
    raw = sample_state(StateVector.basis(3, 0b101), 10, seed=0)
    q = ising_to_qubo(mwis_ising(K3, 11))
    s = basis_to_assignment(raw, q)
    assert s.best.bits == (0, 1, 0) and s.best.energy == -5


def test_quantum_annealing_samples():
    s = quantum_annealing(mwis_ising(K3, 11), AnnealSchedule(20, 0.01), 1000, seed=2)
    assert s.shots == 1000 and s.best.bits == (0, 1, 0)
    assert quantum_annealing(mwis_ising(K3, 11), AnnealSchedule(20, 0.01), 1000, seed=2) == s


def test_size_guard():
    with pytest.raises(SizeGuardError):
        anneal_evolve(IsingModel(17, [0] * 17))


def test_qaoa_identity_circuit():
    p = qaoa_state(mwis_ising(K3, 11), [0.0], [0.0]).probabilities()
    assert np.allclose(p, 1 / 8, atol=1e-15)


def test_qaoa_single_spin_matches_dense_oracle():
    m = IsingModel(1, [1])
    diag = problem_diagonal(m)
    got = expectation(qaoa_state(m, [np.pi / 4], [np.pi / 8]), diag)
    ref = qaoa_dense(m, [np.pi / 4], [np.pi / 8])
    assert abs(got - float(np.abs(ref) ** 2 @ diag)) <= 1e-10


def test_qaoa_state_matches_dense_oracle_depth_two():
    m = mwis_ising(K3, 11)
    a = qaoa_state(m, [0.05, 0.11], [0.7, 0.2]).amplitudes
    b = qaoa_dense(m, [0.05, 0.11], [0.7, 0.2])
    assert np.max(np.abs(a - b)) < 1e-10


def test_qaoa_unitarity():
    rng = np.random.default_rng(0)
    m = mwis_ising(P4)
    for _ in range(10):
        psi = qaoa_state(m, rng.uniform(0, 2 * np.pi, 3), rng.uniform(0, np.pi, 3))
        assert abs(psi.norm_squared() - 1) <= 1e-9


def test_qaoa_zero_hamiltonian():
    r = qaoa_optimize(IsingModel(2, [0, 0]), depth=1, restarts=2, maxiter=50, shots=10)
    assert r.energy == 0
    assert r.iterations <= 2 * 50


def test_qaoa_single_spin_reaches_grid_optimum():
    m = IsingModel(1, [1])
    diag = problem_diagonal(m)
    grid = min(
        float(np.abs(qaoa_dense(m, [g], [b])) ** 2 @ diag)
        for g in np.linspace(0, 2 * np.pi, 41)
        for b in np.linspace(0, np.pi, 21)
    )
    r = qaoa_optimize(m, depth=1, seed=0)
    assert r.energy <= -0.9
    assert r.energy <= grid + 1e-6


def test_qaoa_triangle_depth_two():
    m = mwis_ising(K3, 11)
    r = qaoa_optimize(m, depth=2, seed=0)
    p = qaoa_state(m, r.gammas, r.betas).probabilities()
    assert p[ground_state_indices(m)].sum() >= 0.25
    assert r.samples.shots == 1000


def test_qaoa_argument_errors():
    with pytest.raises(ValueError):
        qaoa_state(IsingModel(1, [1]), [0.1, 0.2], [0.1])
    with pytest.raises(ValueError):
        qaoa_optimize(IsingModel(1, [1]), depth=0)
