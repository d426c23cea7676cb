"""State-vector simulation of quantum annealing and QAOA on Ising models.

Conventions
-----------
* Amplitude index ``b`` holds qubit ``i`` in bit ``i`` of ``b``; bitstrings
  list qubit 0 first.
* Basis bit 0 is spin ``+1`` and bit 1 is spin ``-1``. Because QUBO
  variables follow ``x = (s + 1) / 2``, a measured basis bit ``b`` is the
  QUBO value ``x = 1 - b``; :func:`basis_to_assignment` applies this.
* The driver is ``H0 = -sum_i X_i``, whose ground state is the uniform
  superposition. Annealing follows ``H(t) = (1 - t/T) H0 + (t/T) Hp`` with
  ``hbar = 1``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .qubo import IsingModel, Qubo, ising_to_qubo
from .solvers import Sample, SampleSet, SizeGuardError

MAX_DIAGONAL_QUBITS = 20
MAX_DENSE_QUBITS = 16
NORM_TOLERANCE = 1e-6


class NormalizationError(RuntimeError):
    pass


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray

    @classmethod
    def uniform(cls, n: int) -> "StateVector":
        size = 1 << n
        return cls(n, np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128))

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        amp = np.zeros(1 << n, dtype=np.complex128)
        amp[index] = 1.0
        return cls(n, amp)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def check_norm(self, tol: float = NORM_TOLERANCE) -> None:
        drift = abs(self.norm_squared() - 1.0)
        if drift > tol:
            raise NormalizationError(f"state norm drifted by {drift:.3e} (> {tol:g})")


@dataclass(frozen=True)
class AnnealSchedule:
    """Linear schedule ``A(t) = 1 - t/T``, ``B(t) = t/T`` sampled with step ``dt``.

    The step count is ``round(T / dt)`` (at least one) and the step is
    adjusted to ``T / steps`` so the run ends exactly at ``T``.
    """

    T: float = 50.0
    dt: float = 0.01

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"total time must be positive, got {self.T}")
        if not 0 < self.dt <= self.T:
            raise ValueError(f"need 0 < dt <= T, got dt={self.dt}, T={self.T}")

    @property
    def steps(self) -> int:
        return max(1, int(round(self.T / self.dt)))

    @property
    def step(self) -> float:
        return self.T / self.steps

    def A(self, t: float) -> float:
        return 1.0 - t / self.T

    def B(self, t: float) -> float:
        return t / self.T


def _basis_spins(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return 1 - 2 * bits


def problem_diagonal_scaled(m: IsingModel) -> tuple[int, np.ndarray]:
    """``(scale, energies)``: exact integer energies times ``scale`` per basis state."""
    if m.n > MAX_DIAGONAL_QUBITS:
        raise SizeGuardError(f"{m.n} spins exceed the diagonal limit of {MAX_DIAGONAL_QUBITS}")
    scale, h, jsym, offset = m.scaled_integers()
    s = _basis_spins(m.n)
    energy = offset - s @ h - np.einsum("ij,ij->i", s @ np.triu(jsym, 1), s)
    return scale, energy


def problem_diagonal(m: IsingModel) -> np.ndarray:
    scale, energy = problem_diagonal_scaled(m)
    return energy / scale


def ground_state_indices(m: IsingModel) -> np.ndarray:
    _, energy = problem_diagonal_scaled(m)
    return np.flatnonzero(energy == energy.min())


def _guard(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise SizeGuardError(f"{n} qubits exceed the state-vector limit of {MAX_DENSE_QUBITS}")


@dataclass
class AnnealTrace:
    rows: list[tuple[float, float, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "ground_state_population", "norm"])
        for t, pop, norm in self.rows:
            w.writerow([f"{t:.6g}", f"{pop:.12g}", f"{norm:.15g}"])
        return buf.getvalue()


def anneal_evolve(
    m: IsingModel,
    schedule: AnnealSchedule = AnnealSchedule(),
    trace: AnnealTrace | None = None,
    trace_every: int = 1,
) -> StateVector:
    """Integrate the annealing Schroedinger equation with Strang splitting.

    Each step applies half a problem phase, the full driver step as
    per-qubit X rotations, then the other half phase, with ``A`` and ``B``
    taken at the step midpoint.
    """
    _guard(m.n)
    diag = problem_diagonal(m)
    ground = ground_state_indices(m) if trace is not None else None
    psi = StateVector.uniform(m.n)
    amp = psi.amplitudes
    dt = schedule.step
    if trace is not None:
        trace.rows.append((0.0, float(np.sum(np.abs(amp[ground]) ** 2)), psi.norm_squared()))
    for k in range(schedule.steps):
        t_mid = (k + 0.5) * dt
        a, b = schedule.A(t_mid), schedule.B(t_mid)
        half_phase = np.exp((-0.5j * dt * b) * diag)
        amp *= half_phase
        theta = dt * a
        kernels.apply_x_rotations(amp, m.n, np.cos(theta), np.sin(theta))
        amp *= half_phase
        if trace is not None and ((k + 1) % trace_every == 0 or k + 1 == schedule.steps):
            trace.rows.append(
                ((k + 1) * dt, float(np.sum(np.abs(amp[ground]) ** 2)), psi.norm_squared())
            )
    psi.check_norm()
    return psi


def sample_state(psi: StateVector, shots: int, seed: int = 0, energy=None, **meta) -> SampleSet:
    """Born-rule measurement of ``shots`` copies; entries hold raw basis bits.

    ``energy`` maps a bit tuple to its energy (0 when omitted).
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    psi.check_norm()
    probs = psi.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    entries = []
    for idx in np.flatnonzero(counts):
        bits = tuple((int(idx) >> i) & 1 for i in range(psi.n))
        e = energy(bits) if energy is not None else Fraction(0)
        entries.append(Sample(bits, e, int(counts[idx])))
    meta.setdefault("solver", "measure")
    return SampleSet(entries, seed=seed, **meta)


def basis_to_assignment(samples: SampleSet, q: Qubo, **meta) -> SampleSet:
    """Re-express basis-bit samples as QUBO assignments (``x = 1 - b``) with exact energies."""
    rows = np.array([e.bits for e in samples.entries], dtype=np.uint8).reshape(-1, q.n)
    arr = np.repeat(1 - rows, [e.count for e in samples.entries], axis=0)
    meta.setdefault("solver", samples.solver)
    meta.setdefault("seed", samples.seed)
    meta.setdefault("params", dict(samples.params))
    return SampleSet.from_assignments(q, arr, **meta)


def quantum_annealing(
    m: IsingModel,
    schedule: AnnealSchedule = AnnealSchedule(),
    shots: int = 1000,
    seed: int = 0,
) -> SampleSet:
    """Anneal, measure, and return QUBO-variable samples."""
    psi = anneal_evolve(m, schedule)
    raw = sample_state(psi, shots, seed)
    params = {"T": schedule.T, "dt": schedule.dt, "shots": shots}
    return basis_to_assignment(raw, ising_to_qubo(m), solver="anneal", seed=seed, params=params)


def qaoa_state(m: IsingModel, gammas, betas, diag: np.ndarray | None = None) -> StateVector:
    """``prod_k exp(-i beta_k sum X) exp(-i gamma_k Hp)`` applied to ``|+>^n``."""
    gammas = np.atleast_1d(np.asarray(gammas, dtype=float))
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    if gammas.shape != betas.shape or gammas.ndim != 1 or gammas.size < 1:
        raise ValueError(f"need equal-length gamma/beta vectors, got {gammas.size} and {betas.size}")
    _guard(m.n)
    if diag is None:
        diag = problem_diagonal(m)
    psi = StateVector.uniform(m.n)
    amp = psi.amplitudes
    for gamma, beta in zip(gammas, betas):
        amp *= np.exp(-1j * gamma * diag)
        kernels.apply_x_rotations(amp, m.n, np.cos(beta), -np.sin(beta))
    return psi


def expectation(psi: StateVector, diag: np.ndarray) -> float:
    return float(psi.probabilities() @ diag)


@dataclass
class QaoaResult:
    gammas: np.ndarray
    betas: np.ndarray
    energy: float
    samples: SampleSet
    evaluations: int
    iterations: int


QAOA_DEFAULTS = {"depth": 1, "restarts": 8, "maxiter": 400}


def coefficient_norm(m: IsingModel) -> float:
    """``sum |h_i| + sum |J_ij|``; 1 for the zero model."""
    total = float(sum(abs(v) for v in m.h) + sum(abs(v) for v in m.J.values()))
    return total if total > 0 else 1.0


def qaoa_optimize(
    m: IsingModel,
    depth: int = 1,
    restarts: int = 8,
    maxiter: int = 400,
    shots: int = 1000,
    seed: int = 0,
    normalize: bool = True,
    xatol: float = 1e-4,
    fatol: float = 1e-6,
) -> QaoaResult:
    """Minimize ``<Hp>`` over the ``2 * depth`` angles with Nelder-Mead.

    Starting points are drawn uniformly from ``[0, 2pi)`` for the phase
    angles and ``[0, pi)`` for the mixer angles; the best of ``restarts``
    local searches is kept and ``shots`` measurements are taken there.
    With ``normalize`` the phase angles are searched in units of
    ``1 / coefficient_norm(m)``, which keeps the landscape smooth when the
    penalty terms are large. Returned ``gammas`` are always in raw units.
    """
    if depth < 1:
        raise ValueError("QAOA depth must be >= 1")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    _guard(m.n)
    diag = problem_diagonal(m)
    unit = 1.0 / coefficient_norm(m) if normalize else 1.0
    rng = np.random.default_rng(seed)

    def objective(theta):
        return expectation(qaoa_state(m, unit * theta[:depth], theta[depth:], diag), diag)

    best = None
    evaluations = iterations = 0
    for _ in range(restarts):
        x0 = np.concatenate([rng.uniform(0, 2 * np.pi, depth), rng.uniform(0, np.pi, depth)])
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxiter": maxiter, "xatol": xatol, "fatol": fatol},
        )
        evaluations += res.nfev
        iterations += res.nit
        if best is None or res.fun < best.fun:
            best = res
    gammas, betas = unit * best.x[:depth], best.x[depth:].copy()
    psi = qaoa_state(m, gammas, betas, diag)
    raw = sample_state(psi, shots, seed)
    params = {"depth": depth, "restarts": restarts, "maxiter": maxiter, "shots": shots,
              "normalize": normalize, "gammas": gammas.tolist(), "betas": betas.tolist()}
    samples = basis_to_assignment(raw, ising_to_qubo(m), solver="qaoa", seed=seed, params=params)
    return QaoaResult(gammas, betas, float(best.fun), samples, evaluations, iterations)
