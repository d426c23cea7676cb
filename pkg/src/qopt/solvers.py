"""Classical solvers: exhaustive QUBO search, MWIS branch and bound, simulated annealing."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from ._numbers import format_rational, parse_rational
from .graph import WeightedGraph
from .qubo import IsingModel, Qubo, ising_to_qubo

MAX_ENUMERATED_QUBITS = 24
_INT_LIMIT = 1 << 62


class SizeGuardError(ValueError):
    """Problem too large for an exhaustive or dense method."""


@dataclass(frozen=True)
class Sample:
    bits: tuple[int, ...]
    energy: Fraction
    count: int

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass
class SampleSet:
    """Aggregated shots. ``bits[i]`` is the value of qubit ``i``."""

    entries: list[Sample]
    solver: str = ""
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        merged: dict[tuple[int, ...], Sample] = {}
        for e in self.entries:
            if e.count < 1:
                raise ValueError("sample counts must be positive")
            if e.bits in merged:
                prev = merged[e.bits]
                merged[e.bits] = Sample(e.bits, prev.energy, prev.count + e.count)
            else:
                merged[e.bits] = e
        self.entries = sorted(merged.values(), key=lambda s: (s.energy, s.bits))

    @property
    def shots(self) -> int:
        return sum(e.count for e in self.entries)

    @property
    def best(self) -> Sample:
        return self.entries[0]

    @classmethod
    def from_assignments(cls, q: Qubo, assignments: np.ndarray, **meta) -> "SampleSet":
        """Count rows of a ``(shots, n)`` 0/1 array and attach exact energies from ``q``."""
        assignments = np.asarray(assignments, dtype=np.uint8)
        if assignments.ndim != 2 or assignments.shape[1] != q.n:
            raise ValueError(f"expected a (shots, {q.n}) array")
        uniq, counts = np.unique(assignments, axis=0, return_counts=True)
        energies = qubo_energies(q, uniq)
        entries = [
            Sample(tuple(int(b) for b in row), e, int(c))
            for row, e, c in zip(uniq, energies, counts)
        ]
        return cls(entries, **meta)

    def to_json(self) -> str:
        doc = {
            "solver": self.solver,
            "seed": self.seed,
            "shots": self.shots,
            "params": self.params,
            "entries": [
                {"bits": e.bitstring, "energy": format_rational(e.energy), "count": e.count}
                for e in self.entries
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text: str | bytes) -> "SampleSet":
        doc = json.loads(text)
        entries = []
        for item in doc["entries"]:
            bits = tuple(int(ch) for ch in item["bits"])
            if any(b not in (0, 1) for b in bits):
                raise ValueError(f"invalid bitstring {item['bits']!r}")
            entries.append(Sample(bits, parse_rational(str(item["energy"])), int(item["count"])))
        ss = cls(entries, doc.get("solver", ""), doc.get("seed"), doc.get("params", {}))
        if "shots" in doc and doc["shots"] != ss.shots:
            raise ValueError(f"shots field {doc['shots']} disagrees with entry counts {ss.shots}")
        return ss


def qubo_energies(q: Qubo, assignments: np.ndarray) -> list[Fraction]:
    """Exact energies of many assignments via integer scaling."""
    scale, diag, upper, offset = q.scaled_integers()
    bound = abs(offset) + int(np.abs(diag).sum()) + int(np.abs(upper).sum())
    x = np.asarray(assignments, dtype=np.int64)
    if bound >= _INT_LIMIT:
        from .qubo import evaluate_qubo
        return [evaluate_qubo(q, row.tolist()) for row in x]
    e = offset + x @ diag + np.einsum("ij,ij->i", x @ upper, x)
    return [Fraction(int(v), scale) for v in e]


@dataclass(frozen=True)
class ExactResult:
    value: Fraction
    assignment: tuple[int, ...]
    num_optima: int
    certified: bool = True
    nodes: int = 0


def _elimination_split(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[list[int], list[int]]:
    """Split qubits into an enumerated core and a set with no couplings among themselves.

    Greedy: repeatedly free the lowest-degree qubit and move its neighbours to the core.
    """
    adj: list[set[int]] = [set() for _ in range(n)]
    for i, j in pairs:
        adj[i].add(j)
        adj[j].add(i)
    free, core = [], []
    state = [0] * n  # 0 undecided, 1 free, 2 core
    for v in sorted(range(n), key=lambda v: (len(adj[v]), v)):
        if state[v]:
            continue
        state[v] = 1
        free.append(v)
        for u in adj[v]:
            if not state[u]:
                state[u] = 2
                core.append(u)
    return sorted(core), sorted(free)


def brute_force_qubo(q: Qubo, max_qubits: int = MAX_ENUMERATED_QUBITS) -> ExactResult:
    """Certified minimum of a QUBO by exhaustive enumeration.

    Qubits that share no coupling with each other are minimized in closed
    form for each enumerated assignment of the rest, so the search is
    exhaustive over ``2^core`` states. Ties are counted over all ``2^n``
    assignments and the reported optimum is the lexicographically first.
    """
    pairs = [k for k in q.coefficients if k[0] != k[1]]
    core, free = _elimination_split(q.n, pairs)
    if len(core) > max_qubits:
        raise SizeGuardError(
            f"exhaustive search over {len(core)} coupled qubits exceeds the limit of {max_qubits}"
        )
    if q.n > 62:
        raise SizeGuardError("more than 62 qubits cannot be counted exactly")
    scale, diag, upper, offset = q.scaled_integers()
    if abs(offset) + int(np.abs(diag).sum()) + int(np.abs(upper).sum()) >= _INT_LIMIT:
        raise SizeGuardError("coefficients too large for exact 64-bit enumeration")
    sym = upper + upper.T
    core_idx = np.array(core, dtype=np.int64)
    free_idx = np.array(free, dtype=np.int64)
    core_lin = np.ascontiguousarray(diag[core_idx])
    core_sym = np.ascontiguousarray(sym[np.ix_(core_idx, core_idx)])
    free_lin = np.ascontiguousarray(diag[free_idx])
    free_coup = np.ascontiguousarray(sym[np.ix_(free_idx, core_idx)]).reshape(len(free), len(core))
    best, count, full = kernels.enumerate_qubo(
        core_lin, core_sym, free_lin, free_coup, core_idx, free_idx, q.n
    )
    return ExactResult(
        Fraction(best + offset, scale),
        tuple(int(b) for b in full),
        int(count),
        certified=True,
        nodes=1 << len(core),
    )


def mwis_branch_and_bound(g: WeightedGraph) -> ExactResult:
    """Certified maximum-weight independent set.

    Bound: current weight plus all undecided weight. Branches on the
    undecided vertex of highest undecided degree, including it first.
    Subtrees whose bound ties the incumbent are still explored so that
    ``num_optima`` counts every optimal set.
    """
    n = g.n
    w = g.weights
    adj = [0] * n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u

    best_weight = -1
    best_set = 0
    count = 0
    nodes = 0

    def weight_of(mask):
        total = 0
        while mask:
            low = mask & -mask
            total += w[low.bit_length() - 1]
            mask ^= low
        return total

    def search(undecided, chosen, cur, rest):
        nonlocal best_weight, best_set, count, nodes
        nodes += 1
        if cur + rest < best_weight:
            return
        pick, pick_deg = -1, -1
        m = undecided
        while m:
            low = m & -m
            v = low.bit_length() - 1
            d = (adj[v] & undecided).bit_count()
            if d > pick_deg:
                pick, pick_deg = v, d
            m ^= low
        if pick_deg <= 0:
            # leaf: every undecided vertex is isolated, take them all
            total = cur + rest
            chosen |= undecided
            if total > best_weight:
                best_weight, best_set, count = total, chosen, 1
            elif total == best_weight:
                count += 1
            return
        bit = 1 << pick
        removed = undecided & (adj[pick] | bit)
        search(undecided & ~removed, chosen | bit, cur + w[pick], rest - weight_of(removed))
        search(undecided & ~bit, chosen, cur, rest - w[pick])

    search((1 << n) - 1, 0, 0, sum(w))
    assignment = tuple((best_set >> i) & 1 for i in range(n))
    return ExactResult(Fraction(best_weight), assignment, count, certified=True, nodes=nodes)


SA_DEFAULTS = {"sweeps": 100, "beta_start": 0.1, "beta_end": 10.0, "shots": 1000}
_SA_BLOCK = 256


def simulated_annealing(
    m: IsingModel,
    sweeps: int = 100,
    beta_schedule: tuple[float, float] = (0.1, 10.0),
    shots: int = 1000,
    seed: int = 0,
) -> SampleSet:
    """Metropolis single-spin-flip annealing with a geometric inverse-temperature ramp.

    Each shot is an independent restart seeded from ``(seed, shot)``.
    Samples are returned as binary assignments ``x = (s + 1) / 2``.
    """
    beta_start, beta_end = map(float, beta_schedule)
    if not (0 < beta_start <= beta_end):
        raise ValueError(f"invalid beta schedule ({beta_start}, {beta_end}): need 0 < start <= end")
    if sweeps < 1 or shots < 1:
        raise ValueError("sweeps and shots must be positive")
    scale, h, jsym, _ = m.scaled_integers()
    betas = np.geomspace(beta_start, beta_end, sweeps)
    n = m.n
    out = np.empty((shots, n), dtype=np.int8)
    for lo in range(0, shots, _SA_BLOCK):
        hi = min(shots, lo + _SA_BLOCK)
        spins = np.empty((hi - lo, n), dtype=np.int8)
        uniforms = np.empty((hi - lo, sweeps, n))
        for r in range(lo, hi):
            rng = np.random.default_rng([seed, r])
            spins[r - lo] = 2 * rng.integers(0, 2, size=n) - 1
            uniforms[r - lo] = rng.random((sweeps, n))
        kernels.sa_block(h, jsym, float(scale), betas, spins, uniforms)
        out[lo:hi] = spins
    params = {"sweeps": sweeps, "beta_start": beta_start, "beta_end": beta_end, "shots": shots}
    return SampleSet.from_assignments(
        ising_to_qubo(m), (out + 1) // 2, solver="sa", seed=seed, params=params
    )


def exact_sampleset(q: Qubo, result: ExactResult, solver: str, seed=None) -> SampleSet:
    """Single-shot SampleSet holding an exact solver's optimum."""
    return SampleSet.from_assignments(q, np.array([result.assignment]), solver=solver, seed=seed, params={})


def best_feasible(samples: SampleSet, feasible, value) -> tuple[Sample | None, int | Fraction | None]:
    """Highest ``value(bits)`` among samples with ``feasible(bits)`` true."""
    best = None
    best_val = None
    for e in samples.entries:
        if feasible(e.bits):
            v = value(e.bits)
            if best_val is None or v > best_val:
                best, best_val = e, v
    return best, best_val
