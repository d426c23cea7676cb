"""MWIS benchmark harness.

For every size ``k`` and instance index a random graph is drawn, its
optimum certified by branch and bound, and each configured solver is run
on the direct penalty QUBO. One :class:`BenchmarkRecord` per
(instance, solver) captures a build/solve time split, the best feasible
value, the gap to the optimum and the fraction of shots that hit it.
"""
from __future__ import annotations

import csv
import io
import json
import time
import zlib
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

import numpy as np
from scipy.stats import spearmanr

from ._numbers import as_fraction, format_rational, parse_rational
from .graph import WeightedGraph, generate_random_graph
from .qubo import decode_mwis, default_penalty, mwis_direct_qubo, qubo_to_ising
from .quantum import AnnealSchedule, MAX_DENSE_QUBITS, qaoa_optimize, quantum_annealing
from .solvers import (
    SampleSet,
    SizeGuardError,
    brute_force_qubo,
    exact_sampleset,
    mwis_branch_and_bound,
    simulated_annealing,
)

SOLVERS = ("bnb", "bruteforce", "sa", "anneal", "qaoa")
EXACT_SOLVERS = ("bnb", "bruteforce")
CSV_HEADER = (
    "instance_id,size,seed,solver,build_time_ms,solve_time_ms,shots,"
    "best_value,optimal_value,gap,success_freq,feasible,status"
)


class ConfigError(ValueError):
    pass


@dataclass
class BenchmarkConfig:
    sizes: list = field(default_factory=lambda: [4, 6, 8, 10, 12])
    instances_per_size: int = 5
    edge_probability: float = 0.5
    seed: int = 0
    solvers: list = field(default_factory=lambda: ["bnb", "sa", "anneal"])
    shots: int = 1000
    penalty: object = "auto"
    sa_sweeps: int = 100
    sa_beta_start: float = 0.1
    sa_beta_end: float = 10.0
    anneal_T: float = 50.0
    anneal_dt: float = 0.01
    qaoa_depth: int = 1
    qaoa_restarts: int = 8
    qaoa_maxiter: int = 400

    def __post_init__(self):
        if not self.sizes or any(int(k) < 1 for k in self.sizes):
            raise ConfigError("sizes must be a non-empty list of positive integers")
        self.sizes = [int(k) for k in self.sizes]
        if self.instances_per_size < 1:
            raise ConfigError("instances_per_size must be >= 1")
        if not 0 <= self.edge_probability <= 1:
            raise ConfigError("edge_probability must lie in [0, 1]")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        unknown = [s for s in self.solvers if s not in SOLVERS]
        if unknown:
            raise ConfigError(f"unknown solver(s) {unknown}; choose from {list(SOLVERS)}")
        if self.penalty != "auto":
            try:
                if as_fraction(self.penalty) <= 0:
                    raise ConfigError("penalty must be positive")
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"penalty must be 'auto' or a positive number: {exc}") from None

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchmarkConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "BenchmarkConfig":
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(doc)

    def penalty_for(self, g: WeightedGraph) -> Fraction:
        return Fraction(default_penalty(g)) if self.penalty == "auto" else as_fraction(self.penalty)


@dataclass
class BenchmarkRecord:
    instance_id: int
    size: int
    seed: int
    solver: str
    build_time_ms: int = 0
    solve_time_ms: int = 0
    shots: int = 0
    best_value: Fraction | None = None
    optimal_value: Fraction | None = None
    gap: Fraction | None = None
    success_freq: Fraction | None = None
    feasible: bool | None = None
    status: str = "ok"

    def sort_key(self):
        return (self.size, self.instance_id, self.solver)


def derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


def _solver_tag(name: str) -> int:
    return zlib.crc32(name.encode("ascii"))


def success_frequency(samples: SampleSet, target, g: WeightedGraph) -> Fraction:
    """Share of shots whose first ``g.n`` qubits form an independent set of weight ``target``."""
    shots = samples.shots
    if shots == 0:
        raise ValueError("sample set has no shots")
    target = as_fraction(target)
    hits = 0
    for e in samples.entries:
        d = decode_mwis(g, e.bits[: g.n])
        if d.feasible and d.weight == target:
            hits += e.count
    return Fraction(hits, shots)


def best_feasible_weight(samples: SampleSet, g: WeightedGraph) -> int:
    """Heaviest independent set among the samples (0, the empty set, if none is feasible)."""
    best = 0
    for e in samples.entries:
        d = decode_mwis(g, e.bits[: g.n])
        if d.feasible and d.weight > best:
            best = d.weight
    return best


def _run_solver(name, g, penalty, cfg, seed):
    """Return ``(build_seconds, solve_seconds, samples)`` for one solver on one graph."""
    t0 = time.perf_counter()
    q = mwis_direct_qubo(g, penalty)
    ising = qubo_to_ising(q) if name in ("sa", "anneal", "qaoa") else None
    if name in ("anneal", "qaoa") and g.n > MAX_DENSE_QUBITS:
        raise SizeGuardError(f"{g.n} qubits exceed the state-vector limit of {MAX_DENSE_QUBITS}")
    t1 = time.perf_counter()
    if name == "bnb":
        res = mwis_branch_and_bound(g)
        samples = exact_sampleset(q, res, "bnb")
    elif name == "bruteforce":
        res = brute_force_qubo(q)
        samples = exact_sampleset(q, res, "bruteforce")
    elif name == "sa":
        samples = simulated_annealing(
            ising, cfg.sa_sweeps, (cfg.sa_beta_start, cfg.sa_beta_end), cfg.shots, seed
        )
    elif name == "anneal":
        samples = quantum_annealing(ising, AnnealSchedule(cfg.anneal_T, cfg.anneal_dt), cfg.shots, seed)
    elif name == "qaoa":
        samples = qaoa_optimize(
            ising, cfg.qaoa_depth, cfg.qaoa_restarts, cfg.qaoa_maxiter, cfg.shots, seed
        ).samples
    else:
        raise ConfigError(f"unknown solver {name!r}")
    t2 = time.perf_counter()
    return t1 - t0, t2 - t1, samples


def run_benchmark(cfg: BenchmarkConfig, timing: bool = True, keep_samples: dict | None = None):
    """Run every (size, instance, solver) cell; returns records in canonical order.

    ``keep_samples``, if given, is filled with ``{(size, instance, solver): SampleSet}``.
    """
    records = []
    for k in cfg.sizes:
        for idx in range(cfg.instances_per_size):
            gseed = derive_seed(cfg.seed, k, idx)
            g = generate_random_graph(k, cfg.edge_probability, gseed)
            optimum = mwis_branch_and_bound(g).value
            penalty = cfg.penalty_for(g)
            for name in cfg.solvers:
                sseed = derive_seed(cfg.seed, k, idx, _solver_tag(name))
                rec = BenchmarkRecord(idx, k, gseed, name, optimal_value=optimum)
                try:
                    build_s, solve_s, samples = _run_solver(name, g, penalty, cfg, sseed)
                except SizeGuardError as exc:
                    rec.status = f"skipped: size guard ({exc})"
                    records.append(rec)
                    continue
                if keep_samples is not None:
                    keep_samples[(k, idx, name)] = samples
                best = best_feasible_weight(samples, g)
                rec.build_time_ms = int(round(build_s * 1000)) if timing else 0
                rec.solve_time_ms = int(round(solve_s * 1000)) if timing else 0
                rec.shots = samples.shots
                rec.best_value = Fraction(best)
                rec.gap = optimum - best
                rec.feasible = decode_mwis(g, samples.best.bits[: g.n]).feasible
                if name in EXACT_SOLVERS:
                    rec.success_freq = Fraction(1)
                else:
                    rec.success_freq = success_frequency(samples, optimum, g)
                records.append(rec)
    return sorted(records, key=BenchmarkRecord.sort_key)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)


def write_records(records) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for r in sorted(records, key=BenchmarkRecord.sort_key):
        w.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER.split(",")])
    return buf.getvalue().encode("utf-8")


def parse_records(data: bytes | str) -> list[BenchmarkRecord]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = list(csv.reader(io.StringIO(data)))
    if not rows or ",".join(rows[0]) != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    out = []
    for row in rows[1:]:
        d = dict(zip(rows[0], row))

        def rat(key):
            return parse_rational(d[key]) if d[key] else None

        out.append(
            BenchmarkRecord(
                instance_id=int(d["instance_id"]),
                size=int(d["size"]),
                seed=int(d["seed"]),
                solver=d["solver"],
                build_time_ms=int(d["build_time_ms"]),
                solve_time_ms=int(d["solve_time_ms"]),
                shots=int(d["shots"]),
                best_value=rat("best_value"),
                optimal_value=rat("optimal_value"),
                gap=rat("gap"),
                success_freq=rat("success_freq"),
                feasible={"true": True, "false": False, "": None}[d["feasible"]],
                status=d["status"],
            )
        )
    return out


def write_records_json(records) -> str:
    rows = []
    for r in sorted(records, key=BenchmarkRecord.sort_key):
        row = asdict(r)
        for key, v in row.items():
            if isinstance(v, Fraction):
                row[key] = format_rational(v)
        rows.append(row)
    return json.dumps(rows, indent=2) + "\n"


@dataclass(frozen=True)
class TrendRow:
    solver: str
    size: int
    instances: int
    mean_success: Fraction
    mean_gap: Fraction
    mean_solve_time_ms: Fraction


def trend_summary(records) -> list[TrendRow]:
    """Per (solver, size) means over the records that ran."""
    groups: dict[tuple[str, int], list[BenchmarkRecord]] = {}
    for r in records:
        if r.status == "ok":
            groups.setdefault((r.solver, r.size), []).append(r)
    if not groups:
        raise ValueError("no completed records to summarize")
    rows = []
    for (solver, size), rs in sorted(groups.items()):
        n = len(rs)
        rows.append(
            TrendRow(
                solver,
                size,
                n,
                sum((r.success_freq for r in rs), Fraction(0)) / n,
                sum((r.gap for r in rs), Fraction(0)) / n,
                Fraction(sum(r.solve_time_ms for r in rs), n),
            )
        )
    return rows


def spearman(xs, ys) -> float:
    """Rank correlation; 0 when either side is constant."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or np.all(xs == xs[0]) or np.all(ys == ys[0]):
        return 0.0
    return float(spearmanr(xs, ys).statistic)


def plot_tables(rows: list[TrendRow]) -> dict[str, str]:
    """Two-column TSV files per solver, keyed by file name."""
    out = {}
    for solver in sorted({r.solver for r in rows}):
        mine = [r for r in rows if r.solver == solver]
        out[f"{solver}_success.tsv"] = "size\tmean_success_frequency\n" + "".join(
            f"{r.size}\t{float(r.mean_success):.6g}\n" for r in mine
        )
        out[f"{solver}_time.tsv"] = "size\tmean_solve_time_ms\n" + "".join(
            f"{r.size}\t{float(r.mean_solve_time_ms):.6g}\n" for r in mine
        )
    return out
