"""``qopt`` command line: gen, transform, solve, verify, bench.

Exit status is 0 on success, 1 on usage errors and 2 on runtime errors.
Diagnostics go to stderr; data goes to files or stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .graph import generate_random_graph, parse_graph, write_graph
from .model import mwis_model, to_qubo
from .qubo import (
    decode_mwis,
    default_penalty,
    ising_to_qubo,
    is_ising_text,
    mwis_direct_qubo,
    parse_ising,
    parse_qubo,
    qubo_to_ising,
    write_ising,
    write_qubo,
)
from .quantum import AnnealSchedule, AnnealTrace, anneal_evolve, basis_to_assignment, qaoa_optimize, sample_state
from .solvers import (
    SampleSet,
    brute_force_qubo,
    exact_sampleset,
    mwis_branch_and_bound,
    simulated_annealing,
)
from ._numbers import format_rational, parse_rational


SOLVER_NAMES = ("bruteforce", "bnb", "sa", "anneal", "qaoa")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QOPT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"QOPT_SEED must be an integer, got {env!r}") from None
    return 0


def _penalty(text: str, g):
    if text == "auto":
        return default_penalty(g)
    try:
        p = parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--penalty must be 'auto' or a positive number, got {text!r}") from None
    if p <= 0:
        raise UsageError("--penalty must be positive")
    return p


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _emit(data: bytes | str, out: str | None) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)


def _load_problem(data: bytes):
    """Returns ``(graph or None, qubo)``; graphs get the direct penalty QUBO later."""
    text = data.decode("utf-8")
    first = next((ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("c ")), "")
    if first.startswith("p "):
        return parse_graph(text), None
    if is_ising_text(text):
        return None, ising_to_qubo(parse_ising(text))
    return None, parse_qubo(text)


def cmd_gen(args) -> int:
    g = generate_random_graph(args.k, args.p, _seed(args))
    _emit(write_graph(g), args.output)
    return 0


def cmd_transform(args) -> int:
    g = parse_graph(_read(args.input))
    p = _penalty(args.penalty, g)
    if args.slack:
        q, varmap = to_qubo(mwis_model(g), p, encoding=args.encoding)
        note = f"c slack formulation, penalty {format_rational(p)}, vertices are qubits 0..{g.n - 1}\n"
    else:
        if args.encoding != "binary":
            raise UsageError("--encoding only applies to --slack")
        q = mwis_direct_qubo(g, p)
        note = f"c direct formulation, penalty {format_rational(p)}\n"
    body = write_ising(qubo_to_ising(q)) if args.ising else write_qubo(q)
    _emit(note.encode("utf-8") + body, args.output)
    print(f"transform: {q.n} qubits, penalty {format_rational(p)}", file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    if args.solver not in SOLVER_NAMES:
        raise ValueError(f"unknown solver {args.solver!r}; choose from {', '.join(SOLVER_NAMES)}")
    g, q = _load_problem(_read(args.input))
    seed = _seed(args)
    if g is not None:
        q = mwis_direct_qubo(g, _penalty(args.penalty, g))
    elif args.solver == "bnb":
        raise ValueError("the bnb solver needs a graph file, not a QUBO/Ising model")
    if args.trace and args.solver != "anneal":
        raise UsageError("--trace only applies to --solver anneal")

    certified = None
    if args.solver == "bruteforce":
        res = brute_force_qubo(q)
        samples = exact_sampleset(q, res, "bruteforce", seed)
        certified = res
    elif args.solver == "bnb":
        res = mwis_branch_and_bound(g)
        samples = exact_sampleset(q, res, "bnb", seed)
        certified = res
    elif args.solver == "sa":
        samples = simulated_annealing(
            qubo_to_ising(q), args.sweeps, (args.beta_start, args.beta_end), args.shots, seed
        )
    elif args.solver == "anneal":
        ising = qubo_to_ising(q)
        schedule = AnnealSchedule(args.T, args.dt)
        trace = AnnealTrace() if args.trace else None
        psi = anneal_evolve(ising, schedule, trace, trace_every=args.trace_every)
        raw = sample_state(psi, args.shots, seed)
        samples = basis_to_assignment(
            raw, q, solver="anneal", seed=seed,
            params={"T": args.T, "dt": args.dt, "shots": args.shots},
        )
        if trace is not None:
            Path(args.trace).write_text(trace.to_csv())
    else:
        samples = qaoa_optimize(
            qubo_to_ising(q), args.depth, args.restarts, args.maxiter, args.shots, seed
        ).samples

    _emit(samples.to_json(), args.output)
    best = samples.best
    line = f"{args.solver}: best energy {format_rational(best.energy)} ({best.bitstring}, {best.count}/{samples.shots} shots)"
    if certified is not None:
        line += f"; certified optimum {format_rational(certified.value)}"
    if g is not None:
        d = decode_mwis(g, best.bits[: g.n])
        line += f"; set weight {d.weight}, {'feasible' if d.feasible else 'infeasible'}"
    print(line, file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    samples = SampleSet.from_json(_read(args.samples))
    g = parse_graph(_read(args.graph))
    for e in samples.entries:
        if len(e.bits) < g.n:
            raise ValueError(f"sample {e.bitstring} is shorter than the graph's {g.n} vertices")
    optimum = mwis_branch_and_bound(g).value
    best = bench_mod.best_feasible_weight(samples, g)
    if best > optimum:
        print(
            f"verify: FAILED, best feasible weight {best} exceeds certified optimum {format_rational(optimum)}",
            file=sys.stderr,
        )
        return 2
    print(
        f"verify: ok, best feasible weight {best} <= certified optimum {format_rational(optimum)}"
        f" (gap {format_rational(optimum - best)})",
        file=sys.stderr,
    )
    return 0


def cmd_bench(args) -> int:
    doc = {}
    if args.config:
        doc = json.loads(_read(args.config))
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
    if args.seed is not None:
        doc["seed"] = args.seed
    elif "seed" not in doc and "QOPT_SEED" in os.environ:
        doc["seed"] = _seed(args)
    try:
        cfg = bench_mod.BenchmarkConfig.from_dict(doc)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    records = bench_mod.run_benchmark(cfg, timing=not args.no_timing)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_bytes(bench_mod.write_records(records))
    (out / "records.json").write_text(bench_mod.write_records_json(records))
    ran = [r for r in records if r.status == "ok"]
    if ran:
        for name, text in bench_mod.plot_tables(bench_mod.trend_summary(ran)).items():
            (out / name).write_text(text)
    skipped = len(records) - len(ran)
    print(f"bench: {len(records)} records ({skipped} skipped) written to {out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qopt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random MWIS instance")
    g.add_argument("--k", type=int, required=True, help="vertex count")
    g.add_argument("--p", type=float, default=0.5, help="edge probability")
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("transform", help="graph file to QUBO or Ising file")
    t.add_argument("input")
    form = t.add_mutually_exclusive_group()
    form.add_argument("--direct", action="store_true", help="penalty form without slack qubits (default)")
    form.add_argument("--slack", action="store_true", help="slack variables, equality penalties, binary discretization")
    t.add_argument("--penalty", default="auto")
    t.add_argument("--encoding", default="binary", choices=["binary", "one_hot", "domain_wall"],
                   help="encoding for integer slack variables")
    t.add_argument("--ising", action="store_true", help="write the Ising form")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("solve", help="solve a graph, QUBO or Ising file")
    s.add_argument("input")
    s.add_argument("--solver", required=True, help="bruteforce | bnb | sa | anneal | qaoa")
    s.add_argument("--seed", type=int)
    s.add_argument("--shots", type=int, default=1000)
    s.add_argument("--penalty", default="auto", help="used when the input is a graph")
    s.add_argument("--sweeps", type=int, default=100)
    s.add_argument("--beta-start", type=float, default=0.1)
    s.add_argument("--beta-end", type=float, default=10.0)
    s.add_argument("--T", type=float, default=50.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--trace", help="CSV of (t, ground_state_population, norm) for --solver anneal")
    s.add_argument("--trace-every", type=int, default=10)
    s.add_argument("--depth", type=int, default=1)
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--maxiter", type=int, default=400)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a SampleSet against the certified optimum")
    v.add_argument("samples")
    v.add_argument("--graph", required=True)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run the MWIS benchmark")
    b.add_argument("--config", help="flat JSON object overriding BenchmarkConfig defaults")
    b.add_argument("--seed", type=int)
    b.add_argument("--no-timing", action="store_true", help="zero the timing columns")
    b.add_argument("-o", "--output", required=True, help="output directory")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qopt: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError, KeyError, json.JSONDecodeError) as exc:
        print(f"qopt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
