"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one row per kernel with the best-of-``repeat`` wall time for each
backend and the speedup. Exits with status 1 if the extension is not built.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from qopt import _fallback, kernels
from qopt.graph import generate_random_graph
from qopt.qubo import default_penalty, mwis_direct_qubo, qubo_to_ising
from qopt.solvers import _elimination_split


def enumerate_case(k=22, seed=5):
    g = generate_random_graph(k, 0.5, seed)
    q = mwis_direct_qubo(g, default_penalty(g))
    _, diag, upper, _ = q.scaled_integers()
    core, free = _elimination_split(q.n, [e for e in q.coefficients if e[0] != e[1]])
    sym = upper + upper.T
    ci, fi = np.array(core, dtype=np.int64), np.array(free, dtype=np.int64)
    args = (
        np.ascontiguousarray(diag[ci]),
        np.ascontiguousarray(sym[np.ix_(ci, ci)]),
        np.ascontiguousarray(diag[fi]),
        np.ascontiguousarray(sym[np.ix_(fi, ci)]).reshape(len(free), len(core)),
        ci,
        fi,
        q.n,
    )
    return f"enumerate_qubo (k={k}, core={len(core)})", lambda impl: impl.enumerate_qubo(*args)


def sa_case(k=40, shots=256, sweeps=100, seed=6):
    g = generate_random_graph(k, 0.5, seed)
    scale, h, jsym, _ = qubo_to_ising(mwis_direct_qubo(g, default_penalty(g))).scaled_integers()
    rng = np.random.default_rng(seed)
    spins = (2 * rng.integers(0, 2, size=(shots, k)) - 1).astype(np.int8)
    uniforms = rng.random((shots, sweeps, k))
    betas = np.geomspace(0.1, 10, sweeps)

    def run(impl):
        impl.sa_block(h, jsym, float(scale), betas, spins.copy(), uniforms)

    return f"sa_block (n={k}, shots={shots}, sweeps={sweeps})", run


def rotation_case(n=16, steps=50):
    rng = np.random.default_rng(7)
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    psi /= np.linalg.norm(psi)

    def run(impl):
        amp = psi.copy()
        for _ in range(steps):
            impl.apply_x_rotations(amp, n, np.cos(0.01), np.sin(0.01))

    return f"apply_x_rotations (n={n}, {steps} steps)", run


def best_time(fn, impl, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(impl)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    compiled = kernels.compiled()
    if compiled is None:
        print("compiled extension not built; reinstall with Cython available", file=sys.stderr)
        return 1
    print(f"{'kernel':<48} {'cython s':>10} {'numpy s':>10} {'speedup':>8}")
    for label, fn in (enumerate_case(), sa_case(), rotation_case()):
        tc = best_time(fn, compiled, args.repeat)
        tp = best_time(fn, _fallback, args.repeat)
        print(f"{label:<48} {tc:>10.4f} {tp:>10.4f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
