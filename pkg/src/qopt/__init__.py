"""QUBO/Ising modeling, solvers and benchmarking for constrained binary problems."""
