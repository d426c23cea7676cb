"""QUBO and Ising models with exact rational coefficients.

A :class:`Qubo` is always a minimization problem ``x^T Q x + offset`` over
``x in {0,1}^n`` with upper-triangular storage. An :class:`IsingModel` has
energy ``-sum J_ij s_i s_j - sum h_i s_i + offset`` over ``s in {-1,+1}^n``.
The two are related by ``x_i = (s_i + 1) / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ._numbers import as_fraction, common_scale, format_rational, parse_rational
from .graph import WeightedGraph, max_degree


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Qubo:
    n: int
    coefficients: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        canon: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.coefficients.items():
            i, j = int(i), int(j)
            if i > j:
                i, j = j, i
            if not (0 <= i and j < self.n):
                raise ValueError(f"index pair ({i}, {j}) out of range for n={self.n}")
            canon[(i, j)] = canon.get((i, j), Fraction(0)) + as_fraction(c)
        canon = {k: v for k, v in sorted(canon.items()) if v != 0}
        object.__setattr__(self, "coefficients", canon)
        object.__setattr__(self, "offset", as_fraction(self.offset))

    def linear(self, i: int) -> Fraction:
        return self.coefficients.get((i, i), Fraction(0))

    def scaled_integers(self):
        """Return ``(scale, diag, upper, offset)`` with integer entries equal to ``scale`` times the model.

        ``diag`` is an int64 vector, ``upper`` a dense strictly-upper int64
        matrix. Exact as long as the entries fit in 64 bits.
        """
        scale = common_scale(list(self.coefficients.values()) + [self.offset])
        diag = np.zeros(self.n, dtype=np.int64)
        upper = np.zeros((self.n, self.n), dtype=np.int64)
        for (i, j), c in self.coefficients.items():
            v = int(c * scale)
            if i == j:
                diag[i] = v
            else:
                upper[i, j] = v
        return scale, diag, upper, int(self.offset * scale)

    def to_dense(self) -> np.ndarray:
        """Float upper-triangular matrix, linear terms on the diagonal."""
        q = np.zeros((self.n, self.n))
        for (i, j), c in self.coefficients.items():
            q[i, j] = float(c)
        return q


@dataclass(frozen=True)
class IsingModel:
    n: int
    h: tuple[Fraction, ...] = ()
    J: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        h = tuple(as_fraction(v) for v in self.h) or (Fraction(0),) * self.n
        if len(h) != self.n:
            raise ValueError(f"h has {len(h)} entries, expected {self.n}")
        canon: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.J.items():
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-coupling on spin {i}")
            if i > j:
                i, j = j, i
            if not (0 <= i and j < self.n):
                raise ValueError(f"coupling ({i}, {j}) out of range for n={self.n}")
            canon[(i, j)] = canon.get((i, j), Fraction(0)) + as_fraction(c)
        canon = {k: v for k, v in sorted(canon.items()) if v != 0}
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", canon)
        object.__setattr__(self, "offset", as_fraction(self.offset))

    def scaled_integers(self):
        """``(scale, h, Jsym, offset)`` as int64 arrays; ``Jsym`` is the full symmetric matrix."""
        scale = common_scale(list(self.h) + list(self.J.values()) + [self.offset])
        h = np.array([int(v * scale) for v in self.h], dtype=np.int64)
        jsym = np.zeros((self.n, self.n), dtype=np.int64)
        for (i, j), c in self.J.items():
            jsym[i, j] = jsym[j, i] = int(c * scale)
        return scale, h, jsym, int(self.offset * scale)


def evaluate_qubo(q: Qubo, x: Sequence[int]) -> Fraction:
    if len(x) != q.n:
        raise ValueError(f"assignment has length {len(x)}, model has {q.n} qubits")
    total = q.offset
    for (i, j), c in q.coefficients.items():
        if x[i] and x[j]:
            total += c
    return total


def evaluate_ising(m: IsingModel, s: Sequence[int]) -> Fraction:
    if len(s) != m.n:
        raise ValueError(f"spin vector has length {len(s)}, model has {m.n} spins")
    for v in s:
        if v not in (-1, 1):
            raise ValueError(f"invalid spin value {v!r}")
    total = m.offset
    for (i, j), c in m.J.items():
        total -= c * s[i] * s[j]
    for i, hi in enumerate(m.h):
        total -= hi * s[i]
    return total


def qubo_to_ising(q: Qubo) -> IsingModel:
    h = [Fraction(0)] * q.n
    J = {}
    offset = q.offset
    for (i, j), c in q.coefficients.items():
        if i == j:
            h[i] -= c / 2
            offset += c / 2
        else:
            J[(i, j)] = -c / 4
            h[i] -= c / 4
            h[j] -= c / 4
            offset += c / 4
    return IsingModel(q.n, tuple(h), J, offset)


def ising_to_qubo(m: IsingModel) -> Qubo:
    coeffs: dict[tuple[int, int], Fraction] = {}
    offset = m.offset
    for i, hi in enumerate(m.h):
        if hi:
            coeffs[(i, i)] = coeffs.get((i, i), Fraction(0)) - 2 * hi
            offset += hi
    for (i, j), c in m.J.items():
        coeffs[(i, j)] = -4 * c
        coeffs[(i, i)] = coeffs.get((i, i), Fraction(0)) + 2 * c
        coeffs[(j, j)] = coeffs.get((j, j), Fraction(0)) + 2 * c
        offset -= c
    return Qubo(m.n, coeffs, offset)


def spins_from_bits(x: Sequence[int]) -> tuple[int, ...]:
    return tuple(2 * int(b) - 1 for b in x)


def bits_from_spins(s: Sequence[int]) -> tuple[int, ...]:
    return tuple((int(v) + 1) // 2 for v in s)


def mwis_direct_qubo(g: WeightedGraph, p) -> Qubo:
    """Penalty form without slack qubits: minimize ``-sum a_i x_i + p sum_E x_i x_j``."""
    p = as_fraction(p)
    if p <= 0:
        raise ValueError(f"penalty must be positive, got {p}")
    coeffs = {(i, i): Fraction(-w) for i, w in enumerate(g.weights)}
    coeffs.update({e: p for e in g.edges})
    return Qubo(g.n, coeffs)


def default_penalty(g: WeightedGraph) -> int:
    return max(g.weights) * max_degree(g) + 1


@dataclass(frozen=True)
class MwisDecoding:
    vertices: tuple[int, ...]
    weight: int
    feasible: bool


def decode_mwis(g: WeightedGraph, x: Sequence[int]) -> MwisDecoding:
    if len(x) != g.n:
        raise ValueError(f"assignment has length {len(x)}, graph has {g.n} vertices")
    chosen = tuple(i for i, b in enumerate(x) if b)
    weight = sum(g.weights[i] for i in chosen)
    feasible = not any(x[u] and x[v] for u, v in g.edges)
    return MwisDecoding(chosen, weight, feasible)


# -- text formats -------------------------------------------------------------

def write_qubo(q: Qubo) -> bytes:
    lines = [f"n {q.n}"]
    if q.offset:
        lines.append(f"offset {format_rational(q.offset)}")
    lines += [f"{i} {j} {format_rational(c)}" for (i, j), c in q.coefficients.items()]
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_ising(m: IsingModel) -> bytes:
    lines = [f"n {m.n}"]
    if m.offset:
        lines.append(f"offset {format_rational(m.offset)}")
    lines += [f"h {i} {format_rational(v)}" for i, v in enumerate(m.h) if v]
    lines += [f"J {i} {j} {format_rational(c)}" for (i, j), c in m.J.items()]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _records(text):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if line and not line.startswith("#") and not line.startswith("c "):
            yield lineno, line.split()


def _read_header(records):
    try:
        lineno, parts = next(records)
    except StopIteration:
        raise ModelFormatError("empty model file") from None
    if len(parts) != 2 or parts[0] != "n":
        raise ModelFormatError(f"line {lineno}: expected 'n <count>'")
    try:
        return int(parts[1])
    except ValueError:
        raise ModelFormatError(f"line {lineno}: bad qubit count {parts[1]!r}") from None


def is_ising_text(text) -> bool:
    return any(parts[0] in ("h", "J") for _, parts in _records(text))


def parse_qubo(text) -> Qubo:
    records = _records(text)
    n = _read_header(records)
    offset = Fraction(0)
    coeffs: dict[tuple[int, int], Fraction] = {}
    for lineno, parts in records:
        try:
            if parts[0] == "offset" and len(parts) == 2:
                offset += parse_rational(parts[1])
                continue
            if len(parts) != 3:
                raise ValueError
            i, j, c = int(parts[0]), int(parts[1]), parse_rational(parts[2])
        except (ValueError, ZeroDivisionError):
            raise ModelFormatError(f"line {lineno}: malformed QUBO record {' '.join(parts)!r}") from None
        if i > j or not (0 <= i and j < n):
            raise ModelFormatError(f"line {lineno}: invalid index pair ({i}, {j})")
        coeffs[(i, j)] = coeffs.get((i, j), Fraction(0)) + c
    return Qubo(n, coeffs, offset)


def parse_ising(text) -> IsingModel:
    records = _records(text)
    n = _read_header(records)
    offset = Fraction(0)
    h = [Fraction(0)] * n
    J: dict[tuple[int, int], Fraction] = {}
    for lineno, parts in records:
        try:
            if parts[0] == "offset" and len(parts) == 2:
                offset += parse_rational(parts[1])
            elif parts[0] == "h" and len(parts) == 3:
                i = int(parts[1])
                if not 0 <= i < n:
                    raise ModelFormatError(f"line {lineno}: spin {i} out of range")
                h[i] += parse_rational(parts[2])
            elif parts[0] == "J" and len(parts) == 4:
                i, j = int(parts[1]), int(parts[2])
                if i >= j or not (0 <= i and j < n):
                    raise ModelFormatError(f"line {lineno}: invalid coupling ({i}, {j})")
                J[(i, j)] = J.get((i, j), Fraction(0)) + parse_rational(parts[3])
            else:
                raise ValueError
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(f"line {lineno}: malformed Ising record {' '.join(parts)!r}") from None
    return IsingModel(n, tuple(h), J, offset)
