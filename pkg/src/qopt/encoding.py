"""Qubit encodings for variables that take one of ``m`` discrete values.

* binary: ``floor(log2 M) + 1`` qubits, value ``sum 2^k b_k`` clamped to ``M - 1``
* one-hot: ``m`` qubits, exactly one set
* domain-wall: ``m - 1`` qubits, codeword ``1..10..0`` whose number of ones is the value

Penalty and interaction terms are returned as :class:`~qopt.qubo.Qubo` objects
addressed by absolute qubit index (``spec.start + k``), so they can be added
straight into a host model.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._numbers import as_fraction
from .qubo import Qubo

SCHEMES = ("binary", "one_hot", "domain_wall")


class EncodingError(ValueError):
    pass


def binary_bits_required(M: int) -> int:
    if M < 1:
        raise EncodingError(f"value count must be >= 1, got {M}")
    # floor(log2 M) + 1, computed without floating point
    return M.bit_length()


def offset_bits_required(M: int) -> int:
    """Fewest bits that can hold every offset ``0..M-1`` (at least one)."""
    if M < 1:
        raise EncodingError(f"value count must be >= 1, got {M}")
    return max(1, (M - 1).bit_length())


@dataclass(frozen=True)
class EncodingSpec:
    scheme: str
    m: int
    start: int = 0
    width: int | None = None  # binary only: override the qubit count

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise EncodingError(f"unknown encoding scheme {self.scheme!r}")
        if self.m < 1:
            raise EncodingError(f"value count must be >= 1, got {self.m}")
        if self.start < 0:
            raise EncodingError("qubit start index must be non-negative")
        if self.width is not None:
            if self.scheme != "binary":
                raise EncodingError("width only applies to binary encodings")
            if (1 << self.width) < self.m:
                raise EncodingError(f"{self.width} bits cannot hold {self.m} values")

    @property
    def qubit_count(self) -> int:
        if self.scheme == "binary":
            return self.width if self.width is not None else binary_bits_required(self.m)
        if self.scheme == "one_hot":
            return self.m
        return self.m - 1

    @property
    def qubits(self) -> range:
        return range(self.start, self.start + self.qubit_count)

    def encode(self, d: int) -> tuple[int, ...]:
        if self.scheme == "binary":
            return binary_encode(d, self.m, self.qubit_count)
        if self.scheme == "one_hot":
            return one_hot_encode(d, self.m)
        return domain_wall_encode(d, self.m)

    def decode(self, bits: Sequence[int]) -> tuple[int, bool]:
        if self.scheme == "binary":
            return binary_decode(bits, self.m), True
        if self.scheme == "one_hot":
            return one_hot_decode(bits)
        return domain_wall_decode(bits)

    def validity_terms(self) -> Qubo:
        if self.scheme == "binary":
            return Qubo(self.start + self.qubit_count)
        if self.scheme == "one_hot":
            return one_hot_validity_terms(self)
        return domain_wall_validity_terms(self)

    def value_form(self) -> tuple[Fraction, dict[int, Fraction]]:
        """The value as an affine form in the qubits: ``(constant, {qubit: coeff})``.

        Exact on valid codewords for every scheme.
        """
        if self.scheme == "binary":
            return Fraction(0), {self.start + k: Fraction(2**k) for k in range(self.qubit_count)}
        if self.scheme == "one_hot":
            return Fraction(0), {self.start + d: Fraction(d) for d in range(1, self.m)}
        return Fraction(0), {q: Fraction(1) for q in self.qubits}


def _check_range(d: int, m: int) -> None:
    if not 0 <= d < m:
        raise EncodingError(f"value {d} out of range 0..{m - 1}")


def binary_encode(d: int, M: int, width: int | None = None) -> tuple[int, ...]:
    _check_range(d, M)
    width = binary_bits_required(M) if width is None else width
    return tuple((d >> k) & 1 for k in range(width))


def binary_decode(bits: Sequence[int], M: int) -> int:
    v = sum(int(b) << k for k, b in enumerate(bits))
    return min(v, M - 1)


def domain_wall_encode(d: int, m: int) -> tuple[int, ...]:
    _check_range(d, m)
    return (1,) * d + (0,) * (m - 1 - d)


def domain_wall_decode(bits: Sequence[int]) -> tuple[int, bool]:
    valid = all(not (a == 0 and b == 1) for a, b in zip(bits, bits[1:]))
    return sum(int(b) for b in bits), valid


def domain_wall_validity_terms(spec: EncodingSpec) -> Qubo:
    """Chain penalty ``sum_k b_{k+1} (1 - b_k)``; zero exactly on valid codewords."""
    q = list(spec.qubits)
    coeffs: dict[tuple[int, int], Fraction] = {}
    for a, b in zip(q, q[1:]):
        coeffs[(b, b)] = coeffs.get((b, b), Fraction(0)) + 1
        coeffs[(a, b)] = Fraction(-1)
    return Qubo(spec.start + spec.qubit_count, coeffs)


def one_hot_encode(d: int, m: int) -> tuple[int, ...]:
    _check_range(d, m)
    return tuple(int(k == d) for k in range(m))


def one_hot_decode(bits: Sequence[int]) -> tuple[int, bool]:
    ones = [k for k, b in enumerate(bits) if b]
    if len(ones) != 1:
        return (ones[0] if ones else 0), False
    return ones[0], True


def one_hot_validity_terms(spec: EncodingSpec) -> Qubo:
    """``(sum_k b_k - 1)^2`` expanded with ``b^2 = b``."""
    q = list(spec.qubits)
    coeffs: dict[tuple[int, int], Fraction] = {(a, a): Fraction(-1) for a in q}
    for i, a in enumerate(q):
        for b in q[i + 1:]:
            coeffs[(a, b)] = Fraction(2)
    return Qubo(spec.start + spec.qubit_count, coeffs, offset=1)


def value_indicators(spec: EncodingSpec) -> list[tuple[Fraction, dict[int, Fraction]]]:
    """Affine forms that equal 1 for the codeword's value and 0 otherwise.

    Only defined for one-hot and domain-wall, where they are linear in the
    bits. Domain-wall uses virtual boundary bits ``b_0 = 1`` and ``b_m = 0``.
    """
    if spec.scheme == "one_hot":
        return [(Fraction(0), {spec.start + d: Fraction(1)}) for d in range(spec.m)]
    if spec.scheme == "domain_wall":
        forms = []
        for d in range(spec.m):
            const = Fraction(0)
            lin: dict[int, Fraction] = {}
            # b_d with b_0 == 1
            if d == 0:
                const += 1
            else:
                lin[spec.start + d - 1] = Fraction(1)
            # - b_{d+1} with b_m == 0
            if d + 1 < spec.m:
                lin[spec.start + d] = lin.get(spec.start + d, Fraction(0)) - 1
            forms.append((const, lin))
        return forms
    raise EncodingError("binary encoding has no linear value indicators")


def pairwise_interaction_terms(table, spec1: EncodingSpec, spec2: EncodingSpec) -> Qubo:
    """Quadratic terms equal to ``table[d1][d2]`` on every pair of valid codewords."""
    for spec in (spec1, spec2):
        if spec.scheme == "binary":
            raise EncodingError("pairwise interactions need one_hot or domain_wall encodings")
    if set(spec1.qubits) & set(spec2.qubits):
        raise EncodingError("the two variables' qubit ranges overlap")
    rows = [[as_fraction(v) for v in row] for row in table]
    if len(rows) != spec1.m or any(len(r) != spec2.m for r in rows):
        raise EncodingError(f"table must be {spec1.m}x{spec2.m}")

    n = max(spec1.start + spec1.qubit_count, spec2.start + spec2.qubit_count)
    ind1 = value_indicators(spec1)
    ind2 = value_indicators(spec2)
    coeffs: dict[tuple[int, int], Fraction] = {}
    offset = Fraction(0)

    def add(i, j, v):
        key = (i, j) if i <= j else (j, i)
        coeffs[key] = coeffs.get(key, Fraction(0)) + v

    for d1, (c1, l1) in enumerate(ind1):
        for d2, (c2, l2) in enumerate(ind2):
            w = rows[d1][d2]
            if not w:
                continue
            offset += w * c1 * c2
            for a, ca in l1.items():
                add(a, a, w * ca * c2)
            for b, cb in l2.items():
                add(b, b, w * c1 * cb)
            for a, ca in l1.items():
                for b, cb in l2.items():
                    add(a, b, w * ca * cb)
    return Qubo(n, coeffs, offset)
