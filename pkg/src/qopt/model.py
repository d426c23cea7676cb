"""Constrained optimization models and their reduction to QUBO.

The reduction runs in three stages:

1. :func:`inequality_to_equality` adds one bounded integer slack per inequality,
2. :func:`equality_to_penalty` moves each equality into the objective as a
   squared penalty,
3. :func:`discretize_variables` replaces integer variables by qubits.

:func:`to_qubo` chains the three and returns the QUBO together with the
:class:`VariableMap` needed to read solutions back. Coefficients stay exact
(:class:`fractions.Fraction`) throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

from ._numbers import as_fraction
from .encoding import EncodingSpec, offset_bits_required
from .graph import WeightedGraph
from .qubo import Qubo

MINIMIZE = "minimize"
MAXIMIZE = "maximize"
SENSES = ("<=", "=", ">=")


class ModelError(ValueError):
    pass


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "binary"  # "binary" | "integer"
    lo: int | float = 0
    hi: int | float = 1
    slack: bool = False

    def __post_init__(self):
        if self.kind not in ("binary", "integer"):
            raise ModelError(f"variable {self.name}: unknown kind {self.kind!r}")
        if self.kind == "binary" and (self.lo, self.hi) != (0, 1):
            raise ModelError(f"binary variable {self.name} must have bounds [0, 1]")
        if self.lo > self.hi:
            raise ModelError(f"variable {self.name}: lower bound {self.lo} > upper bound {self.hi}")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass(frozen=True)
class Constraint:
    linear: Mapping[str, Fraction]
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ModelError(f"unknown constraint sense {self.sense!r}")
        for v in (*self.linear.values(), self.rhs):
            if isinstance(v, float) and not math.isfinite(v):
                raise ModelError("constraint coefficients and bounds must be finite")
        object.__setattr__(self, "linear", {k: as_fraction(v) for k, v in self.linear.items()})
        object.__setattr__(self, "rhs", as_fraction(self.rhs))


@dataclass(frozen=True)
class ProblemModel:
    variables: tuple[Variable, ...]
    sense: str = MINIMIZE
    linear: Mapping[str, Fraction] = field(default_factory=dict)
    quadratic: Mapping[tuple[str, str], Fraction] = field(default_factory=dict)
    constant: Fraction = Fraction(0)
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise ModelError(f"unknown objective sense {self.sense!r}")
        order = {v.name: k for k, v in enumerate(self.variables)}
        if len(order) != len(self.variables):
            raise ModelError("duplicate variable names")

        def known(name):
            if name not in order:
                raise ModelError(f"term references undeclared variable {name!r}")
            return name

        linear = {}
        for name, c in self.linear.items():
            c = as_fraction(c)
            if c:
                linear[known(name)] = linear.get(name, Fraction(0)) + c
        quadratic: dict[tuple[str, str], Fraction] = {}
        for key, c in self.quadratic.items():
            if len(key) != 2:
                raise ModelError(f"objective term {key!r} has degree {len(key)}; only degree <= 2 is supported")
            a, b = sorted((known(key[0]), known(key[1])), key=order.__getitem__)
            quadratic[(a, b)] = quadratic.get((a, b), Fraction(0)) + as_fraction(c)
        for con in self.constraints:
            for name, c in con.linear.items():
                known(name)
                if not math.isfinite(c):
                    raise ModelError("constraint coefficients must be finite")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "linear", {k: linear[k] for k in sorted(linear, key=order.__getitem__)})
        object.__setattr__(
            self,
            "quadratic",
            {k: v for k, v in sorted(quadratic.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])) if v},
        )
        object.__setattr__(self, "constant", as_fraction(self.constant))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def objective_value(self, values: Mapping[str, int]) -> Fraction:
        total = self.constant
        for name, c in self.linear.items():
            total += c * values[name]
        for (a, b), c in self.quadratic.items():
            total += c * values[a] * values[b]
        return total

    def is_feasible(self, values: Mapping[str, int]) -> bool:
        for con in self.constraints:
            lhs = sum((c * values[k] for k, c in con.linear.items()), Fraction(0))
            if con.sense == "<=" and not lhs <= con.rhs:
                return False
            if con.sense == ">=" and not lhs >= con.rhs:
                return False
            if con.sense == "=" and lhs != con.rhs:
                return False
        return True


def mwis_model(g: WeightedGraph) -> ProblemModel:
    variables = tuple(Variable(f"x{i}") for i in range(g.n))
    constraints = tuple(
        Constraint({f"x{u}": 1, f"x{v}": 1}, "<=", 1) for u, v in g.edges
    )
    linear = {f"x{i}": w for i, w in enumerate(g.weights)}
    return ProblemModel(variables, MAXIMIZE, linear, constraints=constraints)


def _lhs_range(model: ProblemModel, con: Constraint) -> tuple[Fraction, Fraction]:
    lo = hi = Fraction(0)
    for name, c in con.linear.items():
        var = model.variable(name)
        if not var.bounded:
            raise TransformError(f"variable {name} has non-finite bounds; slack range is unbounded")
        a, b = c * var.lo, c * var.hi
        lo += min(a, b)
        hi += max(a, b)
    return lo, hi


def inequality_to_equality(model: ProblemModel) -> ProblemModel:
    """Turn ``lhs <= rhs`` into ``lhs + y = rhs`` and ``lhs >= rhs`` into ``lhs - y = rhs``.

    Each slack ``y`` is an integer in ``[0, R]`` with ``R`` the largest slack
    any assignment within the variable bounds can need.
    """
    variables = list(model.variables)
    constraints = []
    taken = {v.name for v in variables}
    for k, con in enumerate(model.constraints):
        if con.sense == "=":
            constraints.append(con)
            continue
        if con.rhs.denominator != 1 or any(c.denominator != 1 for c in con.linear.values()):
            raise TransformError(f"constraint {k}: slack form needs integer coefficients and right-hand side")
        lo, hi = _lhs_range(model, con)
        span = con.rhs - lo if con.sense == "<=" else hi - con.rhs
        if span < 0:
            raise TransformError(f"constraint {k} cannot be satisfied within the variable bounds")
        name = f"slack{k}"
        while name in taken:
            name = "_" + name
        taken.add(name)
        variables.append(Variable(name, "integer", 0, int(span), slack=True))
        linear = dict(con.linear)
        linear[name] = Fraction(1 if con.sense == "<=" else -1)
        constraints.append(Constraint(linear, "=", con.rhs))
    return replace(model, variables=tuple(variables), constraints=tuple(constraints))


def equality_to_penalty(model: ProblemModel, penalty) -> ProblemModel:
    """Add ``penalty * (lhs - rhs)^2`` per equality, signed to hurt under the model's sense."""
    penalty = as_fraction(penalty)
    if penalty <= 0:
        raise ValueError(f"penalty must be positive, got {penalty}")
    for con in model.constraints:
        if con.sense != "=":
            raise TransformError("equality_to_penalty expects equality constraints only")
    sign = penalty if model.sense == MINIMIZE else -penalty
    linear = dict(model.linear)
    quadratic = dict(model.quadratic)
    constant = model.constant
    for con in model.constraints:
        terms = list(con.linear.items())
        for i, (a, ca) in enumerate(terms):
            quadratic[(a, a)] = quadratic.get((a, a), Fraction(0)) + sign * ca * ca
            for b, cb in terms[i + 1:]:
                quadratic[(a, b)] = quadratic.get((a, b), Fraction(0)) + sign * 2 * ca * cb
            linear[a] = linear.get(a, Fraction(0)) - sign * 2 * con.rhs * ca
        constant += sign * con.rhs * con.rhs
    return replace(model, linear=linear, quadratic=quadratic, constant=constant, constraints=())


@dataclass(frozen=True)
class EncodedVariable:
    name: str
    kind: str
    lo: int
    spec: EncodingSpec
    slack: bool = False

    def decode(self, x: Sequence[int]) -> tuple[int, bool]:
        bits = [int(x[q]) for q in self.spec.qubits]
        if self.kind == "binary":
            return bits[0], True
        value, valid = self.spec.decode(bits)
        return self.lo + value, valid


@dataclass(frozen=True)
class VariableMap:
    """Where every original and slack variable lives in the qubit register."""

    entries: tuple[EncodedVariable, ...]
    n_qubits: int
    negated: bool = False

    def decode(self, x: Sequence[int], include_slack: bool = False) -> dict[str, int]:
        if len(x) != self.n_qubits:
            raise ValueError(f"assignment has length {len(x)}, expected {self.n_qubits}")
        return {
            e.name: e.decode(x)[0] for e in self.entries if include_slack or not e.slack
        }

    def valid(self, x: Sequence[int]) -> bool:
        return all(e.decode(x)[1] for e in self.entries)

    def objective_value(self, energy) -> Fraction:
        """QUBO energy reported in the original model's sense."""
        energy = as_fraction(energy)
        return -energy if self.negated else energy

    def qubits_of(self, name: str) -> range:
        for e in self.entries:
            if e.name == name:
                return e.spec.qubits
        raise KeyError(name)


def discretize_variables(model: ProblemModel, encoding: str = "binary", validity_penalty=None):
    """Replace integer variables by qubits; returns ``(binary_model, VariableMap)``.

    Integers in ``[lo, hi]`` become ``lo + value`` of an ``M = hi - lo + 1``
    valued encoding; the binary scheme uses just enough bits for ``hi - lo``
    and clamps larger codewords on decode. One-hot and domain-wall add ``validity_penalty`` times
    their codeword penalty, which therefore must be given for those schemes.
    """
    if model.constraints:
        raise TransformError("discretize_variables expects an unconstrained model")
    if encoding != "binary":
        if validity_penalty is None:
            raise ValueError(f"{encoding} encoding needs a validity_penalty")
        validity_penalty = as_fraction(validity_penalty)
        if validity_penalty <= 0:
            raise ValueError("validity_penalty must be positive")

    entries = []
    forms: dict[str, tuple[Fraction, dict[int, Fraction]]] = {}
    new_vars = []
    validity = []
    start = 0
    for var in model.variables:
        if var.kind == "binary":
            entries.append(EncodedVariable(var.name, "binary", 0, EncodingSpec("binary", 1, start), var.slack))
            forms[var.name] = (Fraction(0), {start: Fraction(1)})
            new_vars.append(Variable(var.name))
            start += 1
            continue
        if not var.bounded:
            raise TransformError(f"variable {var.name} has non-finite bounds")
        M = int(var.hi) - int(var.lo) + 1
        if encoding == "binary":
            spec = EncodingSpec("binary", M, start, width=offset_bits_required(M))
        else:
            spec = EncodingSpec(encoding, M, start)
        const, lin = spec.value_form()
        forms[var.name] = (const + int(var.lo), lin)
        entries.append(EncodedVariable(var.name, "integer", int(var.lo), spec, var.slack))
        for k in range(spec.qubit_count):
            new_vars.append(Variable(f"{var.name}[{k}]"))
        if encoding != "binary":
            validity.append(spec.validity_terms())
        start += spec.qubit_count

    qubit_name = [v.name for v in new_vars]
    linear: dict[str, Fraction] = {}
    quadratic: dict[tuple[str, str], Fraction] = {}
    constant = model.constant

    def add_lin(q, c):
        linear[qubit_name[q]] = linear.get(qubit_name[q], Fraction(0)) + c

    def add_quad(q, r, c):
        if q == r:
            add_lin(q, c)
            return
        key = (qubit_name[min(q, r)], qubit_name[max(q, r)])
        quadratic[key] = quadratic.get(key, Fraction(0)) + c

    for name, c in model.linear.items():
        const, lin = forms[name]
        constant += c * const
        for q, a in lin.items():
            add_lin(q, c * a)
    for (u, v), c in model.quadratic.items():
        cu, lu = forms[u]
        cv, lv = forms[v]
        constant += c * cu * cv
        for q, a in lu.items():
            add_lin(q, c * a * cv)
        for r, b in lv.items():
            add_lin(r, c * cu * b)
        for q, a in lu.items():
            for r, b in lv.items():
                add_quad(q, r, c * a * b)

    sign = 1 if model.sense == MINIMIZE else -1
    for terms in validity:
        constant += sign * validity_penalty * terms.offset
        for (q, r), c in terms.coefficients.items():
            add_quad(q, r, sign * validity_penalty * c)

    binary = ProblemModel(tuple(new_vars), model.sense, linear, quadratic, constant)
    return binary, VariableMap(tuple(entries), start)


def binary_model_to_qubo(model: ProblemModel) -> Qubo:
    """All-binary unconstrained model to a minimizing QUBO (maximize is negated)."""
    if model.constraints:
        raise TransformError("model still has constraints")
    index = {}
    for k, v in enumerate(model.variables):
        if v.kind != "binary":
            raise TransformError(f"variable {v.name} is not binary")
        index[v.name] = k
    sign = 1 if model.sense == MINIMIZE else -1
    coeffs: dict[tuple[int, int], Fraction] = {}
    for name, c in model.linear.items():
        k = index[name]
        coeffs[(k, k)] = coeffs.get((k, k), Fraction(0)) + sign * c
    for (a, b), c in model.quadratic.items():
        i, j = sorted((index[a], index[b]))
        coeffs[(i, j)] = coeffs.get((i, j), Fraction(0)) + sign * c
    return Qubo(len(model.variables), coeffs, sign * model.constant)


def to_qubo(model: ProblemModel, penalty, encoding: str = "binary"):
    """Full reduction; returns ``(Qubo, VariableMap)``.

    Original variables keep their declaration order, so for models built by
    :func:`mwis_model` qubit ``i`` is vertex ``i`` and slack qubits follow.
    """
    eq = inequality_to_equality(model)
    unconstrained = equality_to_penalty(eq, penalty)
    binary, varmap = discretize_variables(
        unconstrained, encoding, validity_penalty=penalty if encoding != "binary" else None
    )
    qubo = binary_model_to_qubo(binary)
    return qubo, replace(varmap, negated=model.sense == MAXIMIZE)
