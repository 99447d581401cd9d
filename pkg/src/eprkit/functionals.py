"""EPR functionals, Bell coefficient tables, and the projector-basis bridge.

The six qubit eigenprojectors ``proj(c, w)`` are an overcomplete basis of the
2x2 Hermitian operators, so coefficient tables are not unique.  Two rules are
fixed here:

* ``decompose`` uses the canonical symmetric split: with
  ``F = a0 I + sum_w b_w P_w`` it returns ``xi[c, w] = a0/3 + (-1)^c b_w``
  (factorwise products of the analogous vectors for several qubits).
* ``bell_from_epr`` uses the minimal-support split for single-qubit
  operators: weight ``2|b_w|`` on the sign-matching projector of each axis,
  with the leftover identity weight spread over the two ``w = 1`` labels.
  On projector-plus-shift functionals this reproduces the sparse published
  coefficient tables entrywise.  Multi-qubit operators fall back to the
  canonical rule.

Both rules reconstruct exactly; every consumer of a coefficient table only
relies on reconstruction, so they are interchangeable up to entrywise layout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la

SCENARIOS = ("bwi", "mdi", "channel")


@dataclass(frozen=True)
class EPRFunctional:
    """Hermitian operator coefficients of an EPR functional.

    Operator keys per scenario: (a, x, y) for bwi, (a, b, x) for mdi,
    (a, x) for channel (dim-4 operators on output (x) Choi-input factors).
    ``bounds`` optionally carries known bound constants by name.
    """

    scenario: str
    operators: dict
    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        object.__setattr__(
            self, "operators", {k: la.hermitian(m) for k, m in self.operators.items()}
        )

    @property
    def dim(self) -> int:
        return next(iter(self.operators.values())).shape[0]

    def shifted(self, offset: float) -> "EPRFunctional":
        """Add ``offset * I`` to every operator (bounds metadata dropped)."""
        eye = np.eye(self.dim)
        return EPRFunctional(
            self.scenario, {k: m + offset * eye for k, m in self.operators.items()}
        )


@dataclass(frozen=True)
class BellCoefficients:
    """Real Bell coefficients on the designated correlation slice.

    Keys: (a, x, y, c, w) for bwi, (a, b, x, c, z) for mdi and
    (a, x, c, d, w, u) for channel.  For an n-qubit resource the c/w entries
    are n-tuples; coefficients outside the designated slice are identically
    zero and never stored.
    """

    scenario: str
    xi: dict
    n: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        for key, v in self.xi.items():
            if not np.isfinite(v):
                raise ValueError(f"non-finite coefficient at {key}")
        object.__setattr__(self, "xi", dict(self.xi))


def _pauli_string_coefficients(f: np.ndarray, n: int) -> dict:
    """Expansion coefficients of f over {I, Z, X, Y}^(x)n (label 0 = identity)."""
    paulis = {0: la.I2, 1: la.PAULI_Z, 2: la.PAULI_X, 3: la.PAULI_Y}
    out = {}
    for string in itertools.product(range(4), repeat=n):
        p = la.tensor(*(paulis[s] for s in string))
        out[string] = float(np.real(np.trace(f @ p))) / 2**n
    return out


def _factor_vector(s: int) -> dict:
    if s == 0:
        return {(c, w): 1.0 / 3.0 for c in (0, 1) for w in (1, 2, 3)}
    return {(c, w): float((-1) ** c) if w == s else 0.0 for c in (0, 1) for w in (1, 2, 3)}


def single_qubit_labels():
    return list(itertools.product((0, 1), (1, 2, 3)))


def decompose(f: np.ndarray, n: int | None = None) -> dict:
    """Canonical projector-basis coefficients of a Hermitian operator.

    Keys are (c, w) for one qubit and (c-tuple, w-tuple) otherwise; the table
    is complete (zeros included) and reconstructs ``f`` exactly.
    """
    f = np.asarray(f, dtype=complex)
    dim = f.shape[0]
    if n is None:
        n = int(np.log2(dim))
    if 2**n != dim:
        raise ValueError(f"operator dimension {dim} is not 2**{n}")
    coeffs = _pauli_string_coefficients(f, n)
    labels = single_qubit_labels()
    out = {}
    for combo in itertools.product(labels, repeat=n):
        total = 0.0
        for string, coef in coeffs.items():
            if coef == 0.0:
                continue
            prod = coef
            for (c, w), s in zip(combo, string):
                prod *= _factor_vector(s)[(c, w)]
                if prod == 0.0:
                    break
            total += prod
        if n == 1:
            out[combo[0]] = total
        else:
            out[(tuple(c for c, _ in combo), tuple(w for _, w in combo))] = total
    return out


def reconstruct(xi: dict, n: int = 1) -> np.ndarray:
    """Inverse of a coefficient table: sum of weighted projector strings."""
    labels = single_qubit_labels()
    out = np.zeros((2**n, 2**n), dtype=complex)
    for combo in itertools.product(labels, repeat=n):
        if n == 1:
            key = combo[0]
            cs, ws = (combo[0][0],), (combo[0][1],)
        else:
            cs = tuple(c for c, _ in combo)
            ws = tuple(w for _, w in combo)
            key = (cs, ws)
        if key not in xi:
            raise ValueError(f"missing coefficient label {key}")
        out += xi[key] * la.proj_string(cs, ws)
    return out


def sparse_single_qubit_coefficients(f: np.ndarray) -> dict:
    """Minimal-support projector coefficients of a single-qubit operator.

    Each Pauli component contributes twice its magnitude on the projector
    whose sign matches; the identity weight not consumed that way goes onto
    the two Z-axis labels.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != (2, 2):
        raise ValueError("sparse rule is defined for single-qubit operators")
    a0 = float(np.real(np.trace(f))) / 2
    xi = {label: 0.0 for label in single_qubit_labels()}
    consumed = 0.0
    for w in (1, 2, 3):
        b = float(np.real(np.trace(f @ la.PAULI_BY_SETTING[w]))) / 2
        if b != 0.0:
            xi[(0 if b > 0 else 1, w)] += 2 * abs(b)
            consumed += abs(b)
    remainder = a0 - consumed
    xi[(0, 1)] += remainder
    xi[(1, 1)] += remainder
    return xi


def bell_from_epr(f: EPRFunctional) -> BellCoefficients:
    """Bell coefficient table of an EPR functional.

    The table evaluates on protocol correlations to 1/4 of the functional
    value for bwi and channel (4^-n for an n-qubit resource, since each
    transposed resource element is half a projector) and exactly the
    functional value for mdi.
    """
    if f.scenario == "bwi":
        n = int(np.log2(f.dim))
        xi = {}
        for (a, x, y), op in f.operators.items():
            table = sparse_single_qubit_coefficients(op) if n == 1 else decompose(op, n)
            for (c, w), v in table.items():
                xi[(a, x, y, c, w)] = v
        return BellCoefficients("bwi", xi, n)
    if f.scenario == "mdi":
        xi = {}
        for (a, b, x), op in f.operators.items():
            for (c, z), v in sparse_single_qubit_coefficients(op).items():
                xi[(a, b, x, c, z)] = v
        return BellCoefficients("mdi", xi, 1)
    if f.scenario == "channel":
        # Factor 0 of the operators is Bob's output (labels d, u read by the
        # second resource), factor 1 the Choi input (labels c, w).
        xi = {}
        for (a, x), op in f.operators.items():
            for ((d, c), (u, w)), v in decompose(op, 2).items():
                xi[(a, x, c, d, w, u)] = v
        return BellCoefficients("channel", xi, 1)
    raise ValueError(f"unknown scenario {f.scenario!r}")


def evaluate_epr(f: EPRFunctional, assemblage) -> float:
    """tr sum_k F_k sigma_k over the matching index set."""
    if f.scenario != assemblage.scenario:
        raise ValueError(
            f"scenario mismatch: functional is {f.scenario!r}, "
            f"assemblage is {assemblage.scenario!r}"
        )
    total = 0.0
    for key, op in f.operators.items():
        if key not in assemblage.elements:
            raise ValueError(f"assemblage has no element {key}")
        el = assemblage.elements[key]
        if el.shape != op.shape:
            raise ValueError(f"dimension mismatch at {key}: {op.shape} vs {el.shape}")
        total += float(np.real(np.trace(op @ el)))
    return total


def evaluate_bell(xi: BellCoefficients, table) -> float:
    """sum xi * p over the designated slice of a correlation table."""
    if xi.scenario != table.scenario:
        raise ValueError(
            f"scenario mismatch: coefficients are {xi.scenario!r}, "
            f"table is {table.scenario!r}"
        )
    total = 0.0
    for key, v in xi.xi.items():
        if key not in table.slice:
            raise ValueError(f"correlation table has no probability for {key}")
        total += v * table.slice[key]
    return total
