"""Bounds on Bob-with-input functionals and the self-test functional value.

The classical bound is exact: with a deterministic response f for Alice, the
hidden-variable states may be chosen per (strategy, Bob input) as minimal
eigenvectors, so the local minimum is
``min_f sum_y lambda_min(sum_x F_{f(x), x, y})`` and the enumeration over
responses is exhaustive.

The no-signalling number here is a certificate-style lower bound, not the
exact polytope minimum: ``sum_{x,y} min_a lambda_min(F_{axy})`` is valid for
every non-signalling assemblage but tight only for favourable spectra, and
the report says so.

The seesaw keeps Bob's processing fixed to the identity and alternates exact
state and measurement updates, so every iterate is a quantum-feasible value;
it brackets, never computes, the quantum bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .assemblages import QuantumRealisation
from .catalog import SELFTEST_SIGNS
from .functionals import EPRFunctional

ENUMERATION_GUARD = 10**6


@dataclass(frozen=True)
class DeterministicStrategy:
    """A deterministic Alice response x -> a with its per-input operators."""

    response: dict
    operators: dict  # y -> sum_x F_{response[x], x, y}

    def value(self) -> float:
        return sum(la.min_eigenvalue(g) for g in self.operators.values())


@dataclass(frozen=True)
class BoundReport:
    kind: str
    value: float
    witness: object = None
    guaranteed_tight: bool = True
    note: str = ""
    iterations: int = 0
    restarts: int = 0
    trace: tuple = field(default_factory=tuple)


def _functional_grid(f: EPRFunctional):
    if f.scenario != "bwi":
        raise ValueError("bounds are implemented for Bob-with-input functionals")
    keys = list(f.operators)
    a_vals = sorted({k[0] for k in keys})
    x_vals = sorted({k[1] for k in keys})
    y_vals = sorted({k[2] for k in keys})
    return a_vals, x_vals, y_vals


def classical_bound(f: EPRFunctional) -> BoundReport:
    """Exact minimum over local-hidden-state models, by strategy enumeration."""
    a_vals, x_vals, y_vals = _functional_grid(f)
    n_strategies = len(a_vals) ** len(x_vals)
    if n_strategies > ENUMERATION_GUARD:
        raise ValueError(
            f"{n_strategies} deterministic strategies exceed the enumeration guard"
        )
    best_value = np.inf
    best: DeterministicStrategy | None = None
    for choices in itertools.product(a_vals, repeat=len(x_vals)):
        response = dict(zip(x_vals, choices))
        operators = {
            y: sum(f.operators[(response[x], x, y)] for x in x_vals) for y in y_vals
        }
        value = sum(la.min_eigenvalue(g) for g in operators.values())
        if value < best_value:
            best_value = value
            best = DeterministicStrategy(response, operators)
    return BoundReport("classical", float(best_value), witness=best)


def ns_lower_bound(f: EPRFunctional) -> BoundReport:
    """Certificate lower bound over all non-signalling assemblages.

    Per (x, y) the outcome traces are a subnormalised distribution, so the
    functional dominates sum_{x,y} min_a lambda_min(F_{axy}).
    """
    a_vals, x_vals, y_vals = _functional_grid(f)
    value = sum(
        min(la.min_eigenvalue(f.operators[(a, x, y)]) for a in a_vals)
        for x in x_vals
        for y in y_vals
    )
    return BoundReport(
        "ns_certificate",
        float(value),
        guaranteed_tight=False,
        note="lower bound only; tightness requires a matching assemblage",
    )


def _seesaw_once(f: EPRFunctional, rng: np.random.Generator,
                 max_iterations: int, rel_tol: float):
    a_vals, x_vals, y_vals = _functional_grid(f)
    if a_vals != [0, 1]:
        raise ValueError("the seesaw measurement step needs a binary Alice alphabet")
    db = f.dim
    da = 2
    summed = {
        (a, x): sum(f.operators[(a, x, y)] for y in y_vals)
        for a in a_vals
        for x in x_vals
    }
    povms = {x: la.random_projective_povm(rng, da) for x in x_vals}
    trace = []
    rho = None
    for _ in range(max_iterations):
        h = sum(la.tensor(povms[x][a], summed[(a, x)]) for a in a_vals for x in x_vals)
        vals, vecs = la.eig_hermitian(h)
        ground = vecs[:, 0:1]
        rho = ground @ ground.conj().T
        # Measurement step: per x, put outcome 0 on the nonpositive eigenspace
        # of the conditioned operator difference (ties go to outcome 0).
        for x in x_vals:
            g = {
                a: la.partial_trace(
                    la.tensor(np.eye(da), summed[(a, x)]) @ rho, [da, db], 1
                )
                for a in a_vals
            }
            diff = g[0] - g[1]
            dvals, dvecs = la.eig_hermitian(diff)
            m0 = np.zeros((da, da), dtype=complex)
            for i, lam in enumerate(dvals):
                if lam <= 0:
                    v = dvecs[:, i : i + 1]
                    m0 += v @ v.conj().T
            povms[x] = [m0, np.eye(da) - m0]
        h = sum(la.tensor(povms[x][a], summed[(a, x)]) for a in a_vals for x in x_vals)
        value = float(np.real(np.trace(h @ rho)))
        trace.append(value)
        if len(trace) >= 2 and abs(trace[-2] - trace[-1]) <= rel_tol * max(1.0, abs(trace[-2])):
            break
    realisation = QuantumRealisation(
        "bwi", rho, {x: tuple(povms[x]) for x in x_vals},
        channels={y: la.identity_map(db) for y in y_vals},
    )
    return trace[-1], trace, realisation


def seesaw_quantum(f: EPRFunctional, seed: int = 0, restarts: int = 10,
                   max_iterations: int = 500, rel_tol: float = 1e-10) -> BoundReport:
    """Alternating minimisation over (state, Alice POVMs); Bob channels identity.

    The value sequence of each restart is monotone non-increasing; the report
    keeps the best restart and its realisation as a quantum-achievable witness.
    """
    root = np.random.default_rng(seed)
    best_value = np.inf
    best_trace: tuple = ()
    best_witness = None
    total_iterations = 0
    for _ in range(restarts):
        rng = np.random.default_rng(root.integers(2**63))
        value, trace, witness = _seesaw_once(f, rng, max_iterations, rel_tol)
        total_iterations += len(trace)
        if value < best_value:
            best_value = value
            best_trace = tuple(trace)
            best_witness = witness
    return BoundReport(
        "seesaw",
        float(best_value),
        witness=best_witness,
        guaranteed_tight=False,
        note="quantum-achievable value; upper bound on the quantum minimum",
        iterations=total_iterations,
        restarts=restarts,
        trace=best_trace,
    )


def selftest_value(marginal: dict) -> float:
    """The twelve-term correlator functional I_E on a p(b, c | z, w) marginal."""
    total = 0.0
    for w in (1, 2, 3):
        for z in (1, 2, 3, 4):
            correlator = 0.0
            for b, c in itertools.product((0, 1), (0, 1)):
                key = (b, c, z, w)
                if key not in marginal:
                    raise ValueError(f"marginal is missing entry {key}")
                correlator += (-1) ** (b + c) * marginal[key]
            total += SELFTEST_SIGNS[w][z - 1] * correlator
    return total


SELFTEST_MAX = 4 * np.sqrt(3)
