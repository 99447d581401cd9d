"""End-to-end simulation of the three activation protocols.

Only the designated slice (Bob's outcome b = 0 at his protocol setting,
written ``*`` in the JSON schema) is materialised, together with the
self-test marginals.  Slice keys match the Bell coefficient keys of
:mod:`eprkit.functionals` exactly.

Self-test marginals are synthetic: they are filled from the canonical
saturating strategy, standing in for the device of a real run.  Runs on
file-supplied correlation data are checked against the threshold instead
(see the CLI).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from . import linalg as la
from .functionals import BellCoefficients, EPRFunctional, bell_from_epr, evaluate_bell

STAR = "*"

PROB_TOL = 1e-12
EFFECT_TOL = 1e-10


@dataclass(frozen=True)
class ResourceAssemblage:
    """The self-tested resource: mixture of the canonical assemblage and its transpose.

    Elements are r * prod(sigma_tilde) + (1 - r) * prod(sigma_tilde)^T, keyed
    (c, w) for one qubit and (c-tuple, w-tuple) for more.
    """

    n: int
    r: float
    elements: dict

    def element(self, c, w) -> np.ndarray:
        return self.elements[(c, w)]

    def keys(self):
        return self.elements.keys()


def make_resource(n: int, r: float) -> ResourceAssemblage:
    """Build the n-qubit resource at mixing parameter r."""
    if n not in (1, 2):
        raise ValueError(f"resource qubit count must be 1 or 2, got {n}")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {r}")
    labels = list(itertools.product((0, 1), (1, 2, 3)))
    elements = {}
    for combo in itertools.product(labels, repeat=n):
        pure = la.tensor(*(catalog.sigma_tilde(c, w) for c, w in combo))
        mixed = r * pure + (1 - r) * pure.T
        if n == 1:
            elements[combo[0]] = mixed
        else:
            cs = tuple(c for c, _ in combo)
            ws = tuple(w for _, w in combo)
            elements[(cs, ws)] = mixed
    return ResourceAssemblage(n, float(r), elements)


@dataclass(frozen=True)
class CorrelationTable:
    """Designated-slice probabilities plus self-test marginals for one run."""

    scenario: str
    slice: dict
    selftest: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, p in self.slice.items():
            if not -PROB_TOL <= p <= 1 + PROB_TOL:
                raise ValueError(f"probability out of range at {key}: {p}")

    def slice_mass(self) -> dict:
        """Total slice probability per setting tuple (outcome labels summed out)."""
        masses: dict = {}
        if self.scenario == "bwi":
            group = lambda k: (k[1], k[2], k[4])  # noqa: E731  (x, y, w)
        elif self.scenario == "mdi":
            group = lambda k: (k[2], k[4])  # noqa: E731  (x, z)
        elif self.scenario == "channel":
            group = lambda k: (k[1], k[4], k[5])  # noqa: E731  (x, w, u)
        else:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        for key, p in self.slice.items():
            g = group(key)
            masses[g] = masses.get(g, 0.0) + p
        return masses


def _check_effect(m: np.ndarray, dim: int) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (dim, dim):
        raise ValueError(f"measurement element must be {dim}x{dim}, got {m.shape}")
    vals = np.linalg.eigvalsh(m)
    if vals[0] < -EFFECT_TOL or vals[-1] > 1 + EFFECT_TOL:
        raise ValueError("measurement element is not a valid effect (0 <= M <= I)")
    return m


def _canonical_selftest() -> dict:
    return catalog.canonical_selftest_marginal()


def simulate_bwi(assemblage, resource: ResourceAssemblage, measurement=None) -> CorrelationTable:
    """Slice p(a, 0, c | x, y, *, w) = tr[M (sigma_{a|xy} (x) resource_{c|w})]."""
    d = assemblage.dim
    if d != 2**resource.n:
        raise ValueError(f"assemblage dim {d} does not match resource on {resource.n} qubits")
    if measurement is None:
        measurement = la.phi_plus(resource.n)
    m = _check_effect(measurement, d * d)
    table = {}
    for (a, x, y), sigma in assemblage.elements.items():
        for (c, w) in resource.keys():
            p = np.trace(m @ la.tensor(sigma, resource.element(c, w)))
            table[(a, x, y, c, w)] = float(np.real(p))
    return CorrelationTable(
        "bwi", table, {"bc": _canonical_selftest()},
        {"r": resource.r, "n": resource.n},
    )


def simulate_mdi(assemblage, resource: ResourceAssemblage) -> CorrelationTable:
    """Slice p(a, b, c | x, *, z): the Choi elements contracted with the resource."""
    if assemblage.scenario != "mdi":
        raise ValueError(f"expected an MDI assemblage, got {assemblage.scenario!r}")
    if resource.n != 1:
        raise ValueError("the MDI protocol uses a single-qubit resource")
    table = {}
    for (a, b, x), j in assemblage.elements.items():
        for (c, z) in resource.keys():
            p = 2 * np.trace(resource.element(c, z).T @ j)
            table[(a, b, x, c, z)] = float(np.real(p))
    return CorrelationTable(
        "mdi", table, {"bc": _canonical_selftest()}, {"r": resource.r},
    )


def simulate_channel(
    assemblage,
    res_in: ResourceAssemblage,
    res_out: ResourceAssemblage,
    measurement=None,
    independent_mixtures: bool = False,
) -> CorrelationTable:
    """Slice p(a, 0, c, d | x, *, *, w, u) of the channel protocol.

    In the certifying mode the two resources must share one mixing parameter
    and the mixture is applied to the aligned pair, i.e. the table is
    r * T(res, res) + (1 - r) * T(res^T, res^T) over the canonical elements.
    ``independent_mixtures`` instead applies each resource's own mixture
    (the product formula); such tables are diagnostic only and are tagged so.
    """
    if assemblage.scenario != "channel":
        raise ValueError(f"expected a channel assemblage, got {assemblage.scenario!r}")
    if res_in.n != 1 or res_out.n != 1:
        raise ValueError("the channel protocol uses single-qubit resources")
    if measurement is None:
        measurement = la.phi_plus(1)
    m = _check_effect(measurement, 4)

    def raw_table(inputs: dict, outputs: dict) -> dict:
        out = {}
        for (a, x), j in assemblage.elements.items():
            for (c, w) in inputs:
                omega = la.apply_choi(j, inputs[(c, w)])
                for (d, u) in outputs:
                    p = np.trace(m @ la.tensor(omega, outputs[(d, u)]))
                    out[(a, x, c, d, w, u)] = float(np.real(p))
        return out

    if independent_mixtures:
        table = raw_table(res_in.elements, res_out.elements)
        meta = {"r_in": res_in.r, "r_out": res_out.r, "diagnostic": True}
    else:
        if res_in.r != res_out.r:
            raise ValueError(
                "certifying runs need a single mixing parameter; "
                "pass independent_mixtures=True for diagnostics"
            )
        r = res_in.r
        pure = {key: catalog.sigma_tilde(*key) for key in res_in.keys()}
        flipped = {key: v.T for key, v in pure.items()}
        top = raw_table(pure, pure)
        bottom = raw_table(flipped, flipped)
        table = {key: r * top[key] + (1 - r) * bottom[key] for key in top}
        meta = {"r": r}
    selftest = {"bc": _canonical_selftest(), "bd": _canonical_selftest()}
    return CorrelationTable("channel", table, selftest, meta)


def selftest_marginal(table: CorrelationTable, block: str = "bc") -> dict:
    """The p(b, c | z, w) marginal feeding the self-test functional."""
    if block not in table.selftest:
        raise ValueError(f"correlation table has no self-test block {block!r}")
    marginal = table.selftest[block]
    needed = itertools.product((0, 1), (0, 1), (1, 2, 3, 4), (1, 2, 3))
    missing = [key for key in needed if key not in marginal]
    if missing:
        raise ValueError(f"self-test marginal is missing entries, e.g. {missing[0]}")
    return marginal


def r_sweep(assemblage, functional, r_values, measurement=None) -> list[float]:
    """Bell values across mixing parameters; affinity in r is asserted.

    The affine consistency check compares each value against interpolation
    between the r = 0 and r = 1 endpoints within 1e-10.
    """
    if isinstance(functional, EPRFunctional):
        functional = bell_from_epr(functional)
    if not isinstance(functional, BellCoefficients):
        raise TypeError("functional must be an EPRFunctional or BellCoefficients")

    def run(r: float) -> float:
        if functional.scenario == "bwi":
            table = simulate_bwi(assemblage, make_resource(functional.n, r), measurement)
        elif functional.scenario == "mdi":
            table = simulate_mdi(assemblage, make_resource(1, r))
        elif functional.scenario == "channel":
            res = make_resource(1, r)
            table = simulate_channel(assemblage, res, res, measurement)
        else:
            raise ValueError(f"unknown scenario {functional.scenario!r}")
        return evaluate_bell(functional, table)

    v0, v1 = run(0.0), run(1.0)
    values = []
    for r in r_values:
        v = run(float(r))
        predicted = r * v1 + (1 - r) * v0
        if abs(v - predicted) > 1e-10:
            raise AssertionError(
                f"Bell value is not affine in r at r={r}: {v} vs predicted {predicted}"
            )
        values.append(v)
    return values
