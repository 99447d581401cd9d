"""Scenario-typed assemblage containers, validators, and quantum realisations.

Index conventions, used consistently across the package and the JSON schemas:
measurement settings are 1-based (``x``, ``w``, ``z`` in ``1..n``), outcomes
and Bob's classical input are 0-based (``a``, ``b``, ``c``, ``y`` in ``0..n-1``).

The MDI and channel scenarios store Choi operators, never abstract maps:
``J(N_{ab|x})`` lives on the Choi-input factor (dim 2) and ``J(I_{a|x})`` on
output (x) Choi-input factors (dim 4).  Probabilities ``p(a|x)`` are always
extracted by trace, never stored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ConditionResult:
    name: str
    residual: float

    def passes(self, tol: float) -> bool:
        return self.residual <= tol


@dataclass(frozen=True)
class ValidationReport:
    scenario: str
    conditions: tuple[ConditionResult, ...]
    structural_errors: tuple[str, ...] = ()
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        if self.structural_errors:
            return False
        return all(c.passes(self.tol) for c in self.conditions)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.conditions), default=0.0)

    def failures(self) -> list[str]:
        out = list(self.structural_errors)
        out += [f"{c.name} (residual {c.residual:.3e})" for c in self.conditions
                if not c.passes(self.tol)]
        return out


def _freeze_elements(elements: dict) -> dict:
    return {key: la.hermitian(m) for key, m in elements.items()}


@dataclass(frozen=True)
class StandardAssemblage:
    """Subnormalised conditional states sigma_{c|w} of a standard EPR scenario."""

    elements: dict
    n_outcomes: int = 2
    n_settings: int = 3
    scenario: str = field(default="standard", init=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", _freeze_elements(self.elements))

    def keys(self):
        return itertools.product(range(self.n_outcomes), range(1, self.n_settings + 1))


@dataclass(frozen=True)
class BwIAssemblage:
    """Elements sigma_{a|xy} of a Bob-with-input scenario, keyed (a, x, y)."""

    elements: dict
    n_a: int = 2
    n_x: int = 3
    n_y: int = 2
    scenario: str = field(default="bwi", init=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", _freeze_elements(self.elements))

    def keys(self):
        return itertools.product(range(self.n_a), range(1, self.n_x + 1), range(self.n_y))

    @property
    def dim(self) -> int:
        return next(iter(self.elements.values())).shape[0]


@dataclass(frozen=True)
class MDIAssemblage:
    """Choi operators J(N_{ab|x}) on the Choi-input factor, keyed (a, b, x)."""

    elements: dict
    n_a: int = 2
    n_b: int = 2
    n_x: int = 3
    scenario: str = field(default="mdi", init=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", _freeze_elements(self.elements))

    def keys(self):
        return itertools.product(range(self.n_a), range(self.n_b), range(1, self.n_x + 1))


@dataclass(frozen=True)
class ChannelAssemblage:
    """Choi operators J(I_{a|x}) on output (x) Choi-input factors, keyed (a, x)."""

    elements: dict
    n_a: int = 2
    n_x: int = 3
    scenario: str = field(default="channel", init=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", _freeze_elements(self.elements))

    def keys(self):
        return itertools.product(range(self.n_a), range(1, self.n_x + 1))


def _max_abs(m) -> float:
    return float(np.max(np.abs(m)))


def _psd_residual(m) -> float:
    return max(0.0, -la.min_eigenvalue(m))


def validate(assemblage, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the no-signalling conditions of the assemblage's scenario.

    Returns one residual per condition; the report passes iff every residual
    is at most ``tol``.  Missing index combinations are structural failures
    and suppress the numeric checks.
    """
    missing = [key for key in assemblage.keys() if key not in assemblage.elements]
    if missing:
        errs = tuple(f"missing element {key}" for key in missing)
        return ValidationReport(assemblage.scenario, (), errs, tol)

    el = assemblage.elements
    conds = []
    if assemblage.scenario == "standard":
        conds.append(ConditionResult(
            "elements-psd", max(_psd_residual(m) for m in el.values())))
        totals = {w: sum(el[(c, w)] for c in range(assemblage.n_outcomes))
                  for w in range(1, assemblage.n_settings + 1)}
        ref = totals[1]
        conds.append(ConditionResult(
            "reduced-state-setting-independent",
            max(_max_abs(t - ref) for t in totals.values())))
        conds.append(ConditionResult(
            "reduced-state-unit-trace",
            max(abs(np.trace(t) - 1) for t in totals.values())))
    elif assemblage.scenario == "bwi":
        a_rng = range(assemblage.n_a)
        x_rng = range(1, assemblage.n_x + 1)
        y_rng = range(assemblage.n_y)
        conds.append(ConditionResult(
            "elements-psd", max(_psd_residual(m) for m in el.values())))
        conds.append(ConditionResult(
            "normalisation",
            max(abs(sum(np.trace(el[(a, x, y)]) for a in a_rng) - 1)
                for x in x_rng for y in y_rng)))
        conds.append(ConditionResult(
            "alice-marginal-bob-input-independent",
            max(abs(np.trace(el[(a, x, y)]) - np.trace(el[(a, x, 0)]))
                for a in a_rng for x in x_rng for y in y_rng)))
        totals = {(x, y): sum(el[(a, x, y)] for a in a_rng) for x in x_rng for y in y_rng}
        conds.append(ConditionResult(
            "bob-state-alice-setting-independent",
            max(_max_abs(totals[(x, y)] - totals[(1, y)]) for x in x_rng for y in y_rng)))
    elif assemblage.scenario == "mdi":
        a_rng = range(assemblage.n_a)
        b_rng = range(assemblage.n_b)
        x_rng = range(1, assemblage.n_x + 1)
        dim = next(iter(el.values())).shape[0]
        eye = np.eye(dim)
        conds.append(ConditionResult(
            "elements-psd", max(_psd_residual(m) for m in el.values())))
        p = {(a, x): float(np.real(sum(np.trace(el[(a, b, x)]) for b in b_rng)))
             for a in a_rng for x in x_rng}
        conds.append(ConditionResult(
            "alice-marginal-maximally-mixed",
            max(_max_abs(sum(el[(a, b, x)] for b in b_rng) - p[(a, x)] * eye / dim)
                for a in a_rng for x in x_rng)))
        conds.append(ConditionResult(
            "alice-probabilities-valid",
            max(max(abs(sum(p[(a, x)] for a in a_rng) - 1) for x in x_rng),
                max(max(0.0, -p[(a, x)]) for a in a_rng for x in x_rng))))
        totals = {(b, x): sum(el[(a, b, x)] for a in a_rng) for b in b_rng for x in x_rng}
        conds.append(ConditionResult(
            "bob-channel-alice-setting-independent",
            max(_max_abs(totals[(b, x)] - totals[(b, 1)]) for b in b_rng for x in x_rng)))
    elif assemblage.scenario == "channel":
        a_rng = range(assemblage.n_a)
        x_rng = range(1, assemblage.n_x + 1)
        dim = next(iter(el.values())).shape[0]
        in_dim = 2
        out_dim = dim // in_dim
        conds.append(ConditionResult(
            "elements-psd", max(_psd_residual(m) for m in el.values())))
        p = {(a, x): float(np.real(np.trace(el[(a, x)]))) for a in a_rng for x in x_rng}
        conds.append(ConditionResult(
            "discarded-output-is-alice-marginal",
            max(_max_abs(la.partial_trace(el[(a, x)], [out_dim, in_dim], 0)
                         - p[(a, x)] * np.eye(in_dim) / in_dim)
                for a in a_rng for x in x_rng)))
        conds.append(ConditionResult(
            "alice-probabilities-valid",
            max(max(abs(sum(p[(a, x)] for a in a_rng) - 1) for x in x_rng),
                max(max(0.0, -p[(a, x)]) for a in a_rng for x in x_rng))))
        totals = {x: sum(el[(a, x)] for a in a_rng) for x in x_rng}
        conds.append(ConditionResult(
            "bob-channel-alice-setting-independent",
            max(_max_abs(totals[x] - totals[1]) for x in x_rng)))
    else:
        raise ValueError(f"unknown scenario {assemblage.scenario!r}")
    return ValidationReport(assemblage.scenario, tuple(conds), (), tol)


STATE_TOL = 1e-10


@dataclass(frozen=True)
class QuantumRealisation:
    """A shared state, Alice POVMs, and Bob-side processing for one scenario.

    ``povms`` maps the setting x to a tuple of effects.  Bob's processing is
    scenario specific: ``channels[y]`` for Bob-with-input, ``instrument[b]``
    (jointly trace preserving over b) for MDI, ``channel`` for the channel
    scenario.
    """

    scenario: str
    state: np.ndarray
    povms: dict
    channels: dict | None = None
    instrument: dict | None = None
    channel: la.KrausMap | None = None

    def __post_init__(self):
        state = la.hermitian(self.state, tol=1e-10)
        object.__setattr__(self, "state", state)
        if la.min_eigenvalue(state) < -STATE_TOL:
            raise ValueError("shared state is not positive semidefinite")
        if abs(np.trace(state) - 1) > STATE_TOL:
            raise ValueError("shared state does not have unit trace")
        for x, effects in self.povms.items():
            total = sum(effects)
            if _max_abs(total - np.eye(total.shape[0])) > STATE_TOL:
                raise ValueError(f"POVM for setting {x} does not sum to identity")
            for m in effects:
                if la.min_eigenvalue(m) < -STATE_TOL:
                    raise ValueError(f"POVM effect for setting {x} is not PSD")
        if self.scenario == "mdi" and self.instrument is not None:
            total = sum(
                sum(k.conj().T @ k for k in branch.kraus_ops)
                for branch in self.instrument.values()
            )
            if _max_abs(total - np.eye(total.shape[0])) > la.TRACE_PRESERVING_TOL:
                raise ValueError("instrument branches are not jointly trace preserving")

    @property
    def alice_dim(self) -> int:
        return next(iter(self.povms.values()))[0].shape[0]

    @property
    def bob_dim(self) -> int:
        return self.state.shape[0] // self.alice_dim

    def conditional_states(self) -> dict:
        """Alice-conditioned states sigma_{a|x} = tr_A[(M_{a|x} (x) I) rho]."""
        da, db = self.alice_dim, self.bob_dim
        out = {}
        for x, effects in self.povms.items():
            for a, m in enumerate(effects):
                full = la.tensor(m, np.eye(db)) @ self.state
                out[(a, x)] = la.partial_trace(full, [da, db], 0)
        return out


def realize_bwi(qr: QuantumRealisation) -> BwIAssemblage:
    """Assemblage sigma_{a|xy} = E_y(tr_A[(M_{a|x} (x) I) rho])."""
    sigma = qr.conditional_states()
    elements = {}
    for (a, x), s in sigma.items():
        for y, channel in qr.channels.items():
            elements[(a, x, y)] = la.hermitian(channel(s), tol=1e-10)
    return BwIAssemblage(elements, n_a=len(next(iter(qr.povms.values()))),
                         n_x=len(qr.povms), n_y=len(qr.channels))


def realize_mdi(qr: QuantumRealisation) -> MDIAssemblage:
    """Choi operators of N_{ab|x}, assembled on the matrix-unit basis of B_in."""
    sigma = qr.conditional_states()
    db = qr.bob_dim
    d_in = next(iter(qr.instrument.values())).in_dim // db
    effects = {
        b: sum(k.conj().T @ k for k in branch.kraus_ops)
        for b, branch in qr.instrument.items()
    }
    elements = {}
    for (a, x), s in sigma.items():
        for b, e in effects.items():
            j = np.zeros((d_in, d_in), dtype=complex)
            for i in range(d_in):
                for k in range(d_in):
                    unit = np.zeros((d_in, d_in), dtype=complex)
                    unit[i, k] = 1.0
                    j[i, k] = np.trace(e @ la.tensor(s, unit)) / d_in
            elements[(a, b, x)] = la.hermitian(j, tol=1e-10)
    return MDIAssemblage(elements, n_a=len(next(iter(qr.povms.values()))),
                         n_b=len(qr.instrument), n_x=len(qr.povms))


def realize_channel(qr: QuantumRealisation) -> ChannelAssemblage:
    """Choi operators J(I_{a|x}) = (Gamma (x) id)(sigma_{a|x} (x) phi_plus)."""
    sigma = qr.conditional_states()
    db = qr.bob_dim
    phi = la.phi_plus(1)
    elements = {}
    for (a, x), s in sigma.items():
        joint = la.tensor(s, phi)
        j = la.apply_map_to_factors(qr.channel, joint, [db, 2, 2], [0, 1])
        elements[(a, x)] = la.hermitian(j, tol=1e-10)
    return ChannelAssemblage(elements, n_a=len(next(iter(qr.povms.values()))),
                             n_x=len(qr.povms))


def transpose_assemblage(assemblage):
    """Elementwise transpose; involutive and scenario preserving."""
    transposed = {key: m.T for key, m in assemblage.elements.items()}
    if assemblage.scenario == "standard":
        return StandardAssemblage(transposed, assemblage.n_outcomes, assemblage.n_settings)
    if assemblage.scenario == "bwi":
        return BwIAssemblage(transposed, assemblage.n_a, assemblage.n_x, assemblage.n_y)
    if assemblage.scenario == "mdi":
        return MDIAssemblage(transposed, assemblage.n_a, assemblage.n_b, assemblage.n_x)
    if assemblage.scenario == "channel":
        return ChannelAssemblage(transposed, assemblage.n_a, assemblage.n_x)
    raise ValueError(f"unknown scenario {assemblage.scenario!r}")


def random_quantum(scenario: str, seed: int, alphabets: dict | None = None, n: int = 1):
    """Seeded random quantum assemblage plus the realisation that produced it.

    The state is a normalised Ginibre draw, Alice's POVMs are projective
    (random orthonormal basis, random rank split), and Bob's processing comes
    from random isometries with a dimension-2 environment.  ``n`` is the qubit
    count of Bob's output system (Bob-with-input only).
    """
    rng = np.random.default_rng(seed)
    alphabets = dict(alphabets or {})
    if scenario == "bwi":
        n_a = alphabets.get("a", 2)
        n_x = alphabets.get("x", 3)
        n_y = alphabets.get("y", 2)
        db = 2**n
        state = la.random_density(rng, 2 * db)
        povms = {x: tuple(la.random_projective_povm(rng, 2, n_a))
                 for x in range(1, n_x + 1)}
        channels = {y: la.random_channel(rng, db, db) for y in range(n_y)}
        qr = QuantumRealisation("bwi", state, povms, channels=channels)
        return realize_bwi(qr), qr
    if scenario == "mdi":
        n_a = alphabets.get("a", 2)
        n_b = alphabets.get("b", 2)
        n_x = alphabets.get("x", 3)
        state = la.random_density(rng, 4)
        povms = {x: tuple(la.random_projective_povm(rng, 2, n_a))
                 for x in range(1, n_x + 1)}
        # Random joint measurement on B (x) B_in, split into outcome branches.
        u = la.random_unitary(rng, 4)
        cuts = sorted(rng.choice(np.arange(1, 4), size=n_b - 1, replace=False))
        blocks = np.split(np.arange(4), cuts)
        instrument = {
            b: la.KrausMap(4, 1, tuple(u[:, i].conj().reshape(1, 4) for i in block),
                           trace_preserving=False)
            for b, block in enumerate(blocks)
        }
        qr = QuantumRealisation("mdi", state, povms, instrument=instrument)
        return realize_mdi(qr), qr
    if scenario == "channel":
        n_a = alphabets.get("a", 2)
        n_x = alphabets.get("x", 3)
        state = la.random_density(rng, 4)
        povms = {x: tuple(la.random_projective_povm(rng, 2, n_a))
                 for x in range(1, n_x + 1)}
        gamma = la.random_channel(rng, 4, 2)
        qr = QuantumRealisation("channel", state, povms, channel=gamma)
        return realize_channel(qr), qr
    raise ValueError(f"unknown scenario {scenario!r}")
