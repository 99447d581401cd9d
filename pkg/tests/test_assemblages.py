import numpy as np
import pytest

from eprkit import catalog
from eprkit import linalg as la
from eprkit.assemblages import (
    BwIAssemblage,
    QuantumRealisation,
    StandardAssemblage,
    random_quantum,
    realize_bwi,
    realize_channel,
    realize_mdi,
    transpose_assemblage,
    validate,
)


def test_ptp_assemblage_validates_tightly():
    rep = validate(catalog.ptp_assemblage())
    assert rep.passed
    assert rep.max_residual < 1e-15


def test_scaled_element_fails_normalisation():
    ptp = catalog.ptp_assemblage()
    broken = dict(ptp.elements)
    broken[(0, 1, 0)] = 1.1 * broken[(0, 1, 0)]
    rep = validate(BwIAssemblage(broken))
    assert not rep.passed
    assert any("normalisation" in f for f in rep.failures())


def test_canonical_resource_is_valid_standard_assemblage():
    rep = validate(catalog.canonical_resource_assemblage())
    assert rep.passed
    # Reduced state is I/2 for every setting.
    res = catalog.canonical_resource_assemblage()
    for w in (1, 2, 3):
        total = res.elements[(0, w)] + res.elements[(1, w)]
        assert np.allclose(total, la.I2 / 2)


def test_validate_reports_missing_keys_as_structural():
    ptp = catalog.ptp_assemblage()
    partial = dict(ptp.elements)
    del partial[(1, 3, 1)]
    rep = validate(BwIAssemblage(partial))
    assert not rep.passed
    assert rep.structural_errors


def _pauli_realisation(channels=None):
    povms = {x: (la.proj(0, w), la.proj(1, w)) for x, w in [(1, 2), (2, 3), (3, 1)]}
    if channels is None:
        channels = {0: la.identity_map(2), 1: la.identity_map(2)}
    return QuantumRealisation("bwi", la.phi_plus(), povms, channels=channels)


def test_realize_bwi_steering_identity():
    # Maximally entangled state steers to the transposed effect halves.
    assemblage = realize_bwi(_pauli_realisation())
    for (a, x, y), sigma in assemblage.elements.items():
        m = _pauli_realisation().povms[x][a]
        assert np.allclose(sigma, m.T / 2)
    assert validate(assemblage).passed


def test_realize_bwi_product_state_is_unsteerable():
    rng = np.random.default_rng(2)
    rho_a = la.random_density(rng, 2)
    rho_b = la.random_density(rng, 2)
    povms = {x: tuple(la.random_projective_povm(rng, 2)) for x in (1, 2, 3)}
    channels = {0: la.identity_map(2), 1: la.random_channel(rng, 2, 2)}
    qr = QuantumRealisation("bwi", la.tensor(rho_a, rho_b), povms, channels=channels)
    assemblage = realize_bwi(qr)
    for (a, x, y), sigma in assemblage.elements.items():
        p = np.real(np.trace(povms[x][a] @ rho_a))
        assert np.allclose(sigma, p * channels[y](rho_b), atol=1e-12)


def test_realize_bwi_z_conjugation_channel():
    channels = {0: la.identity_map(2), 1: la.conjugation_map(la.PAULI_Z)}
    assemblage = realize_bwi(_pauli_realisation(channels))
    for a in (0, 1):
        for x in (1, 2, 3):
            expected = la.PAULI_Z @ assemblage.elements[(a, x, 0)] @ la.PAULI_Z
            assert np.allclose(assemblage.elements[(a, x, 1)], expected)


def test_realize_bwi_alice_marginal_bob_input_independent():
    for seed in range(20):
        assemblage, _ = random_quantum("bwi", seed)
        for a in range(2):
            for x in (1, 2, 3):
                t0 = np.trace(assemblage.elements[(a, x, 0)])
                t1 = np.trace(assemblage.elements[(a, x, 1)])
                assert abs(t0 - t1) < 1e-10


def _discard_and_measure_instrument():
    # Trace out B, measure B_in in the Z basis: Kraus rows <i| (x) <b|.
    e = np.eye(2)
    branches = {}
    for b in (0, 1):
        ops = tuple(la.tensor(e[i].reshape(1, 2), e[b].reshape(1, 2)) for i in range(2))
        branches[b] = la.KrausMap(4, 1, ops, trace_preserving=False)
    return branches


def test_realize_mdi_discard_and_measure():
    rng = np.random.default_rng(4)
    rho_a = la.random_density(rng, 2)
    rho_b = la.random_density(rng, 2)
    povms = {x: tuple(la.random_projective_povm(rng, 2)) for x in (1, 2, 3)}
    qr = QuantumRealisation("mdi", la.tensor(rho_a, rho_b), povms,
                            instrument=_discard_and_measure_instrument())
    assemblage = realize_mdi(qr)
    assert validate(assemblage).passed
    for (a, b, x), j in assemblage.elements.items():
        p = np.real(np.trace(povms[x][a] @ rho_a))
        assert np.allclose(j, p * la.proj(b, 1).T / 2, atol=1e-12)


def test_realize_mdi_uniform_noise():
    # Uniform Alice outcome and uniform Bob outcome: every Choi element I/8.
    e = np.eye(2)
    branches = {}
    for b in (0, 1):
        ops = tuple(la.tensor(e[i].reshape(1, 2), e[j].reshape(1, 2)) / np.sqrt(2)
                    for i in range(2) for j in range(2))
        branches[b] = la.KrausMap(4, 1, ops, trace_preserving=False)
    povms = {x: (la.I2 / 2, la.I2 / 2) for x in (1, 2, 3)}
    qr = QuantumRealisation("mdi", la.phi_plus(), povms, instrument=branches)
    assemblage = realize_mdi(qr)
    for j in assemblage.elements.values():
        assert np.allclose(j, np.eye(2) / 8)


def test_realize_mdi_bell_measurement():
    phi = la.phi_plus()
    basis = np.linalg.eigh(phi)[1]
    ops0 = (basis[:, 3].conj().reshape(1, 4),)  # the maximally entangled direction
    ops1 = tuple(basis[:, i].conj().reshape(1, 4) for i in range(3))
    instrument = {0: la.KrausMap(4, 1, ops0, trace_preserving=False),
                  1: la.KrausMap(4, 1, ops1, trace_preserving=False)}
    povms = {x: (la.proj(0, x), la.proj(1, x)) for x in (1, 2, 3)}
    qr = QuantumRealisation("mdi", phi, povms, instrument=instrument)
    assemblage = realize_mdi(qr)
    rep = validate(assemblage)
    assert rep.passed
    for b in (0, 1):
        totals = [sum(assemblage.elements[(a, b, x)] for a in (0, 1)) for x in (1, 2, 3)]
        for t in totals[1:]:
            assert np.allclose(t, totals[0], atol=1e-10)


def _channel_realisation(gamma, seed=8):
    rng = np.random.default_rng(seed)
    povms = {x: tuple(la.random_projective_povm(rng, 2)) for x in (1, 2, 3)}
    return QuantumRealisation("channel", la.random_density(rng, 4), povms, channel=gamma)


def test_realize_channel_discard_bob_forward_input():
    # Gamma discards B and forwards B_in: J(I_{a|x}) = p(a|x) phi_plus.
    e = np.eye(2)
    ops = tuple(np.kron(e[i].reshape(1, 2), la.I2) for i in range(2))
    gamma = la.KrausMap(4, 2, ops)
    qr = _channel_realisation(gamma)
    assemblage = realize_channel(qr)
    sigma = qr.conditional_states()
    for (a, x), j in assemblage.elements.items():
        p = np.real(np.trace(sigma[(a, x)]))
        assert np.allclose(j, p * la.phi_plus(), atol=1e-12)
    assert validate(assemblage).passed


def test_realize_channel_discard_input_forward_bob():
    # Gamma discards B_in and forwards B: J(I_{a|x}) = sigma_{a|x} (x) I/2.
    e = np.eye(2)
    ops = tuple(np.kron(la.I2, e[i].reshape(1, 2)) for i in range(2))
    gamma = la.KrausMap(4, 2, ops)
    qr = _channel_realisation(gamma)
    assemblage = realize_channel(qr)
    sigma = qr.conditional_states()
    for (a, x), j in assemblage.elements.items():
        assert np.allclose(j, la.tensor(sigma[(a, x)], la.I2 / 2), atol=1e-12)


def test_realize_channel_output_trace_condition():
    for seed in range(20):
        assemblage, _ = random_quantum("channel", seed)
        for (a, x), j in assemblage.elements.items():
            reduced = la.partial_trace(j, [2, 2], 0)
            p = np.real(np.trace(j))
            assert np.max(np.abs(reduced - p * la.I2 / 2)) < 1e-10


@pytest.mark.parametrize("scenario", ["bwi", "mdi", "channel"])
def test_random_quantum_validates_batch(scenario):
    for seed in range(1000):
        assemblage, _ = random_quantum(scenario, seed)
        rep = validate(assemblage)
        assert rep.passed, (scenario, seed, rep.failures())


def test_random_quantum_deterministic():
    a1, _ = random_quantum("bwi", 0)
    a2, _ = random_quantum("bwi", 0)
    for key in a1.elements:
        assert np.array_equal(a1.elements[key], a2.elements[key])


def test_random_quantum_seed_sweep_distinct():
    seen = set()
    for seed in range(200):
        assemblage, _ = random_quantum("bwi", seed)
        seen.add(assemblage.elements[(0, 1, 0)].tobytes())
    assert len(seen) == 200


def test_random_quantum_degenerate_alphabets():
    assemblage, _ = random_quantum("bwi", 0, {"a": 2, "x": 1, "y": 1})
    assert validate(assemblage).passed


def test_transpose_flips_only_y_axis_elements():
    ptp = catalog.ptp_assemblage()
    flipped = transpose_assemblage(ptp)
    for (a, x, y), sigma in ptp.elements.items():
        if x == 2:  # the Pauli-Y element
            assert not np.allclose(flipped.elements[(a, x, y)], sigma)
        else:
            assert np.allclose(flipped.elements[(a, x, y)], sigma)
    assert validate(flipped).passed


def test_transpose_of_real_assemblage_is_identity():
    # A diagonal (hence real-matrix) assemblage from a quantum realisation.
    diag_povms = {x: (np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex))
                  for x in (1, 2, 3)}
    qr = QuantumRealisation(
        "bwi", np.diag([0.4, 0.1, 0.2, 0.3]).astype(complex), diag_povms,
        channels={0: la.identity_map(2), 1: la.identity_map(2)},
    )
    assemblage = realize_bwi(qr)
    flipped = transpose_assemblage(assemblage)
    for key in assemblage.elements:
        assert np.array_equal(flipped.elements[key], assemblage.elements[key])


def test_transpose_is_involutive():
    assemblage, _ = random_quantum("bwi", 17)
    double = transpose_assemblage(transpose_assemblage(assemblage))
    for key in assemblage.elements:
        assert np.array_equal(double.elements[key], assemblage.elements[key])


def test_bwi_transpose_closure():
    # The transposed assemblage is reproduced by transposed POVMs, the
    # transpose-dual channels, and the transposed state.
    for seed in range(100):
        assemblage, qr = random_quantum("bwi", seed)
        flipped = transpose_assemblage(assemblage)
        qr_t = QuantumRealisation(
            "bwi",
            qr.state.T,
            {x: tuple(m.T for m in effects) for x, effects in qr.povms.items()},
            channels={y: la.transpose_dual(k) for y, k in qr.channels.items()},
        )
        rebuilt = realize_bwi(qr_t)
        for key in flipped.elements:
            assert np.max(np.abs(flipped.elements[key] - rebuilt.elements[key])) <= 1e-9
        assert validate(flipped).passed


@pytest.mark.parametrize("scenario", ["mdi", "channel"])
def test_choi_transpose_closure_validates(scenario):
    for seed in range(100):
        assemblage, _ = random_quantum(scenario, seed)
        assert validate(transpose_assemblage(assemblage)).passed


def test_quantum_realisation_rejects_bad_povm():
    povms = {1: (la.I2, la.I2)}  # sums to 2I
    with pytest.raises(ValueError):
        QuantumRealisation("bwi", la.phi_plus(), povms,
                           channels={0: la.identity_map(2)})


def test_quantum_realisation_rejects_unnormalised_state():
    povms = {1: (la.proj(0, 1), la.proj(1, 1))}
    with pytest.raises(ValueError):
        QuantumRealisation("bwi", 2 * la.phi_plus(), povms,
                           channels={0: la.identity_map(2)})


def test_quantum_realisation_rejects_leaky_instrument():
    e = np.eye(2)
    branches = {0: la.KrausMap(4, 1, (la.tensor(e[0].reshape(1, 2), e[0].reshape(1, 2)),),
                               trace_preserving=False)}
    with pytest.raises(ValueError):
        QuantumRealisation("mdi", la.phi_plus(),
                           {1: (la.proj(0, 1), la.proj(1, 1))}, instrument=branches)


def test_standard_assemblage_psd_check():
    # Element (0, 1) is Z/2, which has a negative eigenvalue.
    elements = {
        (0, w): la.PAULI_Z / 4 + la.I2 / 4 if w > 1 else la.PAULI_Z / 2
        for w in (1, 2, 3)
    }
    elements.update({(1, w): la.I2 / 2 - elements[(0, w)] for w in (1, 2, 3)})
    rep = validate(StandardAssemblage(elements))
    assert not rep.passed
    assert any("psd" in f for f in rep.failures())
