import numpy as np
import pytest
from hypothesis import given, strategies as st

from qdc.qmath import I2, SIGMA_X, SIGMA_Y, SIGMA_Z, dm_from_statevector
from qdc.channels import (ChannelError, ChannelKind, ChannelSpec, DrawPolicy,
                          KrausSet, apply_channel_statevector,
                          apply_local_channel, deterministic_kraus,
                          kraus_dephasing, kraus_depolarizing, parse_channel,
                          pauli_means, sample_per_qubit_kraus,
                          unitary_from_params, UnitaryParams)


def phase_free_distance(a, b):
    """Operator distance up to a global phase."""
    tr = np.trace(a.conj().T @ b)
    phase = tr / abs(tr) if abs(tr) > 1e-12 else 1.0
    return np.max(np.abs(a * phase - b))


def test_pauli_means_reproduce_paulis():
    for which, target in (("x", SIGMA_X), ("y", SIGMA_Y), ("z", SIGMA_Z)):
        u = unitary_from_params(pauli_means(which))
        assert phase_free_distance(u, target) < 1e-12
    with pytest.raises(ChannelError):
        pauli_means("w")


@given(st.floats(0, 4 * np.pi), st.floats(0, 2 * np.pi), st.floats(0, 4 * np.pi))
def test_unitary_from_params_is_unitary(omega, theta, delta):
    u = unitary_from_params(UnitaryParams(omega, theta, delta))
    assert np.max(np.abs(u.conj().T @ u - I2)) < 1e-12


def test_dephasing_weights():
    ks = kraus_dephasing(0.5, 0.3)
    # (1 - 0.5*0.3)(1 - 0.3) = 0.595 and (1 + 0.5*0.7)*0.3 = 0.405
    assert np.allclose(ks.operators[0], np.sqrt(0.595) * I2)
    assert np.allclose(ks.operators[1], np.sqrt(0.405) * SIGMA_Z)


def test_depolarizing_weights():
    ks = kraus_depolarizing(0.5, 0.2)
    # (1 - 3*0.5*0.2)(1 - 0.2) = 0.56 and (1 + 3*0.5*0.8)*0.2/3 = 0.44/3
    assert np.allclose(ks.operators[0], np.sqrt(0.56) * I2)
    for op, pauli in zip(ks.operators[1:], (SIGMA_X, SIGMA_Y, SIGMA_Z)):
        assert np.allclose(op, np.sqrt(0.44 / 3) * pauli)


def test_kraus_completeness_enforced():
    with pytest.raises(ChannelError):
        KrausSet((I2, I2))


def test_channel_spec_ranges():
    ChannelSpec(ChannelKind.DEPHASING, 0.5, 0.5)
    with pytest.raises(ChannelError):
        ChannelSpec(ChannelKind.DEPHASING, 0.5, 0.6)
    with pytest.raises(ChannelError):
        ChannelSpec(ChannelKind.DEPOLARIZING, 0.5, 0.7)   # p > 1/(3a)
    ChannelSpec(ChannelKind.DEPOLARIZING, 0.0, 1.0)
    with pytest.raises(ChannelError):
        ChannelSpec(ChannelKind.DEPHASING, 1.5, 0.2)


def test_random_kraus_sets_are_cptp():
    rng = np.random.default_rng(0)
    spec = ChannelSpec(ChannelKind.DEPOLARIZING, 0.3, 0.1, epsilon=1.0)
    for _ in range(50):
        for ks in sample_per_qubit_kraus(spec, 2, rng):
            acc = sum(k.conj().T @ k for k in ks.operators)
            assert np.max(np.abs(acc - I2)) < 1e-10


def test_draw_policy_shared():
    spec = ChannelSpec(ChannelKind.DEPHASING, 0.3, 0.1, epsilon=0.5,
                       draw_policy=DrawPolicy.SHARED_ACROSS_QUBITS)
    rng = np.random.default_rng(3)
    sets = sample_per_qubit_kraus(spec, 3, rng)
    assert all(s is sets[0] for s in sets)
    spec_pq = ChannelSpec(ChannelKind.DEPHASING, 0.3, 0.1, epsilon=0.5)
    sets = sample_per_qubit_kraus(spec_pq, 3, np.random.default_rng(3))
    assert not np.allclose(sets[0].operators[1], sets[1].operators[1])


def test_apply_local_channel_preserves_trace_and_psd():
    rng = np.random.default_rng(5)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    rho = dm_from_statevector(psi / np.linalg.norm(psi))
    ks = deterministic_kraus(ChannelSpec(ChannelKind.DEPOLARIZING, 0.5, 0.2))
    out = apply_local_channel(rho, [ks, ks], [0, 2])
    assert np.trace(out) == pytest.approx(1.0)
    assert np.min(np.linalg.eigvalsh(out)) > -1e-12


def test_statevector_path_matches_density_path():
    rng = np.random.default_rng(9)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    spec = ChannelSpec(ChannelKind.DEPHASING, 0.4, 0.25, epsilon=0.3)
    kraus = sample_per_qubit_kraus(spec, 2, rng)
    a = apply_local_channel(dm_from_statevector(psi), kraus, [0, 1])
    b = apply_channel_statevector(psi, kraus, [0, 1])
    assert np.max(np.abs(a - b)) < 1e-12


def test_apply_local_channel_target_errors():
    rho = np.eye(4) / 4
    ks = deterministic_kraus(ChannelSpec(ChannelKind.DEPHASING, 0.0, 0.1))
    with pytest.raises(ChannelError):
        apply_local_channel(rho, [ks], [0, 1])
    with pytest.raises(ChannelError):
        apply_local_channel(rho, [ks, ks], [0, 0])
    with pytest.raises(ChannelError):
        apply_local_channel(rho, [ks], [5])


def test_depolarizing_is_covariant_dephasing_is_not():
    rng = np.random.default_rng(11)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    rho = dm_from_statevector(psi / np.linalg.norm(psi))
    u = unitary_from_params(UnitaryParams(1.3, 0.7, 2.1))
    u1 = np.kron(u, I2)

    ks = deterministic_kraus(ChannelSpec(ChannelKind.DEPOLARIZING, 0.4, 0.2))
    lhs = apply_local_channel(u1 @ rho @ u1.conj().T, [ks], [0])
    rhs = u1 @ apply_local_channel(rho, [ks], [0]) @ u1.conj().T
    assert np.max(np.abs(lhs - rhs)) < 1e-10

    ks = deterministic_kraus(ChannelSpec(ChannelKind.DEPHASING, 0.4, 0.2))
    lhs = apply_local_channel(u1 @ rho @ u1.conj().T, [ks], [0])
    rhs = u1 @ apply_local_channel(rho, [ks], [0]) @ u1.conj().T
    assert np.max(np.abs(lhs - rhs)) > 1e-3


def test_parse_channel():
    spec = parse_channel("dephasing:alpha=0.5,p=0.3")
    assert spec == ChannelSpec(ChannelKind.DEPHASING, 0.5, 0.3)
    spec = parse_channel("depolarizing:alpha=0.3,p=0.1,eps=0.7,draw=shared")
    assert spec.epsilon == 0.7
    assert spec.draw_policy is DrawPolicy.SHARED_ACROSS_QUBITS
    with pytest.raises(ChannelError):
        parse_channel("foo:p=0.1")
    with pytest.raises(ChannelError):
        parse_channel("dephasing:alpha=0.5")
    with pytest.raises(ChannelError):
        parse_channel("dephasing:alpha=0.5,p=0.3,draw=sometimes")
