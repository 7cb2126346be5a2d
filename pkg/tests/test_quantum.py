import json

import numpy as np
import pytest

from qecentropy import codes, quantum
from qecentropy.errors import (
    DimensionCapError,
    DimensionMismatchError,
    InvalidStateError,
    OutOfRangeError,
    ParseError,
    ValidationError,
    ZeroTraceError,
)
from qecentropy.quantum import DensityMatrix, KrausChannel, PureState


def test_pure_state_validation():
    with pytest.raises(InvalidStateError):
        PureState(np.array([1.0, 1.0]))
    psi = PureState.normalized([1, 1j])
    assert psi.dim == 2
    assert abs(psi.overlap(psi) - 1) < 1e-15
    np.testing.assert_allclose(psi.projector(), [[0.5, -0.5j], [0.5j, 0.5]])


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([0.7, 0.7]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    # tiny negative eigenvalue is clipped
    rho = DensityMatrix(np.diag([1.0 + 1e-12, -1e-12]))
    assert rho.eigenvalues()[0] >= 0.0
    assert DensityMatrix.maximally_mixed(4).purity() == pytest.approx(0.25)


def test_channel_validation():
    with pytest.raises(ValidationError):
        KrausChannel((np.eye(2), np.eye(2)))
    with pytest.raises(DimensionMismatchError):
        KrausChannel((np.eye(2), np.eye(3)), complete=False)
    sub = quantum.amplitude_damping(0.3).restrict([0])
    assert not sub.complete and len(sub) == 1


def test_amplitude_damping_on_excited_state():
    out = quantum.apply_channel(quantum.amplitude_damping(0.3), PureState.basis(2, 1).density())
    np.testing.assert_allclose(out.matrix, np.diag([0.3, 0.7]), atol=1e-15)


def test_amplitude_damping_limits():
    np.testing.assert_allclose(quantum.amplitude_damping(0.19).operators[0], np.diag([1, 0.9]), atol=1e-15)
    np.testing.assert_allclose(quantum.amplitude_damping(0.0).operators[0], np.eye(2))
    out = quantum.apply_channel(quantum.amplitude_damping(1.0), PureState.basis(2, 1).density())
    np.testing.assert_allclose(out.matrix, np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(OutOfRangeError):
        quantum.amplitude_damping(1.2)


def test_identity_channel(rng):
    rho = quantum.random_density_matrix(2, rng)
    np.testing.assert_allclose(quantum.apply_channel(quantum.identity_channel(), rho).matrix, rho.matrix)


def test_bitflip_enlarged():
    ch = quantum.bitflip_enlarged(0.1)
    assert len(ch) == 8
    assert np.max(np.abs(sum(a.conj().T @ a for a in ch.operators) - np.eye(8))) <= 1e-12
    zero_l = PureState.basis(8, 0)
    a1 = ch.operators[1]
    assert np.trace(a1 @ zero_l.projector() @ a1.conj().T).real == pytest.approx(0.081, abs=1e-15)
    ch0 = quantum.bitflip_enlarged(0.0)
    np.testing.assert_array_equal(ch0.operators[0], np.eye(8))
    assert all(np.all(a == 0) for a in ch0.operators[1:])


def test_restricted_bitflip_renormalizes():
    ch = quantum.bitflip_enlarged(0.1).restrict(range(4))
    out, leak = quantum.apply_channel(ch, PureState.basis(8, 0).density(), return_leakage=True)
    assert leak == pytest.approx(0.028)
    diag = np.real(np.diag(out.matrix))
    np.testing.assert_allclose(diag[[0, 4, 2, 1]], [0.729 / 0.972] + [0.081 / 0.972] * 3, atol=1e-14)


def test_depolarizing_and_dephasing(rng):
    rho = quantum.random_density_matrix(2, rng)
    np.testing.assert_allclose(quantum.apply_channel(quantum.depolarizing(1.0), rho).matrix, np.eye(2) / 2, atol=1e-15)
    out = quantum.apply_channel(quantum.dephasing(0.4), rho)
    assert out.matrix[0, 1] == pytest.approx(0.6 * rho.matrix[0, 1])
    assert out.matrix[0, 0] == pytest.approx(rho.matrix[0, 0])


def test_tensor_power_order_and_cap():
    ad = quantum.amplitude_damping(0.19)
    pair = quantum.tensor_power(ad, 2)
    assert len(pair) == 4
    np.testing.assert_allclose(pair.operators[0], np.diag([1, 0.9, 0.9, 0.81]), atol=1e-15)
    np.testing.assert_allclose(pair.operators[1], np.kron(ad.operators[0], ad.operators[1]))
    with pytest.raises(DimensionCapError):
        quantum.tensor_power(ad, 7)


def test_zero_trace_and_dimension_errors():
    ch = quantum.amplitude_damping(0.5).restrict([1])
    with pytest.raises(ZeroTraceError):
        quantum.apply_channel(ch, PureState.basis(2, 0).density())
    with pytest.raises(DimensionMismatchError):
        quantum.apply_channel(quantum.identity_channel(2), np.eye(4) / 4)


def test_measure_povm_and_kraus():
    outs = quantum.measure(quantum.computational_povm(2), np.eye(2) / 2)
    assert [o.probability for o in outs] == pytest.approx([0.5, 0.5])
    code = codes.repetition3()
    noisy = quantum.apply_channel(quantum.bitflip_enlarged(0.1).restrict(range(4)), code.codewords[0].density())
    outs = quantum.measure(code.recovery, noisy)
    assert [o.probability for o in outs] == pytest.approx([0.75, 1 / 12, 1 / 12, 1 / 12], abs=1e-14)
    outs = quantum.measure(quantum.computational_povm(2), PureState.basis(2, 0).density())
    assert outs[1].posterior is None


def test_sampling_is_seeded():
    a = quantum.sample_pure_state(4, 7)
    b = quantum.sample_pure_state(4, 7)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
    rng = np.random.default_rng(0)
    mean = np.mean([abs(quantum.sample_pure_state(2, rng).amplitudes[0]) ** 2 for _ in range(10_000)])
    assert abs(mean - 0.5) < 0.02


def test_channel_json_round_trip():
    ch = quantum.tensor_power(quantum.amplitude_damping(0.2), 2)
    back = quantum.channel_from_json(json.loads(json.dumps(quantum.channel_to_json(ch))))
    for a, b in zip(ch.operators, back.operators):
        np.testing.assert_array_equal(a, b)
    assert back.complete


def test_channel_json_errors():
    with pytest.raises(ParseError):
        quantum.channel_from_json({"dim": 2})
    bad = quantum.channel_to_json(quantum.amplitude_damping(0.2))
    bad["operators"] = bad["operators"][:1]
    with pytest.raises(ValidationError):
        quantum.channel_from_json(bad)


def test_povm_json_round_trip():
    povm = quantum.computational_povm(3)
    back = quantum.povm_from_json(quantum.povm_to_json(povm))
    assert len(back) == 3
