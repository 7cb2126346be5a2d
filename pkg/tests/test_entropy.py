import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qecentropy import codes, entropy, quantum
from qecentropy.errors import NotADistributionError, OutOfRangeError
from qecentropy.quantum import PureState


def test_von_neumann_basic():
    assert entropy.von_neumann(PureState.basis(2, 0).density()) == 0.0
    assert entropy.von_neumann(np.eye(2) / 2) == pytest.approx(1.0)
    assert entropy.von_neumann(np.eye(2) / 2, base="e") == pytest.approx(math.log(2))


def test_von_neumann_coherent_state():
    rho = 0.5 * np.array([[1, 0.73], [0.73, 1]])
    assert entropy.von_neumann(rho) == pytest.approx(entropy.binary_entropy(0.865), abs=1e-12)


def test_shannon():
    assert entropy.shannon([1, 0, 0]) == 0.0
    assert entropy.shannon([0.5, 0.5]) == pytest.approx(1.0)
    assert entropy.shannon([0.75, 1 / 12, 1 / 12, 1 / 12]) == pytest.approx(1.2075187496394219, abs=1e-12)
    with pytest.raises(NotADistributionError):
        entropy.shannon([0.5, 0.6])
    with pytest.raises(NotADistributionError):
        entropy.shannon([1.5, -0.5])


def test_unit_names():
    assert entropy.unit_name(2) == "bits"
    assert entropy.unit_name("e") == "nats"
    with pytest.raises(ValueError):
        entropy.von_neumann(np.eye(2) / 2, base=10)


def test_w_matrix_unitary_instrument():
    w, s = entropy.entropy_exchange([np.eye(2)], np.eye(2) / 2)
    np.testing.assert_allclose(w.matrix, [[1.0]])
    assert s == 0.0


def test_w_matrix_recovery_is_diagonal():
    code = codes.repetition3()
    noisy = quantum.apply_channel(quantum.bitflip_enlarged(0.1).restrict(range(4)), code.codewords[0].density())
    w, s = entropy.entropy_exchange(code.recovery, noisy)
    np.testing.assert_allclose(w.diagonal, [0.75, 1 / 12, 1 / 12, 1 / 12], atol=1e-14)
    assert w.off_diagonal_mass() <= 1e-14
    assert s == pytest.approx(entropy.shannon(w.diagonal))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exchange_entropy_bounded_by_shannon(seed):
    # S(W) <= H(diag W) for any instrument
    rng = np.random.default_rng(seed)
    rho = quantum.random_density_matrix(2, rng)
    ch = quantum.depolarizing(rng.uniform())
    w, s = entropy.entropy_exchange(ch, rho)
    assert s <= entropy.shannon(w.diagonal) + 1e-10


def test_apparatus_states():
    m1, m2 = entropy.apparatus_states(0.0, 0.5)
    assert abs(m1.overlap(m2)) < 1e-15
    m1, m2 = entropy.apparatus_states(1.0, 1.0)
    assert abs(m1.overlap(m2)) == pytest.approx(1.0)
    m1, m2 = entropy.apparatus_states(1.0, 0.25)
    assert abs(m1.overlap(m2)) == pytest.approx(0.5)
    with pytest.raises(OutOfRangeError):
        entropy.apparatus_states(3.0, 0.5)


def test_erasure_entropy():
    assert entropy.erasure_entropy(0.0) == pytest.approx(1.0)
    assert entropy.erasure_entropy(1.0) == 0.0
    assert entropy.erasure_entropy(0.5) == pytest.approx(0.8112781244591328, abs=1e-12)
    with pytest.raises(OutOfRangeError):
        entropy.erasure_entropy(1.5)


@pytest.mark.parametrize("delta", [0.1, 0.25, 0.7])
def test_mixture_entropy_matches_closed_form(delta):
    m1, m2 = entropy.apparatus_states(1.0, delta)
    x = abs(m1.overlap(m2))
    assert entropy.mixture_entropy(m1, m2) == pytest.approx(entropy.erasure_entropy(x), abs=1e-12)
