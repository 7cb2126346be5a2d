import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qecentropy import matcore
from qecentropy.errors import NotHermitianError, NotSquareError, ParseError

from conftest import random_hermitian


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
def test_herm_eig_matches_numpy(rng, n):
    m = random_hermitian(rng, n)
    eig = matcore.herm_eig(m)
    np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(m), atol=1e-12)
    np.testing.assert_allclose(eig.reconstruct(), m, atol=1e-12)
    v = eig.eigenvectors
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


def test_herm_eig_real_symmetric_and_sorted():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    eig = matcore.herm_eig(m)
    np.testing.assert_allclose(eig.eigenvalues, [1.0, 3.0], atol=1e-14)


def test_herm_eig_degenerate_spectrum(rng):
    u = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))[0]
    m = u @ np.diag([1, 1, 1, 2, 2, 5.0]) @ u.conj().T
    eig = matcore.herm_eig(m)
    np.testing.assert_allclose(eig.eigenvalues, [1, 1, 1, 2, 2, 5], atol=1e-12)
    np.testing.assert_allclose(eig.reconstruct(), m, atol=1e-12)


def test_herm_eig_diagonal_input_is_untouched():
    eig = matcore.herm_eig(np.diag([3.0, -1.0, 0.5]))
    np.testing.assert_array_equal(eig.eigenvalues, [-1.0, 0.5, 3.0])


def test_herm_eig_rejects_bad_input():
    with pytest.raises(NotSquareError):
        matcore.herm_eig(np.zeros((2, 3)))
    with pytest.raises(NotHermitianError):
        matcore.herm_eig(np.array([[0, 1], [0, 0]]))


def test_eigen_decomposition_is_read_only(rng):
    eig = matcore.herm_eig(random_hermitian(rng, 3))
    with pytest.raises(ValueError):
        eig.eigenvalues[0] = 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_herm_eig_trace_and_orthonormality(n, seed):
    m = random_hermitian(np.random.default_rng(seed), n)
    eig = matcore.herm_eig(m)
    assert abs(eig.eigenvalues.sum() - np.trace(m).real) < 1e-10
    np.testing.assert_allclose(eig.eigenvectors.conj().T @ eig.eigenvectors, np.eye(n), atol=1e-12)


def test_kron_and_trace_norm():
    x = np.array([[0, 1], [1, 0]])
    np.testing.assert_array_equal(matcore.kron(x, x, x), np.kron(np.kron(x, x), x))
    assert matcore.trace_norm(np.diag([0.5, -0.25])) == pytest.approx(0.75)
    assert matcore.trace_norm(np.array([[0, 1], [0, 0]])) == pytest.approx(1.0)


def test_matrix_json_round_trip(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    text = json.dumps(matcore.matrix_to_json(m))
    np.testing.assert_array_equal(matcore.matrix_from_json(json.loads(text)), m)


@pytest.mark.parametrize("bad", [[1, 2], {"rows": 2}, {"rows": 1, "cols": 1, "data": [[1]]}])
def test_matrix_from_json_diagnostics(bad):
    with pytest.raises(ParseError):
        matcore.matrix_from_json(bad)
