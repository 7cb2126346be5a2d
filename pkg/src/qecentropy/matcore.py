"""Dense complex linear algebra for small matrices (dimension <= 64).

Matrices are plain ``numpy`` complex128 arrays. The Hermitian eigensolver is
a cyclic Jacobi iteration, which is accurate to roundoff at these sizes and
keeps every spectral quantity in the package on one code path.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    NoConvergenceError,
    NotHermitianError,
    NotSquareError,
    ParseError,
)

MAX_DIM = 64
HERMITIAN_ATOL = 1e-10


class EigenDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the matching unit eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m, *, square: bool = False) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex128 array, rejecting malformed shapes."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise NotSquareError(f"matrix of shape {a.shape} is not square")
    return a


def dagger(m) -> np.ndarray:
    return np.asarray(m).conj().T


def hermiticity_defect(m) -> float:
    a = as_matrix(m, square=True)
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(m, atol: float = HERMITIAN_ATOL) -> bool:
    return hermiticity_defect(m) <= atol


def frozen(a: np.ndarray) -> np.ndarray:
    """Return a read-only copy of ``a``."""
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


def herm_eig(m, tol: float = 1e-12, max_sweeps: int = 100) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized before iterating. Sweeps stop once the
    off-diagonal Frobenius mass drops below ``tol`` relative to the matrix
    norm (scaled down a further 1e-3, which Jacobi's quadratic convergence
    reaches within one extra sweep).

    Raises
    ------
    NotSquareError, NotHermitianError, NoConvergenceError
    """
    a = as_matrix(m, square=True)
    if hermiticity_defect(a) > HERMITIAN_ATOL:
        raise NotHermitianError(
            f"matrix deviates from its adjoint by {hermiticity_defect(a):.3e}"
        )
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)

    norm = np.linalg.norm(a)
    if n == 1 or norm == 0.0:
        return _sorted(np.real(np.diag(a)).copy(), v)
    threshold = max(1e-3 * tol * norm, np.finfo(float).tiny)

    for _ in range(max_sweeps):
        off = np.sqrt(max(norm**2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        # the subtraction above loses precision near convergence
        if off < 1e-6 * norm:
            off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < threshold:
            return _sorted(np.real(np.diag(a)).copy(), v)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # unitary acting on columns p, q: phase fix then real rotation
                j = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = [p, q]
                a[:, cols] = a[:, cols] @ j
                a[cols, :] = j.conj().T @ a[cols, :]
                v[:, cols] = v[:, cols] @ j
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    raise NoConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _sorted(w: np.ndarray, v: np.ndarray) -> EigenDecomposition:
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(frozen(w[order]), frozen(v[:, order]))


def eigvalsh(m, tol: float = 1e-12) -> np.ndarray:
    return herm_eig(m, tol).eigenvalues


def kron(a, b, *more) -> np.ndarray:
    """Kronecker product of two or more matrices, left to right."""
    out = np.kron(as_matrix(a), as_matrix(b))
    for c in more:
        out = np.kron(out, as_matrix(c))
    return out


def trace_norm(m) -> float:
    """Sum of singular values."""
    a = as_matrix(m, square=True)
    if is_hermitian(a, 1e-14):
        return float(np.sum(np.abs(eigvalsh(a))))
    gram = a.conj().T @ a
    w = np.clip(eigvalsh(gram), 0.0, None)
    return float(np.sum(np.sqrt(w)))


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    """Parse ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` (row-major)."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object, got {type(obj).__name__}")
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except KeyError as exc:
        raise ParseError(f"{where}: missing field {exc.args[0]!r}") from None
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise ParseError(f"{where}: rows/cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"{where}.data: expected {rows * cols} entries")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(data):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) for x in pair)
        ):
            raise ParseError(f"{where}.data[{i}]: expected [re, im]")
        out[i] = complex(pair[0], pair[1])
    return out.reshape(rows, cols)
