"""Entropy functionals: von Neumann, Shannon, entropy exchange, erasure entropy."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import DimensionMismatchError, NotADistributionError, OutOfRangeError
from .quantum import KrausChannel, PureState, as_density

EIGEN_FLOOR = 1e-15


def _log(x, base):
    return np.log(x) / math.log(base)


def _parse_base(base) -> float:
    if base in (2, "2", "bits"):
        return 2.0
    if base in ("e", "nats") or (isinstance(base, float) and math.isclose(base, math.e)):
        return math.e
    raise ValueError(f"log base must be 2 or 'e', got {base!r}")


def unit_name(base) -> str:
    return "bits" if _parse_base(base) == 2.0 else "nats"


def spectral_entropy(eigenvalues, base=2) -> float:
    """-sum w log w over the values above the 1e-15 floor."""
    w = np.asarray(eigenvalues, dtype=float)
    w = w[w > EIGEN_FLOOR]
    return float(-np.sum(w * _log(w, _parse_base(base)))) + 0.0


def von_neumann(rho, base=2) -> float:
    """S(rho) = -Tr rho log rho. Raises InvalidStateError on a non-state."""
    return spectral_entropy(as_density(rho).eigenvalues(), base)


def shannon(p, base=2) -> float:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-10:
        raise NotADistributionError(f"not a probability vector: {p}")
    return spectral_entropy(np.clip(p, 0.0, None), base)


def binary_entropy(x: float, base=2) -> float:
    return shannon([x, 1.0 - x], base)


@dataclass(frozen=True)
class WMatrix:
    """W_ij = Tr(E_i rho E_j^dag) for instrument operators E_k."""

    matrix: np.ndarray
    basis_labels: tuple

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def off_diagonal_mass(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - np.diag(np.diag(m))))) if m.shape[0] > 1 else 0.0


def w_matrix(instrument, rho) -> WMatrix:
    ops = instrument.operators if isinstance(instrument, KrausChannel) else tuple(instrument)
    rho = as_density(rho)
    if ops[0].shape[1] != rho.dim:
        raise DimensionMismatchError(f"instrument dim {ops[0].shape[1]} vs state dim {rho.dim}")
    images = [e @ rho.matrix for e in ops]
    k = len(ops)
    w = np.empty((k, k), dtype=np.complex128)
    for i in range(k):
        for j in range(k):
            # Tr(E_i rho E_j^dag)
            w[i, j] = np.sum(images[i] * ops[j].conj())
    w = 0.5 * (w + w.conj().T)
    return WMatrix(matcore.frozen(w), tuple(range(k)))


def entropy_exchange(instrument, rho, base=2) -> tuple[WMatrix, float]:
    """The W-matrix and its entropy S(W)."""
    w = w_matrix(instrument, rho)
    return w, spectral_entropy(matcore.eigvalsh(w.matrix), base)


def apparatus_states(xi: float, delta: float) -> tuple[PureState, PureState]:
    """|m1> = |0>, |m2> = xi sqrt(delta)|0> + sqrt(1 - xi^2 delta)|1>."""
    if not 0.0 <= delta <= 1.0:
        raise OutOfRangeError(f"delta={delta} outside [0, 1]")
    if xi < 0.0 or xi * xi * delta > 1.0 + 1e-12:
        raise OutOfRangeError(f"xi={xi} outside [0, delta^-1/2]")
    c = xi * math.sqrt(delta)
    m1 = PureState(np.array([1.0, 0.0]))
    m2 = PureState(np.array([c, math.sqrt(max(1.0 - c * c, 0.0))]))
    return m1, m2


def erasure_entropy(overlap: float, base=2) -> float:
    """Entropy of the normalized mixture of two pure states with real overlap x.

    The spectrum is (1 +- x)/2.
    """
    if not 0.0 <= overlap <= 1.0:
        raise OutOfRangeError(f"overlap={overlap} outside [0, 1]")
    return spectral_entropy([(1 + overlap) / 2, (1 - overlap) / 2], base)


def mixture_entropy(m1: PureState, m2: PureState, base=2) -> float:
    """Entropy of (|m1><m1| + |m2><m2|) / Tr(.), computed from the matrix."""
    mix = m1.projector() + m2.projector()
    return von_neumann(mix / np.trace(mix).real, base)
