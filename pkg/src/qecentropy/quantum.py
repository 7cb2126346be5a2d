"""Quantum states, Kraus channels, POVMs and measurement."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matcore
from .errors import (
    DimensionCapError,
    DimensionMismatchError,
    InvalidStateError,
    OutOfRangeError,
    ParseError,
    ValidationError,
    ZeroTraceError,
)

ATOL = 1e-10
ZERO_PROBABILITY = 1e-14

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise OutOfRangeError(f"{name}={value} outside [0, 1]")
    return value


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size < 1:
            raise InvalidStateError("empty state vector")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise InvalidStateError(f"state vector has norm {norm:.12g}")
        object.__setattr__(self, "amplitudes", matcore.frozen(amps))

    @classmethod
    def normalized(cls, vec) -> "PureState":
        v = np.asarray(vec, dtype=np.complex128).ravel()
        return cls(v / np.linalg.norm(v))

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        v = np.zeros(dim, dtype=np.complex128)
        v[index] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())

    def overlap(self, other: "PureState") -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dims {self.dim} and {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    Eigenvalues in [-1e-10, 0) are clipped to zero on construction; anything
    more negative is rejected.
    """

    matrix: np.ndarray

    def __post_init__(self):
        try:
            m = matcore.as_matrix(self.matrix, square=True)
        except ValueError as exc:
            raise InvalidStateError(str(exc)) from None
        if matcore.hermiticity_defect(m) > ATOL:
            raise InvalidStateError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise InvalidStateError(f"density matrix has trace {tr:.12g}")
        eig = matcore.herm_eig(m)
        lo = eig.eigenvalues[0]
        if lo < -ATOL:
            raise InvalidStateError(f"density matrix has eigenvalue {lo:.3e}")
        if lo < 0.0:
            w = np.clip(eig.eigenvalues, 0.0, None)
            m = (eig.eigenvectors * w) @ eig.eigenvectors.conj().T
        object.__setattr__(self, "matrix", matcore.frozen(m))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return matcore.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def as_density(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    if isinstance(rho, PureState):
        return rho.density()
    return DensityMatrix(rho)


def normalized_density(m) -> DensityMatrix:
    """Divide a positive operator by its trace."""
    m = matcore.as_matrix(m, square=True)
    tr = np.trace(m).real
    if tr <= ZERO_PROBABILITY:
        raise ZeroTraceError(f"operator has trace {tr:.3e}")
    return DensityMatrix(m / tr)


@dataclass(frozen=True)
class KrausChannel:
    """Ordered Kraus operators; ``complete`` flags trace preservation.

    An incomplete channel is a restricted sub-channel whose operators satisfy
    sum A^dag A <= I.
    """

    operators: tuple
    complete: bool = True

    def __post_init__(self):
        ops = tuple(matcore.frozen(matcore.as_matrix(a, square=True)) for a in self.operators)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(a.shape != (d, d) for a in ops):
            raise DimensionMismatchError("Kraus operators have differing shapes")
        gram = sum(a.conj().T @ a for a in ops)
        if self.complete:
            defect = np.max(np.abs(gram - np.eye(d)))
            if defect > ATOL:
                raise ValidationError(f"sum A^dag A deviates from I by {defect:.3e}")
        else:
            lo = matcore.eigvalsh(np.eye(d) - gram)[0]
            if lo < -ATOL:
                raise ValidationError(f"sum A^dag A exceeds I (min eig {lo:.3e})")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def restrict(self, indices: Sequence[int]) -> "KrausChannel":
        """Sub-channel keeping only the operators at ``indices``."""
        return KrausChannel(tuple(self.operators[i] for i in indices), complete=False)


@dataclass(frozen=True)
class Povm:
    elements: tuple

    def __post_init__(self):
        elems = tuple(matcore.frozen(matcore.as_matrix(e, square=True)) for e in self.elements)
        if not elems:
            raise ValidationError("a POVM needs at least one element")
        d = elems[0].shape[0]
        if any(e.shape != (d, d) for e in elems):
            raise DimensionMismatchError("POVM elements have differing shapes")
        for k, e in enumerate(elems):
            if not matcore.is_hermitian(e, ATOL):
                raise ValidationError(f"POVM element {k} is not Hermitian")
            if matcore.eigvalsh(e)[0] < -ATOL:
                raise ValidationError(f"POVM element {k} is not positive")
        defect = np.max(np.abs(sum(elems) - np.eye(d)))
        if defect > ATOL:
            raise ValidationError(f"POVM elements sum to I only within {defect:.3e}")
        object.__setattr__(self, "elements", elems)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class MeasurementOutcome:
    index: int
    probability: float
    posterior: DensityMatrix | None  # None when the outcome has probability < 1e-14


def computational_povm(dim: int) -> Povm:
    return Povm(tuple(PureState.basis(dim, i).projector() for i in range(dim)))


def apply_channel(ch: KrausChannel, rho, *, return_leakage: bool = False):
    """Apply ``ch`` to ``rho``.

    A restricted (incomplete) channel's output is renormalized by its trace;
    the discarded probability is returned as leakage when requested.
    """
    rho = as_density(rho)
    if rho.dim != ch.dim:
        raise DimensionMismatchError(f"channel dim {ch.dim} vs state dim {rho.dim}")
    m = rho.matrix
    out = sum(a @ m @ a.conj().T for a in ch.operators)
    tr = float(np.trace(out).real)
    if tr <= ZERO_PROBABILITY:
        raise ZeroTraceError("channel annihilates the state")
    leakage = 0.0 if ch.complete else max(1.0 - tr, 0.0)
    state = DensityMatrix(out / tr)
    return (state, leakage) if return_leakage else state


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=np.complex128),))


def bitflip_enlarged(p: float) -> KrausChannel:
    """Eight three-qubit bit-flip Kraus operators A0..A7.

    Order: no flip; single flips on qubits 1, 2, 3; double flips on (1,2),
    (1,3), (2,3); triple flip.
    """
    p = _check_probability(p, "p")
    flips = [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
    ops = []
    for flipped in flips:
        w = len(flipped)
        weight = np.sqrt(p**w * (1.0 - p) ** (3 - w))
        ops.append(weight * matcore.kron(*[X if q in flipped else I2 for q in range(3)]))
    return KrausChannel(tuple(ops))


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_probability(gamma, "gamma")
    a0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=np.complex128)
    a1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=np.complex128)
    return KrausChannel((a0, a1))


def depolarizing(p: float) -> KrausChannel:
    """Qubit depolarizing channel; p = 1 sends every state to I/2."""
    p = _check_probability(p, "p")
    return KrausChannel(
        (np.sqrt(1.0 - 3.0 * p / 4.0) * I2, np.sqrt(p / 4) * X, np.sqrt(p / 4) * Y, np.sqrt(p / 4) * Z)
    )


def dephasing(p: float) -> KrausChannel:
    """Qubit dephasing channel; off-diagonals shrink by 1 - p."""
    p = _check_probability(p, "p")
    return KrausChannel((np.sqrt(1.0 - p / 2.0) * I2, np.sqrt(p / 2.0) * Z))


def tensor_power(ch: KrausChannel, n: int) -> KrausChannel:
    """All n-fold Kronecker products of ``ch``'s operators, lexicographic order.

    Index ``i`` with base-K digits (k1, ..., kn), most significant first, is
    A_k1 (x) ... (x) A_kn.
    """
    if n < 1:
        raise OutOfRangeError("n must be a positive integer")
    if ch.dim**n > matcore.MAX_DIM:
        raise DimensionCapError(f"dimension {ch.dim}**{n} exceeds {matcore.MAX_DIM}")
    ops = []
    for combo in itertools.product(ch.operators, repeat=n):
        op = combo[0]
        for a in combo[1:]:
            op = np.kron(op, a)
        ops.append(op)
    return KrausChannel(tuple(ops), complete=ch.complete)


def measure(instrument, rho) -> list[MeasurementOutcome]:
    """Outcome probabilities and post-measurement states.

    ``instrument`` is a KrausChannel (posterior M rho M^dag / p) or a Povm
    (Lueders posterior with sqrt(Pi)).
    """
    rho = as_density(rho)
    if isinstance(instrument, Povm):
        ops = [_psd_sqrt(e) for e in instrument.elements]
    elif isinstance(instrument, KrausChannel):
        ops = list(instrument.operators)
    else:
        ops = [matcore.as_matrix(a, square=True) for a in instrument]
    if ops[0].shape[0] != rho.dim:
        raise DimensionMismatchError(f"instrument dim {ops[0].shape[0]} vs state dim {rho.dim}")
    outcomes = []
    for k, m in enumerate(ops):
        unnorm = m @ rho.matrix @ m.conj().T
        p = float(np.trace(unnorm).real)
        if p < ZERO_PROBABILITY:
            outcomes.append(MeasurementOutcome(k, max(p, 0.0), None))
        else:
            outcomes.append(MeasurementOutcome(k, p, DensityMatrix(unnorm / p)))
    return outcomes


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    eig = matcore.herm_eig(m)
    w = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    return (eig.eigenvectors * w) @ eig.eigenvectors.conj().T


def sample_pure_state(dim: int, seed) -> PureState:
    """Haar-random pure state; ``seed`` is an int or a numpy Generator."""
    if dim < 2:
        raise OutOfRangeError("dim must be at least 2")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a complex Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "dim": ch.dim,
        "operators": [matcore.matrix_to_json(a) for a in ch.operators],
        "complete": bool(ch.complete),
    }


def channel_from_json(obj, where: str = "channel") -> KrausChannel:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    for key in ("dim", "operators", "complete"):
        if key not in obj:
            raise ParseError(f"{where}: missing field {key!r}")
    if not isinstance(obj["operators"], list):
        raise ParseError(f"{where}.operators: expected a list")
    ops = [matcore.matrix_from_json(o, f"{where}.operators[{i}]") for i, o in enumerate(obj["operators"])]
    if any(op.shape != (obj["dim"], obj["dim"]) for op in ops):
        raise ValidationError(f"{where}: operator shapes do not match dim={obj['dim']}")
    try:
        return KrausChannel(tuple(ops), complete=bool(obj["complete"]))
    except (ValueError, ValidationError) as exc:
        raise ValidationError(f"{where}: {exc}") from None


def povm_to_json(povm: Povm) -> dict:
    return {"dim": povm.dim, "elements": [matcore.matrix_to_json(e) for e in povm.elements]}


def povm_from_json(obj, where: str = "povm") -> Povm:
    if not isinstance(obj, dict) or "elements" not in obj or "dim" not in obj:
        raise ParseError(f"{where}: expected an object with 'dim' and 'elements'")
    elems = [matcore.matrix_from_json(e, f"{where}.elements[{i}]") for i, e in enumerate(obj["elements"])]
    try:
        return Povm(tuple(elems))
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None
