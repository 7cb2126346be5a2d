"""Quantum codes and Knill-Laflamme machinery.

Two built-in codes: the three-qubit bit-flip repetition code with its four
standard recovery operators, and the four-qubit Leung code for amplitude
damping. Code-level quantities are computed in the codeword basis: for a
code with codeword matrix C (columns |i_L>), the codespace block of an
operator O is C^dag O C.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import matcore
from .errors import (
    DegenerateOperatorError,
    DimensionMismatchError,
    FitError,
    OutOfRangeError,
    ParseError,
    ValidationError,
    ZeroTraceError,
)
from .quantum import DensityMatrix, KrausChannel, PureState, ZERO_PROBABILITY

DEGENERACY_THRESHOLD = 1e-10


@dataclass(frozen=True)
class QecCode:
    n_qubits: int
    codewords: tuple
    recovery: tuple | None = None
    # indices into the matching noise channel's operator list
    correctable: tuple | None = None
    name: str = "custom"

    def __post_init__(self):
        words = tuple(w if isinstance(w, PureState) else PureState(w) for w in self.codewords)
        d = 2**self.n_qubits
        if d > matcore.MAX_DIM:
            raise ValidationError(f"{self.n_qubits} qubits exceed the dimension cap")
        if not words or any(w.dim != d for w in words):
            raise ValidationError(f"codewords must be non-empty vectors of dimension {d}")
        c = np.column_stack([w.amplitudes for w in words])
        gram_defect = np.max(np.abs(c.conj().T @ c - np.eye(len(words))))
        if gram_defect > 1e-12:
            raise ValidationError(f"codewords are not orthonormal (defect {gram_defect:.3e})")
        object.__setattr__(self, "codewords", words)
        if self.recovery is not None:
            rec = tuple(matcore.frozen(matcore.as_matrix(r)) for r in self.recovery)
            if any(r.shape != (d, d) for r in rec):
                raise ValidationError("recovery operators do not match the code dimension")
            defect = np.max(np.abs(sum(r.conj().T @ r for r in rec) - np.eye(d)))
            if defect > 1e-10:
                raise ValidationError(f"sum R^dag R deviates from I by {defect:.3e}")
            object.__setattr__(self, "recovery", rec)
        if self.correctable is not None:
            object.__setattr__(self, "correctable", tuple(int(i) for i in self.correctable))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def k(self) -> int:
        """Number of codewords."""
        return len(self.codewords)

    @property
    def codeword_matrix(self) -> np.ndarray:
        return np.column_stack([w.amplitudes for w in self.codewords])

    @property
    def projector(self) -> np.ndarray:
        c = self.codeword_matrix
        return c @ c.conj().T

    def block(self, op) -> np.ndarray:
        """C^dag op C."""
        c = self.codeword_matrix
        return c.conj().T @ op @ c

    def encode(self, logical) -> PureState:
        """Map logical amplitudes to a code state."""
        v = np.asarray(logical, dtype=np.complex128)
        return PureState.normalized(self.codeword_matrix @ v)

    def random_state(self, rng: np.random.Generator, mixed: bool = False) -> DensityMatrix:
        """Random code state: Haar pure, or a random full-rank mixture when ``mixed``."""
        g = rng.standard_normal((self.k, self.k if mixed else 1))
        g = g + 1j * rng.standard_normal(g.shape)
        logical = g @ g.conj().T
        c = self.codeword_matrix
        m = c @ logical @ c.conj().T
        return DensityMatrix(m / np.trace(m).real)


def _error_list(errors) -> list[np.ndarray]:
    if isinstance(errors, KrausChannel):
        return list(errors.operators)
    return [matcore.as_matrix(e, square=True) for e in errors]


def _check_dims(code: QecCode, errors: list[np.ndarray]) -> None:
    for i, e in enumerate(errors):
        if e.shape != (code.dim, code.dim):
            raise DimensionMismatchError(f"error {i} has shape {e.shape}, code dim is {code.dim}")


def repetition3() -> QecCode:
    """Three-qubit bit-flip code |000>, |111> with its four recovery operators."""
    ket = lambda bits: PureState.basis(8, int(bits, 2)).amplitudes
    zero_l, one_l = ket("000"), ket("111")
    pairs = [("000", "111"), ("100", "011"), ("010", "101"), ("001", "110")]
    recovery = tuple(
        np.outer(zero_l, ket(a)) + np.outer(one_l, ket(b)) for a, b in pairs
    )
    return QecCode(3, (zero_l, one_l), recovery=recovery, correctable=(0, 1, 2, 3), name="repetition3")


def leung4() -> QecCode:
    """Four-qubit amplitude-damping code of Leung et al.

    The correctable metadata indexes ``tensor_power(amplitude_damping(g), 4)``:
    no damping and single damping on each qubit.
    """
    v = np.zeros((2, 16), dtype=np.complex128)
    v[0, 0b0000] = v[0, 0b1111] = 1 / np.sqrt(2)
    v[1, 0b0011] = v[1, 0b1100] = 1 / np.sqrt(2)
    return QecCode(4, (v[0], v[1]), correctable=(0, 1, 2, 4, 8), name="leung4")


@dataclass(frozen=True)
class KlReport:
    alpha: np.ndarray
    residual: float
    exact: bool


def kl_check_exact(code: QecCode, errors, tol: float = 1e-12) -> KlReport:
    """Test <i_L|A_k^dag A_m|j_L> = delta_ij alpha_km for every pair (k, m)."""
    ops = _error_list(errors)
    _check_dims(code, ops)
    c = code.codeword_matrix
    images = [a @ c for a in ops]
    n = len(ops)
    alpha = np.zeros((n, n), dtype=np.complex128)
    residual = 0.0
    for k in range(n):
        for m in range(n):
            b = images[k].conj().T @ images[m]
            diag = np.diag(b)
            alpha[k, m] = diag.mean()
            off = b - np.diag(diag)
            spread = np.max(np.abs(diag[:, None] - diag[None, :]))
            residual = max(residual, float(np.max(np.abs(off))), float(spread))
    return KlReport(matcore.frozen(alpha), residual, residual <= tol)


@dataclass(frozen=True)
class ApproxKlReport:
    """alpha_jk P_C + P_C B_jk P_C split of every codespace block.

    ``b_hat`` maps (j, k) to the residual written in the codeword basis.
    """

    alpha: np.ndarray
    b_hat: dict
    truncation_order: int
    gamma: float
    residual: float
    exact_pairs: frozenset = field(default_factory=frozenset)

    def b_hat_operator(self, code: QecCode, j: int, k: int) -> np.ndarray:
        c = code.codeword_matrix
        return c @ self.b_hat[(j, k)] @ c.conj().T


def _family_ops(family, g: float) -> list[np.ndarray]:
    return _error_list(family(g))


def kl_decompose_approx(
    code: QecCode,
    family: Callable[[float], object],
    gamma: float,
    order: int = 1,
    indices: Sequence[int] | None = None,
) -> ApproxKlReport:
    """Split each codespace block into a low-order scalar part and a residual.

    ``family(g)`` returns the error operators at noise strength g. The scalar
    part alpha_jk is the order-truncated Taylor polynomial of the normalized
    block trace Tr(C^dag A_j^dag A_k C)/k, obtained by polynomial interpolation
    on the samples {0, g/8, g/4, g/2, g}. Pairs whose block is proportional to
    the identity at every sample satisfy the KL conditions exactly; they keep
    the full scalar and a zero residual.
    """
    if order < 0:
        raise OutOfRangeError("order must be >= 0")
    if not gamma > 0:
        raise OutOfRangeError("gamma must be positive")
    samples = np.array([0.0, gamma / 8, gamma / 4, gamma / 2, gamma])
    per_sample = [_family_ops(family, s) for s in samples]
    n_all = len(per_sample[-1])
    idx = list(range(n_all)) if indices is None else list(indices)
    for ops in per_sample:
        _check_dims(code, ops)

    vander = np.vander(samples, len(samples), increasing=True)
    cond = np.linalg.cond(vander)
    if not np.isfinite(cond) or cond > 1e14:
        raise FitError(f"sample grid is ill-conditioned (cond={cond:.3e})")

    c = code.codeword_matrix
    kdim = code.k
    images = [[ops[i] @ c for i in idx] for ops in per_sample]
    n = len(idx)
    alpha = np.zeros((n, n), dtype=np.complex128)
    b_hat = {}
    exact = set()
    residual = 0.0
    n_terms = min(order + 1, len(samples))
    powers = gamma ** np.arange(n_terms)
    for a in range(n):
        for b in range(n):
            blocks = [img[a].conj().T @ img[b] for img in images]
            scalars = np.array([np.trace(blk) / kdim for blk in blocks])
            scale = max(1.0, max(np.max(np.abs(blk)) for blk in blocks))
            is_exact = all(
                np.max(np.abs(blk - s * np.eye(kdim))) <= 1e-12 * scale
                for blk, s in zip(blocks, scalars)
            )
            if is_exact:
                value = scalars[-1]
                exact.add((idx[a], idx[b]))
            else:
                coeffs = np.linalg.solve(vander, scalars)
                value = coeffs[:n_terms] @ powers
            alpha[a, b] = value
            bh = blocks[-1] - value * np.eye(kdim)
            b_hat[(idx[a], idx[b])] = matcore.frozen(bh)
            full = c @ blocks[-1] @ c.conj().T
            rebuilt = value * code.projector + c @ bh @ c.conj().T
            residual = max(residual, float(np.max(np.abs(full - rebuilt))))
    return ApproxKlReport(matcore.frozen(alpha), b_hat, order, float(gamma), residual, frozenset(exact))


def detection_range(code: QecCode, error) -> tuple[float, float]:
    """Smallest and largest eigenvalue of P_C A^dag A P_C on the codespace."""
    a = matcore.as_matrix(error, square=True)
    _check_dims(code, [a])
    img = a @ code.codeword_matrix
    w = matcore.eigvalsh(img.conj().T @ img)
    return float(w[0]), float(w[-1])


def canonical_recovery(code: QecCode, errors) -> list[np.ndarray]:
    """Recovery built from the polar isometry of each A_k P_C.

    For error k the image A_k C is first projected off the ranges already
    claimed by earlier errors; its polar isometry V_k then defines
    R_k = C V_k^dag. A projector onto whatever is left of the Hilbert space
    completes the set so that sum R^dag R = I.
    """
    ops = _error_list(errors)
    _check_dims(code, ops)
    c = code.codeword_matrix
    d = code.dim
    claimed = np.zeros((d, d), dtype=np.complex128)
    recovery = []
    for i, a in enumerate(ops):
        img = (np.eye(d) - claimed) @ a @ c
        u, s, wh = np.linalg.svd(img, full_matrices=False)
        if s[-1] < DEGENERACY_THRESHOLD:
            raise DegenerateOperatorError(
                f"error {i} is rank-deficient on the codespace (singular value {s[-1]:.3e})"
            )
        v = u @ wh
        recovery.append(c @ v.conj().T)
        claimed = claimed + v @ v.conj().T
    rest = np.eye(d) - claimed
    rest = 0.5 * (rest + rest.conj().T)
    if np.trace(rest).real > 0.5:
        recovery.append(rest)
    return recovery


@dataclass(frozen=True)
class StabilizerMixedState:
    error_index: int
    state: DensityMatrix


def stabilizer_mixed_states(code: QecCode, errors) -> list[StabilizerMixedState]:
    """rho_j = A_j P_C A_j^dag / Tr(A_j P_C A_j^dag)."""
    ops = _error_list(errors)
    _check_dims(code, ops)
    p = code.projector
    out = []
    for j, a in enumerate(ops):
        m = a @ p @ a.conj().T
        tr = np.trace(m).real
        if tr <= ZERO_PROBABILITY:
            raise ZeroTraceError(f"error {j} annihilates the codespace")
        out.append(StabilizerMixedState(j, DensityMatrix(m / tr)))
    return out


@dataclass(frozen=True)
class SubspaceDecomposition:
    bases: list
    max_cross_overlap: float
    total_dimension: int

    @property
    def orthogonal(self) -> bool:
        return self.max_cross_overlap <= 1e-12


def subspace_decomposition(code: QecCode, errors) -> SubspaceDecomposition:
    """Orthonormal bases of S_k = span{A_k|i_L>} and their largest mutual overlap.

    The overlap between two subspaces is the cosine of their smallest principal
    angle (largest singular value of B_k^dag B_l).
    """
    ops = _error_list(errors)
    _check_dims(code, ops)
    c = code.codeword_matrix
    bases = []
    for j, a in enumerate(ops):
        u, s, _ = np.linalg.svd(a @ c, full_matrices=False)
        rank = int(np.sum(s > DEGENERACY_THRESHOLD * max(1.0, s[0])))
        if s[0] <= ZERO_PROBABILITY or rank == 0:
            raise ZeroTraceError(f"error {j} annihilates the codespace")
        bases.append(u[:, :rank])
    cross = 0.0
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            sv = np.linalg.svd(bases[i].conj().T @ bases[j], compute_uv=False)
            cross = max(cross, float(sv[0]))
    return SubspaceDecomposition(bases, cross, sum(b.shape[1] for b in bases))


def code_to_json(code: QecCode) -> dict:
    out = {
        "n_qubits": code.n_qubits,
        "codewords": [[[float(z.real), float(z.imag)] for z in w.amplitudes] for w in code.codewords],
    }
    if code.recovery is not None:
        out["recovery"] = [matcore.matrix_to_json(r) for r in code.recovery]
    if code.correctable is not None:
        out["correctable"] = list(code.correctable)
    out["name"] = code.name
    return out


def code_from_json(obj, where: str = "code") -> QecCode:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    for key in ("n_qubits", "codewords"):
        if key not in obj:
            raise ParseError(f"{where}: missing field {key!r}")
    n = obj["n_qubits"]
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"{where}.n_qubits: expected a positive integer")
    words = []
    if not isinstance(obj["codewords"], list):
        raise ParseError(f"{where}.codewords: expected a list")
    for i, vec in enumerate(obj["codewords"]):
        if not isinstance(vec, list):
            raise ParseError(f"{where}.codewords[{i}]: expected a list of [re, im]")
        amps = []
        for j, pair in enumerate(vec):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ParseError(f"{where}.codewords[{i}][{j}]: expected [re, im]")
            amps.append(complex(pair[0], pair[1]))
        words.append(np.array(amps, dtype=np.complex128))
    recovery = None
    if obj.get("recovery") is not None:
        recovery = tuple(
            matcore.matrix_from_json(r, f"{where}.recovery[{i}]") for i, r in enumerate(obj["recovery"])
        )
    try:
        return QecCode(
            n,
            tuple(words),
            recovery=recovery,
            correctable=obj.get("correctable"),
            name=obj.get("name", "custom"),
        )
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None
