"""One QEC cycle with a full entropy ledger, plus parameter sweeps.

A cycle is: noise rho -> rho', syndrome measurement with outcome
probabilities p_k, recovery R_k, and erasure of the syndrome record at a
Landauer cost of H(p_k). The ledger checks W_kk = p_k, H(p) >= S(W),
dS + S(W) >= 0 and dS + H(p) >= 0.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect

from . import matcore
from .codes import QecCode, detection_range
from .entropy import (
    binary_entropy,
    entropy_exchange,
    shannon,
    spectral_entropy,
    unit_name,
    von_neumann,
)
from .errors import (
    DimensionMismatchError,
    FitError,
    NotInCodespaceError,
    OutOfRangeError,
    ValidationError,
)
from .quantum import (
    DensityMatrix,
    KrausChannel,
    PureState,
    amplitude_damping,
    apply_channel,
    as_density,
)

VERDICT_SLACK = 1e-10
W_DIAGONAL_TOL = 1e-10
RECOVERY_TOL = 1e-8
CODESPACE_TOL = 1e-8


def fidelity(psi_in: PureState, rho_out) -> float:
    """<psi|rho_out|psi>."""
    rho_out = as_density(rho_out)
    if psi_in.dim != rho_out.dim:
        raise DimensionMismatchError(f"dims {psi_in.dim} and {rho_out.dim}")
    v = psi_in.amplitudes
    return float(np.real(v.conj() @ rho_out.matrix @ v))


def uhlmann_fidelity(rho, sigma) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; equals <psi|sigma|psi> for pure rho."""
    rho, sigma = as_density(rho), as_density(sigma)
    eig = matcore.herm_eig(rho.matrix)
    root = (eig.eigenvectors * np.sqrt(np.clip(eig.eigenvalues, 0, None))) @ eig.eigenvectors.conj().T
    inner = matcore.eigvalsh(root @ sigma.matrix @ root)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)


@dataclass(frozen=True)
class CycleReport:
    s_in: float
    s_noisy: float
    delta_s: float
    syndrome_probs: np.ndarray
    erasure_cost: float
    w: np.ndarray
    s_exchange: float
    delta_s_tot: float
    recovered_state: DensityMatrix
    fidelity: float
    leakage: float
    verdicts: dict
    base: str = "bits"
    restricted: bool = True

    @property
    def all_passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        unit = self.base
        return {
            "base": unit,
            "restricted": self.restricted,
            "s_in": self.s_in,
            "s_noisy": self.s_noisy,
            "delta_s": self.delta_s,
            "syndrome_probs": [float(p) for p in self.syndrome_probs],
            "erasure_cost": self.erasure_cost,
            "w": matcore.matrix_to_json(self.w),
            "s_exchange": self.s_exchange,
            "delta_s_tot": self.delta_s_tot,
            "recovered_state": matcore.matrix_to_json(self.recovered_state.matrix),
            "fidelity": self.fidelity,
            "leakage": self.leakage,
            "verdicts": dict(self.verdicts),
            "units": {
                "s_in": unit,
                "s_noisy": unit,
                "delta_s": unit,
                "erasure_cost": unit,
                "s_exchange": unit,
                "delta_s_tot": unit,
                "syndrome_probs": "probability",
                "fidelity": "probability",
                "leakage": "probability",
            },
        }


def run_cycle(
    code: QecCode,
    noise: KrausChannel,
    recovery: Sequence | None,
    rho_in,
    restricted: bool = True,
    base=2,
) -> CycleReport:
    """Run one noise / syndrome / recovery / erasure cycle on ``rho_in``.

    With ``restricted`` the noise is cut down to the code's correctable
    operators (unless the channel passed in is already a sub-channel) and
    renormalized. Unrestricted runs still fill the ledger, but the
    dS_tot >= 0 verdict is left out because perfect recovery does not hold.
    """
    rho_in = as_density(rho_in)
    if rho_in.dim != code.dim or noise.dim != code.dim:
        raise DimensionMismatchError(
            f"code dim {code.dim}, noise dim {noise.dim}, state dim {rho_in.dim}"
        )
    p_c = code.projector
    if np.max(np.abs(p_c @ rho_in.matrix @ p_c - rho_in.matrix)) > CODESPACE_TOL:
        raise NotInCodespaceError("input state has support outside the codespace")
    if recovery is None:
        if code.recovery is None:
            raise ValidationError(f"code {code.name!r} has no built-in recovery")
        recovery = code.recovery
    recovery = [matcore.as_matrix(r, square=True) for r in recovery]

    channel = noise
    if restricted and noise.complete:
        if code.correctable is None:
            raise ValidationError(f"code {code.name!r} declares no correctable set")
        channel = noise.restrict(code.correctable)

    rho_noisy, leakage = apply_channel(channel, rho_in, return_leakage=True)
    s_in = von_neumann(rho_in, base)
    s_noisy = von_neumann(rho_noisy, base)
    delta_s = s_in - s_noisy

    w, s_exchange = entropy_exchange(recovery, rho_noisy, base)
    probs = w.diagonal.copy()
    direct_probs = np.array(
        [np.real(np.trace(r @ rho_noisy.matrix @ r.conj().T)) for r in recovery]
    )
    erasure = shannon(np.clip(direct_probs, 0.0, None), base)
    delta_s_tot = delta_s + erasure

    out = sum(r @ rho_noisy.matrix @ r.conj().T for r in recovery)
    recovered = DensityMatrix(out / np.trace(out).real)
    fid = uhlmann_fidelity(rho_in, recovered)

    verdicts = {
        "W_kk=p_k": bool(np.max(np.abs(probs - direct_probs)) <= W_DIAGONAL_TOL),
        "H>=S(W)": bool(erasure - s_exchange >= -VERDICT_SLACK),
        "dS+S(W)>=0": bool(delta_s + s_exchange >= -VERDICT_SLACK),
        "perfect_recovery": bool(
            np.max(np.abs(recovered.matrix - rho_in.matrix)) <= RECOVERY_TOL
        ),
    }
    if restricted:
        verdicts["dS_tot>=0"] = bool(delta_s_tot >= -VERDICT_SLACK)

    return CycleReport(
        s_in=s_in,
        s_noisy=s_noisy,
        delta_s=delta_s,
        syndrome_probs=matcore.frozen(direct_probs),
        erasure_cost=erasure,
        w=w.matrix,
        s_exchange=s_exchange,
        delta_s_tot=delta_s_tot,
        recovered_state=recovered,
        fidelity=fid,
        leakage=leakage,
        verdicts=verdicts,
        base=unit_name(base),
        restricted=restricted,
    )


def codeword_infidelities(code: QecCode, noise: KrausChannel, recovery=None) -> np.ndarray:
    """1 - <i_L| R(noise(|i_L><i_L|)) |i_L> per codeword; no recovery when None."""
    out = []
    for word in code.codewords:
        state = apply_channel(noise, word.density())
        if recovery is not None:
            m = sum(r @ state.matrix @ r.conj().T for r in recovery)
            state = DensityMatrix(m / np.trace(m).real)
        out.append(1.0 - fidelity(word, state))
    return np.array(out)


def ad_state(a: float) -> DensityMatrix:
    """(|0><0| + a|0><1| + a|1><0| + |1><1|) / 2."""
    if not 0.0 <= a <= 1.0:
        raise OutOfRangeError(f"a={a} outside [0, 1]")
    return DensityMatrix(0.5 * np.array([[1.0, a], [a, 1.0]], dtype=np.complex128))


def coherence_for_entropy(target: float, base=2, xtol: float = 1e-15) -> float:
    """The a in [0, 1] with S(ad_state(a)) = target, by bisection.

    S(ad_state(a)) = h((1 + a)/2) decreases from log 2 to 0 on [0, 1].
    """
    top = binary_entropy(0.5, base)
    if not 0.0 < target < top:
        raise OutOfRangeError(f"target entropy {target} outside (0, {top})")
    return bisect(lambda a: binary_entropy((1 + a) / 2, base) - target, 0.0, 1.0, xtol=xtol, maxiter=200)


@dataclass(frozen=True)
class SweepResult:
    parameter: np.ndarray
    entropy_bits: np.ndarray
    entropy_nats: np.ndarray
    fidelity: np.ndarray
    s_initial_bits: float
    threshold: float | None  # where S(rho') falls back below S(rho)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["parameter", "entropy_bits", "entropy_nats", "fidelity"])
        for row in zip(self.parameter, self.entropy_bits, self.entropy_nats, self.fidelity):
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "parameter": [float(x) for x in self.parameter],
            "entropy_bits": [float(x) for x in self.entropy_bits],
            "entropy_nats": [float(x) for x in self.entropy_nats],
            "fidelity": [float(x) for x in self.fidelity],
            "s_initial_bits": self.s_initial_bits,
            "threshold": self.threshold,
            "units": {
                "parameter": "probability",
                "entropy_bits": "bits",
                "entropy_nats": "nats",
                "fidelity": "probability",
                "s_initial_bits": "bits",
                "threshold": "probability",
            },
        }


def locate_downcrossing(grid: np.ndarray, diff: np.ndarray, tol: float = 1e-12) -> float | None:
    """First point where ``diff`` goes from positive to negative, linearly interpolated."""
    for i in range(len(grid) - 1):
        if diff[i] > tol and diff[i + 1] < -tol:
            t = diff[i] / (diff[i] - diff[i + 1])
            return float(grid[i] + t * (grid[i + 1] - grid[i]))
    return None


def ad_entropy_sweep(a: float, gamma_grid, base=2) -> SweepResult:
    """Entropy of amplitude-damped ad_state(a) over a grid of damping rates."""
    grid = np.asarray(gamma_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise OutOfRangeError("gamma grid must be a non-empty vector")
    if np.any(grid < 0) or np.any(grid > 1):
        raise OutOfRangeError("gamma grid must lie in [0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise OutOfRangeError("gamma grid must be strictly increasing")
    rho = ad_state(a)
    s0_bits = von_neumann(rho, 2)
    bits, nats, fids = [], [], []
    for g in grid:
        out = apply_channel(amplitude_damping(g), rho)
        w = out.eigenvalues()
        bits.append(spectral_entropy(w, 2))
        nats.append(spectral_entropy(w, "e"))
        fids.append(uhlmann_fidelity(rho, out))
    bits = np.array(bits)
    threshold = locate_downcrossing(grid, bits - s0_bits)
    return SweepResult(grid, bits, np.array(nats), np.array(fids), s0_bits, threshold)


@dataclass(frozen=True)
class ErrorClassification:
    correctable: list
    non_correctable: list
    non_detectable: list
    exponents: dict = field(default_factory=dict)


def classify_errors(
    code: QecCode,
    family: Callable[[float], object],
    gamma: float,
    threshold_order: int = 1,
) -> ErrorClassification:
    """Sort errors by how their maximum detection probability scales with gamma.

    The exponent s of lambda_max ~ gamma^s is the log-log slope between
    gamma and gamma/2; the slope between gamma/2 and gamma/4 must agree to
    within 0.2. Errors with s <= threshold_order + 1/2 are correctable.
    """
    if not 0.0 < gamma <= 0.5:
        raise OutOfRangeError(f"gamma={gamma} outside (0, 0.5]")

    def ops_at(g):
        f = family(g)
        return list(f.operators) if isinstance(f, KrausChannel) else list(f)

    samples = [ops_at(gamma), ops_at(gamma / 2), ops_at(gamma / 4)]
    correctable, non_correctable, non_detectable = [], [], []
    exponents = {}
    for i in range(len(samples[0])):
        lam = [detection_range(code, ops[i])[1] for ops in samples]
        if all(x <= 1e-300 for x in lam):
            non_detectable.append(i)
            continue
        if any(x <= 1e-300 for x in lam):
            raise FitError(f"error {i}: detection probability vanishes at some samples only")
        s1 = math.log(lam[0] / lam[1]) / math.log(2.0)
        s2 = math.log(lam[1] / lam[2]) / math.log(2.0)
        if abs(s1 - s2) >= 0.2:
            raise FitError(f"error {i}: inconsistent exponents {s1:.3f} vs {s2:.3f}")
        exponents[i] = s1
        (correctable if s1 <= threshold_order + 0.5 else non_correctable).append(i)
    return ErrorClassification(correctable, non_correctable, non_detectable, exponents)
