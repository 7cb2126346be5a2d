"""Two-state and multi-state discrimination: Helstrom bound, POVM error,
the ambiguity-factor bound, and perfect-discrimination checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matcore
from .errors import (
    BadPriorsError,
    CountMismatchError,
    DimensionMismatchError,
    IncompleteRecoveryError,
    OutOfRangeError,
)
from .quantum import DensityMatrix, Povm, PureState, as_density

# (1 + sqrt 2)^-2, the small-overlap slope of the minimal ambiguity factor
ETA_TILDE = (1.0 + math.sqrt(2.0)) ** -2
QUOTED_PRIORS = (0.78005, 0.21995)


@dataclass(frozen=True)
class DiscriminationEnsemble:
    states: tuple
    priors: tuple

    def __post_init__(self):
        states = tuple(as_density(s) for s in self.states)
        priors = tuple(float(p) for p in self.priors)
        if len(states) != len(priors):
            raise CountMismatchError(f"{len(states)} states but {len(priors)} priors")
        if any(p < 0 for p in priors) or abs(sum(priors) - 1.0) > 1e-10:
            raise BadPriorsError(f"priors {priors} are not a distribution")
        if len({s.dim for s in states}) > 1:
            raise DimensionMismatchError("ensemble states have differing dimensions")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    @property
    def dim(self) -> int:
        return self.states[0].dim


def helstrom_pure(psi1: PureState, psi2: PureState, eta1: float, eta2: float) -> float:
    """Minimum error for two pure states: (1 - sqrt(1 - 4 eta1 eta2 |<psi1|psi2>|^2)) / 2."""
    if eta1 < 0 or eta2 < 0 or abs(eta1 + eta2 - 1.0) > 1e-10:
        raise BadPriorsError(f"priors ({eta1}, {eta2}) do not sum to one")
    c2 = abs(psi1.overlap(psi2)) ** 2
    return 0.5 * (1.0 - math.sqrt(max(1.0 - 4.0 * eta1 * eta2 * c2, 0.0)))


def povm_error(povm: Povm, ensemble: DiscriminationEnsemble) -> float:
    """1 - sum_k eta_k Tr(rho_k Pi_k)."""
    if len(povm) != len(ensemble.states):
        raise CountMismatchError(f"{len(povm)} POVM elements for {len(ensemble.states)} states")
    if povm.dim != ensemble.dim:
        raise DimensionMismatchError(f"POVM dim {povm.dim} vs state dim {ensemble.dim}")
    correct = sum(
        eta * np.real(np.sum(rho.matrix * pi.T))
        for eta, rho, pi in zip(ensemble.priors, ensemble.states, povm.elements)
    )
    return float(min(max(1.0 - correct, 0.0), 1.0))


def helstrom_mixed(ensemble: DiscriminationEnsemble) -> float:
    """(1 - ||eta1 rho1 - eta2 rho2||_1) / 2."""
    if len(ensemble.states) != 2:
        raise CountMismatchError("helstrom_mixed needs exactly two states")
    (r1, r2), (e1, e2) = ensemble.states, ensemble.priors
    gap = matcore.trace_norm(e1 * r1.matrix - e2 * r2.matrix)
    return 0.5 * (1.0 - gap)


def helstrom_povm(ensemble: DiscriminationEnsemble) -> Povm:
    """Projector onto the positive part of eta1 rho1 - eta2 rho2, and its complement."""
    if len(ensemble.states) != 2:
        raise CountMismatchError("helstrom_povm needs exactly two states")
    (r1, r2), (e1, e2) = ensemble.states, ensemble.priors
    eig = matcore.herm_eig(e1 * r1.matrix - e2 * r2.matrix)
    v = eig.eigenvectors[:, eig.eigenvalues > 0]
    pi1 = v @ v.conj().T
    return Povm((pi1, np.eye(ensemble.dim) - pi1))


def ambiguity_constraint(delta: float, c1: float) -> float:
    """g(delta) = (1 + delta) c1^2 - 2 sqrt(delta (1 - delta)) c1 - delta.

    Admissible ambiguity factors satisfy g <= 0.
    """
    return (1.0 + delta) * c1 * c1 - 2.0 * math.sqrt(max(delta * (1.0 - delta), 0.0)) * c1 - delta


@dataclass(frozen=True)
class AmbiguityBoundResult:
    overlap: float
    delta_min: float
    asymptotic_ratio: float  # delta_min / c1^2; nan at c1 = 0


def ambiguity_delta_min(c1: float, iterations: int = 60) -> AmbiguityBoundResult:
    """Smallest ambiguity factor compatible with a real overlap ``c1``.

    g is strictly decreasing on [0, 1/2] and g(1/2) = (3c1/2 + 1/2)(c1 - 1) <= 0,
    so bisection on [0, 1/2] keeping g(hi) <= 0 brackets the first root.
    """
    if not 0.0 <= c1 <= 1.0:
        raise OutOfRangeError(f"overlap {c1} outside [0, 1]")
    lo, hi = 0.0, 0.5
    if ambiguity_constraint(lo, c1) <= 0.0:
        hi = lo
    else:
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if ambiguity_constraint(mid, c1) <= 0.0:
                hi = mid
            else:
                lo = mid
    ratio = hi / (c1 * c1) if c1 > 0 else float("nan")
    return AmbiguityBoundResult(float(c1), hi, ratio)


def priors_consistency_check(priors: Sequence[float] = QUOTED_PRIORS) -> float:
    """|eta1 eta2 - (1 + sqrt 2)^-2| for the quoted prior pair."""
    eta1, eta2 = priors
    return abs(eta1 * eta2 - ETA_TILDE)


def overlap_matrix(states) -> np.ndarray:
    """O_jk = Tr(rho_j rho_k)."""
    mats = [as_density(s).matrix for s in states]
    if len({m.shape for m in mats}) > 1:
        raise DimensionMismatchError("states have differing dimensions")
    n = len(mats)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = np.real(np.sum(mats[i] * mats[j].T))
    return out


@dataclass(frozen=True)
class LoccReport:
    perfect: bool
    separable_certificate: bool
    max_deviation: float


def locc_necessary_check(povm: Povm, states, tol: float = 1e-12) -> LoccReport:
    """Check Tr(Pi_i rho_j) = delta_ij and certify separability of the Pi_i.

    The certificate is sufficient only: every element diagonal in the
    computational product basis.
    """
    dens = [as_density(s) for s in states]
    if len(dens) != len(povm):
        raise CountMismatchError(f"{len(povm)} POVM elements for {len(dens)} states")
    table = np.array(
        [[np.real(np.sum(pi * rho.matrix.T)) for rho in dens] for pi in povm.elements]
    )
    deviation = float(np.max(np.abs(table - np.eye(len(dens)))))
    diagonal = all(
        np.max(np.abs(pi - np.diag(np.diag(pi)))) <= tol for pi in povm.elements
    )
    return LoccReport(deviation <= tol, diagonal, deviation)


def recovery_povm(recovery) -> Povm:
    """Pi_k = R_k^dag R_k."""
    ops = [matcore.as_matrix(r, square=True) for r in recovery]
    elems = [r.conj().T @ r for r in ops]
    defect = np.max(np.abs(sum(elems) - np.eye(ops[0].shape[0])))
    if defect > 1e-10:
        raise IncompleteRecoveryError(f"sum R^dag R deviates from I by {defect:.3e}")
    return Povm(tuple(elems))


def random_binary_povm(dim: int, rng: np.random.Generator) -> Povm:
    """{Pi, I - Pi} with Pi = U diag(u) U^dag, U Haar and u uniform in [0, 1]."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    pi = (q * rng.uniform(0.0, 1.0, dim)) @ q.conj().T
    pi = 0.5 * (pi + pi.conj().T)
    return Povm((pi, np.eye(dim) - pi))


def min_error_over_random_povms(
    ensemble: DiscriminationEnsemble, count: int, seed: int
) -> float:
    """Smallest povm_error found among ``count`` random binary POVMs."""
    rng = np.random.default_rng(seed)
    best = 1.0
    for _ in range(count):
        best = min(best, povm_error(random_binary_povm(ensemble.dim, rng), ensemble))
    return best
