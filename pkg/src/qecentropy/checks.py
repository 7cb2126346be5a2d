"""The reproduction suite behind ``qecentropy reproduce``.

Every check compares a computed quantity against a reference value or bound
at a named tolerance. Tolerances can be overridden by name.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import codes, cycle, discrim, entropy, quantum
from .quantum import PureState

TOLERANCES = {
    "helstrom": 1e-12,
    "ambiguity_asymptote": 0.01,
    "ambiguity_certificate": 1e-10,
    "priors_identity": 5e-5,
    "cycle_w_diagonal": 1e-10,
    "cycle_eq2": 1e-10,
    "cycle_eq5": 1e-10,
    "cycle_second_law": 1e-10,
    "cycle_reversibility": 1e-9,
    "kl_exact": 1e-12,
    "stabilizer_overlaps": 1e-12,
    "locc_condition": 1e-12,
    "approx_kl_alpha": 1e-6,
    "approx_kl_bhat": 1e-6,
    "approx_kl_residual": 1e-9,
    "approx_kl_exact_bhat": 1e-10,
    "detection_spread": 1e-10,
    "detection_spread_exact": 1e-12,
    "leung_fidelity_scaling": 0.25,
    "ad_coherence": 1e-9,
    "ad_threshold_bits": 0.05,
    "ad_threshold_nats": 0.05,
    "erasure_monotonicity": 0.0,
    "channel_entropy": 1e-10,
    "discrimination_bound": 1e-10,
    "discrimination_orthogonal": 1e-12,
}


@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    computed: float
    tolerance: float
    passed: bool
    unit: str

    def __post_init__(self):
        object.__setattr__(self, "computed", float(self.computed))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "passed", bool(self.passed))

    def to_json(self) -> dict:
        return asdict(self)


def helstrom_example() -> tuple[PureState, PureState]:
    s3 = math.sqrt(3.0) / 2.0
    return PureState(np.array([0.5, s3])), PureState(np.array([s3, 0.5]))


def symmetric_detectors() -> quantum.Povm:
    """Pi_1 = |1><1|, Pi_2 = |0><0|."""
    return quantum.Povm((np.diag([0.0, 1.0]), np.diag([1.0, 0.0])))


def _check_helstrom(tol):
    psi1, psi2 = helstrom_example()
    ens = discrim.DiscriminationEnsemble((psi1, psi2), (0.5, 0.5))
    values = [
        discrim.helstrom_pure(psi1, psi2, 0.5, 0.5),
        discrim.povm_error(symmetric_detectors(), ens),
        discrim.helstrom_mixed(ens),
    ]
    dev = max(abs(v - 0.25) for v in values)
    return [Check("helstrom", "0.25 (pure, POVM, trace-norm)", values[0], tol["helstrom"],
                  dev <= tol["helstrom"], "probability")]


def _check_ambiguity(tol):
    res = discrim.ambiguity_delta_min(1e-3)
    rel = abs(res.asymptotic_ratio - discrim.ETA_TILDE) / discrim.ETA_TILDE
    g = discrim.ambiguity_constraint(res.delta_min, res.overlap)
    return [
        Check("ambiguity_asymptote", f"{discrim.ETA_TILDE:.7f} (relative)", res.asymptotic_ratio,
              tol["ambiguity_asymptote"], rel <= tol["ambiguity_asymptote"], "dimensionless"),
        Check("ambiguity_certificate", "g(delta_min) in [-tol, 0]", g,
              tol["ambiguity_certificate"], -tol["ambiguity_certificate"] <= g <= 0.0, "dimensionless"),
    ]


def _check_priors(tol):
    dev = discrim.priors_consistency_check()
    eta1, eta2 = discrim.QUOTED_PRIORS
    return [Check("priors_identity", f"{discrim.ETA_TILDE:.7f}", eta1 * eta2,
                  tol["priors_identity"], dev <= tol["priors_identity"], "probability")]


def _check_cycle(tol, seed):
    code = codes.repetition3()
    noise = quantum.bitflip_enlarged(0.1)
    rng = np.random.default_rng(seed)
    w_dev = eq2 = eq5 = tot = rev = None
    for i in range(200):
        rho = code.random_state(rng, mixed=bool(i % 2))
        rep = cycle.run_cycle(code, noise, None, rho, restricted=True)
        dev = float(np.max(np.abs(np.real(np.diag(rep.w)) - rep.syndrome_probs)))
        r = float(np.max(np.abs(rep.recovered_state.matrix - rho.matrix)))
        w_dev = dev if w_dev is None else max(w_dev, dev)
        rev = r if rev is None else max(rev, r)
        slack2 = rep.erasure_cost - rep.s_exchange
        slack5 = rep.delta_s + rep.s_exchange
        eq2 = slack2 if eq2 is None else min(eq2, slack2)
        eq5 = slack5 if eq5 is None else min(eq5, slack5)
        tot = rep.delta_s_tot if tot is None else min(tot, rep.delta_s_tot)
    return [
        Check("cycle_w_diagonal", "max|W_kk - p_k| <= tol", w_dev, tol["cycle_w_diagonal"],
              w_dev <= tol["cycle_w_diagonal"], "probability"),
        Check("cycle_eq2", "min H(p) - S(W) >= -tol", eq2, tol["cycle_eq2"],
              eq2 >= -tol["cycle_eq2"], "bits"),
        Check("cycle_eq5", "min dS + S(W) >= -tol", eq5, tol["cycle_eq5"],
              eq5 >= -tol["cycle_eq5"], "bits"),
        Check("cycle_second_law", "min dS_tot >= -tol", tot, tol["cycle_second_law"],
              tot >= -tol["cycle_second_law"], "bits"),
        Check("cycle_reversibility", "max|R(L(rho)) - rho| <= tol", rev, tol["cycle_reversibility"],
              rev <= tol["cycle_reversibility"], "dimensionless"),
    ]


def _check_kl_exact(tol):
    code = codes.repetition3()
    worst = 0.0
    ok = True
    for p in (0.01, 0.1, 0.3):
        ops = quantum.bitflip_enlarged(p).operators
        rep = codes.kl_check_exact(code, ops[:4], tol["kl_exact"])
        q1 = p * (1 - p) ** 2
        expected = np.diag([(1 - p) ** 3, q1, q1, q1])
        dev = max(rep.residual, float(np.max(np.abs(rep.alpha - expected))))
        worst = max(worst, dev)
        ok &= rep.exact
        ok &= not codes.kl_check_exact(code, [ops[0], ops[7]], tol["kl_exact"]).exact
    return [Check("kl_exact", "residual and alpha deviation <= tol; {A0, A7} not exact", worst,
                  tol["kl_exact"], ok and worst <= tol["kl_exact"], "probability")]


def _check_stabilizer(tol):
    code = codes.repetition3()
    ops = quantum.bitflip_enlarged(0.1).operators
    states = [s.state for s in codes.stabilizer_mixed_states(code, ops)]
    o = discrim.overlap_matrix(states[:4])
    dev = float(np.max(np.abs(o - 0.5 * np.eye(4))))
    for a, b in ((0, 7), (1, 6), (2, 5), (3, 4)):
        dev = max(dev, float(np.max(np.abs(states[a].matrix - states[b].matrix))))
    return [Check("stabilizer_overlaps", "O = I/2; rho_j = rho_{7-j}", dev, tol["stabilizer_overlaps"],
                  dev <= tol["stabilizer_overlaps"], "dimensionless")]


def _check_locc(tol):
    code = codes.repetition3()
    povm = discrim.recovery_povm(code.recovery)
    ops = quantum.bitflip_enlarged(0.1).operators
    states = [s.state for s in codes.stabilizer_mixed_states(code, ops[:4])]
    rep = discrim.locc_necessary_check(povm, states, tol["locc_condition"])
    return [Check("locc_condition", "Tr(Pi_l rho_m) = delta_lm, diagonal Pi", rep.max_deviation,
                  tol["locc_condition"], rep.perfect and rep.separable_certificate, "probability")]


def ad_family(n: int):
    return lambda g: quantum.tensor_power(quantum.amplitude_damping(g), n)


def _check_approx_kl(tol):
    g = 0.1
    leung = codes.leung4()
    rep = codes.kl_decompose_approx(leung, ad_family(4), g, order=1, indices=[0])
    alpha_dev = abs(rep.alpha[0, 0] - (1 - 2 * g))
    bh = rep.b_hat[(0, 0)]
    bh_expected = np.diag([3 * g**2 - 2 * g**3 + 0.5 * g**4, g**2])
    bh_dev = float(np.max(np.abs(bh - bh_expected)))
    rep3 = codes.repetition3()
    exact = codes.kl_decompose_approx(
        rep3, lambda p: quantum.bitflip_enlarged(p).operators[:4], g, order=1
    )
    exact_dev = max(float(np.max(np.abs(b))) for b in exact.b_hat.values())
    return [
        Check("approx_kl_alpha", "alpha_00 = 1 - 2 gamma = 0.8", float(rep.alpha[0, 0].real),
              tol["approx_kl_alpha"], alpha_dev <= tol["approx_kl_alpha"], "probability"),
        Check("approx_kl_bhat", "B_00 = diag(0.02805, 0.01)", bh_dev, tol["approx_kl_bhat"],
              bh_dev <= tol["approx_kl_bhat"], "probability"),
        Check("approx_kl_residual", "reconstruction residual <= tol", rep.residual,
              tol["approx_kl_residual"], rep.residual <= tol["approx_kl_residual"], "probability"),
        Check("approx_kl_exact_bhat", "B = 0 for an exact code", exact_dev,
              tol["approx_kl_exact_bhat"], exact_dev <= tol["approx_kl_exact_bhat"], "probability"),
    ]


def leung_spread(g: float) -> float:
    lo, hi = codes.detection_range(codes.leung4(), ad_family(4)(g).operators[0])
    return hi - lo


def _check_spread(tol):
    g = 0.1
    closed = 2 * g**2 - 2 * g**3 + 0.5 * g**4
    spread = leung_spread(g)
    ratios = [leung_spread(x) / x**2 for x in (1e-2, 1e-3)]
    lo, hi = codes.detection_range(codes.repetition3(), quantum.bitflip_enlarged(0.1).operators[1])
    return [
        Check("detection_spread", f"{closed:.6g}; spread/gamma^2 in [1.5, 2.5]", spread,
              tol["detection_spread"],
              abs(spread - closed) <= tol["detection_spread"] and all(1.5 <= r <= 2.5 for r in ratios),
              "probability"),
        Check("detection_spread_exact", "0", hi - lo, tol["detection_spread_exact"],
              abs(hi - lo) <= tol["detection_spread_exact"], "probability"),
    ]


def leung_infidelity(g: float, recover: bool = True) -> float:
    leung = codes.leung4()
    channel = ad_family(4)(g)
    rec = None
    if recover:
        rec = codes.canonical_recovery(leung, [channel.operators[i] for i in leung.correctable])
    return float(np.max(cycle.codeword_infidelities(leung, channel, rec)))


def _check_fidelity(tol):
    ratios = [leung_infidelity(g) / g**2 for g in (0.05, 0.02, 0.01)]
    variation = (max(ratios) - min(ratios)) / min(ratios)
    helps = leung_infidelity(0.05) < leung_infidelity(0.05, recover=False)
    return [Check("leung_fidelity_scaling", "(1-F)/gamma^2 variation < tol; recovery helps", variation,
                  tol["leung_fidelity_scaling"], variation < tol["leung_fidelity_scaling"] and helps,
                  "dimensionless")]


AD_GRID = np.round(np.arange(0.0, 1.0 + 1e-12, 1e-3), 12)


def _check_ad(tol):
    out = []
    a_bits = cycle.coherence_for_entropy(0.56, 2)
    h_dev = abs(entropy.binary_entropy((1 + a_bits) / 2, 2) - 0.56)
    out.append(Check("ad_coherence", "h2((1+a)/2) = 0.56 bits", a_bits, tol["ad_coherence"],
                     h_dev <= tol["ad_coherence"], "dimensionless"))
    for base, name in ((2, "ad_threshold_bits"), ("e", "ad_threshold_nats")):
        a = cycle.coherence_for_entropy(0.56, base)
        t = cycle.ad_entropy_sweep(a, AD_GRID).threshold
        value = float("nan") if t is None else t
        # band [0.2, 0.3] is 0.25 +- tol
        passed = t is not None and abs(t - 0.25) <= tol[name]
        out.append(Check(name, f"gamma* in [0.25 - tol, 0.25 + tol] (a from 0.56 {entropy.unit_name(base)})",
                         value, tol[name], passed, "probability"))
    return out


def _check_erasure(tol):
    xs = np.linspace(0.0, 1.0, 52)[1:-1]
    h = 1e-6
    diffs = [(entropy.erasure_entropy(x + h) - entropy.erasure_entropy(x - h)) / (2 * h) for x in xs]
    worst = max(diffs)
    return [Check("erasure_monotonicity", "all central differences < -tol", worst,
                  tol["erasure_monotonicity"], worst < -tol["erasure_monotonicity"], "bits")]


def _check_channels(tol, seed):
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(200):
        rho = quantum.sample_pure_state(2, rng).density()
        mixed = quantum.random_density_matrix(2, rng)
        for state in (rho, mixed):
            s0 = entropy.von_neumann(state)
            for p in (0.1, 0.5, 0.9):
                for ch in (quantum.depolarizing(p), quantum.dephasing(p)):
                    worst = min(worst, entropy.von_neumann(quantum.apply_channel(ch, state)) - s0)
    witness = quantum.DensityMatrix.maximally_mixed(2)
    drop = entropy.von_neumann(witness) - entropy.von_neumann(
        quantum.apply_channel(quantum.amplitude_damping(0.9), witness))
    return [Check("channel_entropy", "min dS >= -tol (depol, dephase); AD witness drop > 0", worst,
                  tol["channel_entropy"], worst >= -tol["channel_entropy"] and drop > 0, "bits")]


def _check_discrimination(tol, seed):
    psi1 = PureState(np.array([1.0, 0.0]))
    psi2 = PureState(np.array([0.5, math.sqrt(3) / 2]))
    ens = discrim.DiscriminationEnsemble((psi1, psi2), (0.5, 0.5))
    bound = discrim.helstrom_pure(psi1, psi2, 0.5, 0.5)
    best = discrim.min_error_over_random_povms(ens, 10_000, seed)
    orth = discrim.DiscriminationEnsemble((psi1, PureState(np.array([0.0, 1.0]))), (0.5, 0.5))
    orth_err = discrim.povm_error(quantum.computational_povm(2), orth)
    return [
        Check("discrimination_bound", f"min random POVM error >= {bound:.6g} - tol", best,
              tol["discrimination_bound"], best >= bound - tol["discrimination_bound"], "probability"),
        Check("discrimination_orthogonal", "0", orth_err, tol["discrimination_orthogonal"],
              orth_err <= tol["discrimination_orthogonal"], "probability"),
    ]


def run_all(tolerances: dict | None = None, seed: int = 42) -> list[Check]:
    tol = dict(TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(TOLERANCES)
        if unknown:
            raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(tolerances)
    results = []
    results += _check_helstrom(tol)
    results += _check_ambiguity(tol)
    results += _check_priors(tol)
    results += _check_cycle(tol, seed)
    results += _check_kl_exact(tol)
    results += _check_stabilizer(tol)
    results += _check_locc(tol)
    results += _check_approx_kl(tol)
    results += _check_spread(tol)
    results += _check_fidelity(tol)
    results += _check_ad(tol)
    results += _check_erasure(tol)
    results += _check_channels(tol, seed)
    results += _check_discrimination(tol, seed)
    return results
