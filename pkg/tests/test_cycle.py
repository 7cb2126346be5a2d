import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qecentropy import codes, cycle, entropy, quantum
from qecentropy.errors import NotInCodespaceError, OutOfRangeError
from qecentropy.quantum import PureState

REP = codes.repetition3()
NOISE = quantum.bitflip_enlarged(0.1)


def test_cycle_logical_zero():
    rep = cycle.run_cycle(REP, NOISE, None, REP.codewords[0].density())
    np.testing.assert_allclose(rep.syndrome_probs, [0.75, 1 / 12, 1 / 12, 1 / 12], atol=1e-14)
    assert rep.erasure_cost == pytest.approx(1.2075187496394219, abs=1e-12)
    assert rep.s_exchange == pytest.approx(rep.erasure_cost, abs=1e-12)
    assert rep.leakage == pytest.approx(0.028)
    assert rep.fidelity == pytest.approx(1.0, abs=1e-12)
    assert rep.all_passed and "dS_tot>=0" in rep.verdicts


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.45), st.booleans())
def test_cycle_ledger_invariants(seed, p, mixed):
    rho = REP.random_state(np.random.default_rng(seed), mixed=mixed)
    rep = cycle.run_cycle(REP, quantum.bitflip_enlarged(p), None, rho)
    np.testing.assert_allclose(np.real(np.diag(rep.w)), rep.syndrome_probs, atol=1e-10)
    assert rep.erasure_cost - rep.s_exchange >= -1e-10
    assert rep.delta_s + rep.s_exchange >= -1e-10
    assert rep.delta_s_tot >= -1e-10
    np.testing.assert_allclose(rep.recovered_state.matrix, rho.matrix, atol=1e-9)


def test_cycle_unrestricted_fails_recovery():
    rep = cycle.run_cycle(REP, NOISE, None, REP.codewords[0].density(), restricted=False)
    assert "dS_tot>=0" not in rep.verdicts
    assert not rep.verdicts["perfect_recovery"]
    assert rep.leakage == 0.0
    assert rep.fidelity == pytest.approx(0.972)


def test_cycle_nats_and_json():
    rep = cycle.run_cycle(REP, NOISE, None, REP.codewords[0].density(), base="e")
    doc = json.loads(json.dumps(rep.to_json()))
    assert doc["base"] == "nats" and doc["units"]["erasure_cost"] == "nats"
    assert doc["erasure_cost"] == pytest.approx(1.2075187496394219 * np.log(2), abs=1e-12)


def test_cycle_rejects_state_outside_codespace():
    with pytest.raises(NotInCodespaceError):
        cycle.run_cycle(REP, NOISE, None, PureState.basis(8, 1).density())


def test_fidelities():
    psi = PureState.basis(2, 0)
    assert cycle.fidelity(psi, psi.density()) == pytest.approx(1.0)
    assert cycle.fidelity(psi, PureState.basis(2, 1).density()) == pytest.approx(0.0)
    rho = quantum.DensityMatrix(np.diag([0.5, 0.5]))
    sigma = quantum.DensityMatrix(np.diag([0.9, 0.1]))
    expected = (np.sqrt(0.45) + np.sqrt(0.05)) ** 2
    assert cycle.uhlmann_fidelity(rho, sigma) == pytest.approx(expected, abs=1e-12)
    assert cycle.uhlmann_fidelity(psi.density(), sigma) == pytest.approx(0.9, abs=1e-12)


def test_ad_state_and_coherence():
    a = cycle.coherence_for_entropy(0.56)
    assert abs(entropy.binary_entropy((1 + a) / 2) - 0.56) <= 1e-9
    assert a == pytest.approx(0.7381277013, abs=1e-9)
    a_nats = cycle.coherence_for_entropy(0.56, "e")
    assert a_nats == pytest.approx(0.50423, abs=1e-4)
    with pytest.raises(OutOfRangeError):
        cycle.coherence_for_entropy(1.5)
    with pytest.raises(OutOfRangeError):
        cycle.ad_state(1.2)


def test_ad_sweep():
    grid = np.linspace(0, 1, 101)
    res = cycle.ad_entropy_sweep(cycle.coherence_for_entropy(0.56), grid)
    assert res.entropy_bits[0] == pytest.approx(0.56, abs=1e-9)
    assert res.entropy_bits[-1] == pytest.approx(0.0, abs=1e-12)
    assert res.fidelity[0] == pytest.approx(1.0, abs=1e-12)
    assert res.threshold == pytest.approx(0.5448, abs=2e-3)
    np.testing.assert_allclose(res.entropy_nats, res.entropy_bits * np.log(2), atol=1e-12)
    lines = res.to_csv().splitlines()
    assert lines[0] == "parameter,entropy_bits,entropy_nats,fidelity" and len(lines) == 102


def test_ad_sweep_validates_grid():
    with pytest.raises(OutOfRangeError):
        cycle.ad_entropy_sweep(0.5, [0.2, 0.1])
    with pytest.raises(OutOfRangeError):
        cycle.ad_entropy_sweep(0.5, [0.5, 1.5])


def test_locate_downcrossing():
    grid = np.array([0.0, 1.0, 2.0])
    assert cycle.locate_downcrossing(grid, np.array([1.0, 1.0, -1.0])) == pytest.approx(1.5)
    assert cycle.locate_downcrossing(grid, np.array([1.0, 2.0, 3.0])) is None


def test_channel_entropy_witness():
    mixed = quantum.DensityMatrix.maximally_mixed(2)
    out = quantum.apply_channel(quantum.amplitude_damping(0.9), mixed)
    assert entropy.von_neumann(out) < entropy.von_neumann(mixed)
