import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from xorrigid.clifford import SX, SY, SZ, detuned_slofstra, slofstra_strategy
from xorrigid.errors import ContractError
from xorrigid.game import QuantumStrategy, bias_of, chsh_n
from xorrigid.matcore import BipartiteState, max_entangled, product_state
from xorrigid.rigidity import (
    balance_pad,
    build_qubit_pairs,
    certify_entropy,
    embedded_chsh_report,
    entanglement_entropy,
    exact_anticommute_repair,
    fannes_lower_bound,
    select_good_subset,
    tilde_observables,
)

from conftest import random_observable, random_state

# frozen once from a detuning sweep (t in [6e-4, 0.1], n = 4 and n = 6);
# measured maxima were 0.8433 and 0.894
C_ANTICOMM = 0.85
C_PAIRS = 1.0


def anticomm_norm(x, z, state):
    return np.linalg.norm((x @ z + z @ x) @ state.matrix)


def binary_entropy(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


# tilde observables

def test_tilde_chsh2_recovers_alice():
    s = slofstra_strategy(2)
    t12, t21 = tilde_observables(s.bobObs[0], s.bobObs[1])
    assert np.allclose(t12, s.aliceObs[0].T, atol=1e-12)
    assert np.allclose(t21, s.aliceObs[1].T, atol=1e-12)


def test_tilde_kernel_completion():
    t1, t2 = tilde_observables(SZ, SZ)
    assert np.allclose(t1, SZ)
    assert np.allclose(t2, np.eye(2))


def test_tilde_continuity():
    s = slofstra_strategy(2)
    u = expm(-1j * 1e-3 * SZ)
    b12 = u @ s.bobObs[0] @ u.conj().T
    ref = tilde_observables(s.bobObs[0], s.bobObs[1])
    got = tilde_observables(b12, s.bobObs[1])
    for r, g in zip(ref, got):
        assert np.linalg.norm(r - g, 2) < 1e-2


def test_tilde_rejects_non_observable():
    with pytest.raises(ContractError):
        tilde_observables(np.diag([1.0, 0.5]), SZ)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31))
def test_tilde_outputs_are_observables(dim, seed):
    rng = np.random.default_rng(seed)
    for t in tilde_observables(random_observable(rng, dim), random_observable(rng, dim)):
        assert np.allclose(t, t.conj().T, atol=1e-9)
        assert np.allclose(t @ t, np.eye(dim), atol=1e-9)


# embedded CHSH report

def test_report_exact_n4():
    r = embedded_chsh_report(slofstra_strategy(4), 4)
    iu = np.triu_indices(4, 1)
    assert np.all(r.pairBiases[iu] <= 1e-9)
    for arr in (r.aliceAnticomm, r.bobAnticomm, r.crossConsistency):
        assert arr.max() <= 1e-8


def test_report_identity_alice():
    n = 3
    s = slofstra_strategy(n)
    # Bob = Id is a best response to constant Alice: classical bias 1/2 per pair
    ident = QuantumStrategy((np.eye(2),) * n, (np.eye(2),) * (n * (n - 1)), s.state)
    r = embedded_chsh_report(ident, n)
    iu = np.triu_indices(n, 1)
    assert r.pairBiases[iu] == pytest.approx(1 - 0.5 / (np.sqrt(2) / 2), abs=1e-9)
    assert np.allclose(r.aliceAnticomm[iu], 2.0)


def test_report_shape_mismatch():
    with pytest.raises(ContractError):
        embedded_chsh_report(slofstra_strategy(3), 4)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_report_consistency_random(n, seed):
    rng = np.random.default_rng(seed)
    dim = 2
    s = QuantumStrategy(
        tuple(random_observable(rng, dim) for _ in range(n)),
        tuple(random_observable(rng, dim) for _ in range(n * (n - 1))),
        random_state(rng, dim, dim),
    )
    r = embedded_chsh_report(s, n)
    iu = np.triu_indices(n, 1)
    assert r.pairBiases[iu].mean() == pytest.approx(r.epsilon, abs=1e-9)
    for arr in (r.aliceAnticomm, r.bobAnticomm, r.crossConsistency):
        assert np.all(arr >= 0) and np.all(arr <= 2 + 1e-9)


def test_noisy_anticommutator_calibrated():
    r = embedded_chsh_report(detuned_slofstra(4, 0.05), 4)
    assert r.epsilon > 0
    assert r.averages["aliceAnticomm"] <= C_ANTICOMM * np.sqrt(r.epsilon)


def sweep_slope(n, ts):
    eps, res = [], []
    for t in ts:
        r = embedded_chsh_report(detuned_slofstra(n, t), n)
        eps.append(r.epsilon)
        res.append(r.averages["aliceAnticomm"])
    slope, _ = np.polyfit(np.log(eps), np.log(res), 1)
    return np.array(eps), slope


def test_scaling_slope():
    eps, slope = sweep_slope(4, np.geomspace(6.33e-4, 0.0633, 9))
    assert eps.min() <= 1.1e-6 and eps.max() >= 0.9e-2
    assert slope >= 0.45


# exact anti-commutation repair

def test_repair_already_anticommuting():
    s = max_entangled(2)
    zt = exact_anticommute_repair(SX, SZ, s)
    assert np.linalg.norm((SZ - zt) @ s.matrix) <= 1e-10


def test_repair_tilted_qubit():
    z = SZ + 0.1 * SX
    z = z / np.sqrt(1.01)  # (cos a) Z + (sin a) X is an observable
    s = max_entangled(2)
    zt = exact_anticommute_repair(SX, z, s)
    assert np.allclose(SX @ zt + zt @ SX, 0, atol=1e-10)
    assert np.linalg.norm((z - zt) @ s.matrix) <= np.sqrt(1.5) * anticomm_norm(SX, z, s) + 1e-8


@pytest.mark.parametrize("seed", range(50))
def test_repair_random_dim4(seed):
    rng = np.random.default_rng(seed)
    x = random_observable(rng, 4, balanced=True)
    z = random_observable(rng, 4, balanced=True)
    s = random_state(rng, 4, 3)
    zt = exact_anticommute_repair(x, z, s)
    assert np.abs(x @ zt + zt @ x).max() <= 1e-10
    assert np.linalg.norm((z - zt) @ s.matrix) <= np.sqrt(1.5) * anticomm_norm(x, z, s) + 1e-8


def test_repair_output_is_balanced_observable(rng):
    x = random_observable(rng, 6, balanced=True)
    z = random_observable(rng, 6, balanced=True)
    zt = exact_anticommute_repair(x, z, random_state(rng, 6, 2))
    assert np.allclose(zt, zt.conj().T)
    assert np.allclose(zt @ zt, np.eye(6))
    assert abs(np.trace(zt)) < 1e-10


def test_repair_rejects_unbalanced():
    with pytest.raises(ContractError):
        exact_anticommute_repair(SX, np.eye(2), max_entangled(2))
    with pytest.raises(ContractError):
        exact_anticommute_repair(np.eye(3), np.eye(3), max_entangled(3))


# padding

def test_balance_pad():
    s = slofstra_strategy(3)
    ident = QuantumStrategy((np.eye(2),) * 3, s.bobObs, s.state)
    p = balance_pad(ident)
    assert np.allclose(p.aliceObs[0], np.diag([1, 1, -1, -1]))
    assert abs(np.trace(p.aliceObs[0])) == 0
    pad = balance_pad(s)
    assert bias_of(pad, chsh_n(3)).bias == pytest.approx(bias_of(s, chsh_n(3)).bias, abs=1e-12)
    assert entanglement_entropy(pad.state) == pytest.approx(entanglement_entropy(s.state), abs=1e-12)


# qubit pairs

def test_qubit_pairs_exact_n6():
    s = slofstra_strategy(6)
    q = build_qubit_pairs(s, 6)
    assert q.m == 2
    for key in ("aliceCommutator", "bobCommutator", "consistency", "stabilizer", "maxRepairShift"):
        assert q.residuals[key] <= 1e-8
    g = s.aliceObs
    assert np.allclose(q.aliceX[0], 1j * g[0] @ g[1], atol=1e-10)
    assert np.allclose(q.aliceZ[0], 1j * g[1] @ g[2], atol=1e-10)


def test_qubit_pairs_exact_n3():
    q = build_qubit_pairs(slofstra_strategy(3), 3)
    assert q.m == 1
    x, z = q.aliceX[0], q.aliceZ[0]
    assert np.abs(x @ z + z @ x).max() <= 1e-10


@pytest.mark.parametrize("t", [0.005, 0.02, 0.05])
def test_qubit_pairs_noisy(t):
    q = build_qubit_pairs(detuned_slofstra(6, t), 6)
    delta = q.residuals["inputDelta"]
    assert q.residuals["aliceAnticommMax"] <= 1e-10
    assert q.residuals["bobAnticommMax"] <= 1e-10
    for key in ("aliceCommutator", "bobCommutator", "consistency"):
        assert q.residuals[key] <= C_PAIRS * delta


def test_qubit_pairs_need_n3():
    with pytest.raises(ContractError):
        build_qubit_pairs(slofstra_strategy(2), 2)


def test_qubit_pairs_need_balance():
    s = slofstra_strategy(3)
    ident = QuantumStrategy((np.eye(2),) * 3, s.bobObs, s.state)
    with pytest.raises(ContractError):
        build_qubit_pairs(ident, 3)


# subset selection

def test_subset_all_zero():
    assert select_good_subset(np.zeros((5, 5)), 3) == ((0, 1, 2), 0.0)


def test_subset_excludes_bad_index():
    m = 6
    res = np.zeros((m, m))
    res[2, :] = res[:, 2] = 1.0
    for method in ("exact", "greedy"):
        subset, worst = select_good_subset(res, m - 1, method=method)
        assert 2 not in subset and worst == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_greedy_within_twice_exact(seed):
    rng = np.random.default_rng(seed)
    a = rng.random((8, 8))
    res = (a + a.T) / 2
    _, exact = select_good_subset(res, 4, method="exact")
    _, greedy = select_good_subset(res, 4, method="greedy")
    assert exact <= greedy <= 2 * exact


def test_subset_errors():
    with pytest.raises(ContractError):
        select_good_subset(np.zeros((3, 3)), 4)


# entropy

def test_entropy_values():
    assert entanglement_entropy(max_entangled(2)) == pytest.approx(1.0)
    three = product_state(*[max_entangled(2)] * 3)
    assert entanglement_entropy(three) == pytest.approx(3.0)
    th = np.pi / 6
    s = BipartiteState.from_matrix(np.diag([np.cos(th), np.sin(th)]))
    assert entanglement_entropy(s) == pytest.approx(binary_entropy(0.75), abs=1e-12)
    assert binary_entropy(0.75) == pytest.approx(0.811278, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**31))
def test_entropy_bounds_and_symmetry(da, db, seed):
    s = random_state(np.random.default_rng(seed), da, db)
    e = entanglement_entropy(s)
    assert -1e-12 <= e <= np.log2(min(da, db)) + 1e-9
    swapped = BipartiteState.from_matrix(s.matrix.T)
    assert entanglement_entropy(swapped) == pytest.approx(e, abs=1e-9)


def test_fannes_values():
    assert fannes_lower_bound(4, 0.01) == pytest.approx(4 - 0.16 + 0.02 * np.log2(0.01))
    assert fannes_lower_bound(4, 0.01) == pytest.approx(3.70712, abs=1e-5)
    assert fannes_lower_bound(5, 1e-12) == pytest.approx(5, abs=1e-9)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ContractError):
            fannes_lower_bound(3, bad)


# certificates

@pytest.mark.parametrize("n,bits", [(6, 3), (8, 4)])
def test_certify_exact(n, bits):
    c = certify_entropy(slofstra_strategy(n), n)
    assert c.entropyBits == pytest.approx(bits, abs=1e-9)
    assert c.eta <= 1e-8
    assert c.m == n // 3


def test_certify_detuned_entropy_decreases():
    ts = np.linspace(0, 0.2, 6)
    ent = [certify_entropy(detuned_slofstra(6, t), 6).entropyBits for t in ts]
    eps = [certify_entropy(detuned_slofstra(6, t), 6).epsilon for t in ts]
    assert np.all(np.diff(ent) < 0)
    assert np.all(np.diff(eps) > 0)


def test_certify_pads_unbalanced():
    s = slofstra_strategy(3)
    c = certify_entropy(QuantumStrategy((np.eye(2),) * 3, s.bobObs, s.state), 3)
    assert c.entropyBits == pytest.approx(1.0)
    assert c.epsilon > 0.2
