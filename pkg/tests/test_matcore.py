import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xorrigid.errors import CapacityError, ContractError
from xorrigid.matcore import (
    MAX_DIM,
    BipartiteState,
    herm_eig,
    kron,
    max_entangled,
    op_abs_signum,
    partial_trace,
    pinv,
    product_state,
    svd,
)

from conftest import random_observable, random_state


def test_kron_matches_numpy(rng):
    a = rng.standard_normal((2, 3))
    b = rng.standard_normal((4, 2)) + 1j
    assert np.allclose(kron(a, b), np.kron(a, b))


def test_kron_capacity():
    with pytest.raises(CapacityError):
        kron(np.eye(128), np.eye(64))
    assert kron(np.eye(64), np.eye(64)).shape == (MAX_DIM, MAX_DIM)


def test_herm_eig_descending_and_reconstructs(rng):
    h = random_observable(rng, 6) + 0.3 * random_observable(rng, 6)
    w, v = herm_eig(h)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-12)


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ContractError):
        herm_eig(np.array([[0, 1], [0, 0]]))


def test_svd_factorization(rng):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u, s, v = svd(m)
    assert np.allclose(u @ np.diag(s) @ v.conj().T, m, atol=1e-12)
    assert np.all(s >= 0)


def test_abs_signum_of_observable_is_itself(rng):
    a = random_observable(rng, 4)
    ab, sg = op_abs_signum(a)
    assert np.allclose(ab, np.eye(4), atol=1e-12)
    assert np.allclose(sg, a, atol=1e-12)


def test_signum_zero_on_kernel():
    m = np.diag([2.0, -3.0, 0.0])
    ab, sg = op_abs_signum(m)
    assert np.allclose(ab, np.diag([2, 3, 0]))
    assert np.allclose(sg, np.diag([1, -1, 0]))


def test_pinv_matches_numpy(rng):
    m = rng.standard_normal((3, 3))
    m[:, 2] = m[:, 0]
    assert np.allclose(pinv(m), np.linalg.pinv(m), atol=1e-10)


def test_state_norm_checked():
    with pytest.raises(ContractError):
        BipartiteState(2, 2, np.array([1, 1, 0, 0], dtype=complex))


def test_max_entangled_reduced_state():
    rho = partial_trace(max_entangled(4), "A")
    assert np.allclose(rho, np.eye(4) / 4)


def test_product_state_reduced_blocks():
    # (phi+) x (|0>|0>)
    zero = BipartiteState(1, 1, np.array([1.0 + 0j]))
    s = product_state(max_entangled(2), BipartiteState(2, 2, np.array([1, 0, 0, 0], dtype=complex)), zero)
    assert (s.dimA, s.dimB) == (4, 4)
    rho = partial_trace(s, "A")
    assert np.allclose(rho, np.kron(np.eye(2) / 2, np.diag([1, 0])))


def test_transpose_trick(rng):
    # (A x Id)|phi_D> = (Id x A^T)|phi_D>
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    s = max_entangled(3)
    assert np.allclose(s.apply(a=a), s.apply(b=a.T))


def test_expect_agrees_with_dense(rng):
    s = random_state(rng, 2, 3)
    a, b = random_observable(rng, 2), random_observable(rng, 3)
    psi = s.amplitudes
    dense = psi.conj() @ np.kron(a, b) @ psi
    assert np.isclose(s.expect(a, b), dense)


def test_partial_trace_split_keeps_first_pair():
    # |phi+>_{A1B1} x |00>_{A2B2}
    s = product_state(max_entangled(2), BipartiteState(2, 2, np.array([1, 0, 0, 0], dtype=complex)))
    rho = partial_trace(s, "AB", split=((2, 2), (2, 2)))
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(rho, np.outer(phi, phi))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31))
def test_partial_traces_unit_trace_and_same_spectrum(da, db, seed):
    s = random_state(np.random.default_rng(seed), da, db)
    ra, rb = partial_trace(s, "A"), partial_trace(s, "B")
    assert np.isclose(np.trace(ra).real, 1.0)
    assert np.isclose(np.trace(rb).real, 1.0)
    wa = np.sort(np.linalg.eigvalsh(ra))[::-1]
    wb = np.sort(np.linalg.eigvalsh(rb))[::-1]
    k = min(da, db)
    assert np.allclose(wa[:k], wb[:k], atol=1e-10)
