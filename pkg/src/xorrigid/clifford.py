"""Clifford-algebra lifts of vector strategies to quantum strategies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .game import QuantumStrategy, chsh_pairs
from .matcore import BipartiteState, check_capacity, kron_all, max_entangled
from .sdpsolve import VectorStrategy

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class CliffordBasis:
    r: int
    dim: int
    generators: tuple


def clifford_dim(r: int) -> int:
    return 2 ** (r // 2)


def clifford_generators(r: int) -> CliffordBasis:
    """``r`` pairwise anti-commuting Hermitian unitaries of dimension ``2**(r//2)``.

    Jordan-Wigner on ``q = r // 2`` qubits: ``Z..Z X I..I`` and ``Z..Z Y I..I``;
    for odd ``r`` the last generator is the parity ``Z^{(x) q}``.
    """
    if r < 1:
        raise ContractError(f"need at least one generator, got r={r}")
    q = r // 2
    check_capacity(2**q, 2**q)
    if q == 0:
        return CliffordBasis(1, 1, (np.ones((1, 1), dtype=complex),))
    gens = []
    for k in range(q):
        left = [SZ] * k
        right = [I2] * (q - k - 1)
        gens.append(kron_all(*left, SX, *right))
        gens.append(kron_all(*left, SY, *right))
    if r % 2:
        gens.append(kron_all(*([SZ] * q)))
    return CliffordBasis(r, 2**q, tuple(gens))


def combine(coeffs, basis: CliffordBasis) -> np.ndarray:
    """``sum_k coeffs[k] * gamma_k``."""
    return np.tensordot(np.asarray(coeffs, dtype=float), np.array(basis.generators), axes=1)


def tsirelson_lift(vstrat: VectorStrategy) -> QuantumStrategy:
    """Observables on a maximally entangled state with correlators ``x_i . y_j``.

    ``A_i = sum_k x_ik gamma_k`` and ``B_j = (sum_k y_jk gamma_k)^T``; since
    ``<psi|A (x) B|psi> = Tr(A B^T)/D`` and ``Tr(gamma_k gamma_l) = D delta_kl``
    the correlator is exactly the inner product.
    """
    basis = clifford_generators(vstrat.r)
    alice = tuple(combine(x, basis) for x in vstrat.xs)
    bob = tuple(combine(y, basis).T for y in vstrat.ys)
    return QuantumStrategy(alice, bob, max_entangled(basis.dim))


def slofstra_strategy(n: int) -> QuantumStrategy:
    """Optimal CHSH(n) strategy in local dimension ``2**(n//2)``.

    Bob's observable for question ``(i, j)`` is
    ``(s A_i^T + A_j^T)/sqrt(2)`` with ``s = -1`` when ``j < i``.
    """
    if n < 2:
        raise ContractError(f"CHSH(n) needs n >= 2, got {n}")
    basis = clifford_generators(n)
    alice = basis.generators
    bob = tuple(
        ((-1.0 if j < i else 1.0) * alice[i].T + alice[j].T) / np.sqrt(2)
        for i, j in chsh_pairs(n)
    )
    return QuantumStrategy(alice, bob, max_entangled(basis.dim))


def schmidt_state(q: int, theta: float) -> BipartiteState:
    """``(cos t|00> + sin t|11>)^{(x) q}`` grouped as ``(A_1..A_q)|(B_1..B_q)``."""
    c = np.array([1.0 + 0j])
    for _ in range(q):
        c = np.kron(c, [np.cos(theta), np.sin(theta)])
    return BipartiteState.from_matrix(np.diag(c))


def detuned_slofstra(n: int, t: float, tilt: bool = True) -> QuantumStrategy:
    """Slofstra's strategy with every EPR pair at Schmidt angle ``pi/4 - t``.

    With ``tilt`` each Alice observable is also rotated by angle ``t`` toward
    the next generator, ``A_i = cos t gamma_i + sin t gamma_{i+1 mod n}``;
    Schmidt detuning alone keeps Alice's observables exactly anti-commuting.
    """
    exact = slofstra_strategy(n)
    q = n // 2
    state = schmidt_state(q, np.pi / 4 - t)
    if not tilt:
        return QuantumStrategy(exact.aliceObs, exact.bobObs, state)
    gens = exact.aliceObs
    alice = tuple(np.cos(t) * gens[i] + np.sin(t) * gens[(i + 1) % n] for i in range(n))
    return QuantumStrategy(alice, exact.bobObs, state)
