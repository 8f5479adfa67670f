"""XOR games, quantum strategies, and bias evaluation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np

from .errors import ContractError
from .matcore import BipartiteState, as_matrix, check_capacity, herm_eig, kernel_tol

OBS_TOL = 1e-9


@dataclass(frozen=True)
class XorGame:
    """Signed game matrix ``G`` with ``sum |G_ij| = 1``.

    Rows index Alice's questions, columns Bob's. ``labels`` optionally maps
    ``"alice"``/``"bob"`` to lists of question names.
    """

    matrix: np.ndarray
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.array(self.matrix, dtype=float)
        if g.ndim != 2 or g.size == 0:
            raise ContractError(f"game matrix must be a non-empty 2-D array, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ContractError("game matrix has non-finite entries")
        total = np.abs(g).sum()
        if abs(total - 1.0) > 1e-12:
            raise ContractError(f"sum of |G_ij| is {total:.17g}, expected 1")
        g.setflags(write=False)
        object.__setattr__(self, "matrix", g)

    @property
    def nA(self) -> int:
        return self.matrix.shape[0]

    @property
    def nB(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def normalized(cls, raw, labels=None) -> "XorGame":
        raw = np.asarray(raw, dtype=float)
        total = np.abs(raw).sum()
        if total == 0:
            raise ContractError("cannot normalize an all-zero matrix")
        return cls(raw / total, labels or {})


@dataclass(frozen=True)
class BiasValue:
    bias: float
    successProbability: float


def is_observable(m: np.ndarray, tol: float = OBS_TOL) -> bool:
    n = m.shape[0]
    if m.shape != (n, n):
        return False
    return (
        np.max(np.abs(m - m.conj().T)) <= tol
        and np.max(np.abs(m @ m - np.eye(n))) <= tol
    )


@dataclass(frozen=True)
class QuantumStrategy:
    """Alice/Bob ``+-1`` observables and a shared bipartite pure state."""

    aliceObs: tuple
    bobObs: tuple
    state: BipartiteState

    def __post_init__(self):
        alice = tuple(as_matrix(a, "Alice observable") for a in self.aliceObs)
        bob = tuple(as_matrix(b, "Bob observable") for b in self.bobObs)
        if not alice or not bob:
            raise ContractError("each player needs at least one observable")
        for name, ops, dim in (("Alice", alice, self.state.dimA), ("Bob", bob, self.state.dimB)):
            for k, op in enumerate(ops):
                if op.shape != (dim, dim):
                    raise ContractError(f"{name} observable {k} has shape {op.shape}, state needs {dim}")
                if not is_observable(op):
                    raise ContractError(f"{name} observable {k} is not Hermitian with square identity")
        object.__setattr__(self, "aliceObs", alice)
        object.__setattr__(self, "bobObs", bob)

    @property
    def dimA(self) -> int:
        return self.state.dimA

    @property
    def dimB(self) -> int:
        return self.state.dimB


def chsh_pairs(n: int) -> list[tuple[int, int]]:
    """Bob's question labels for CHSH(n): ordered pairs ``(i, j)``, ``i != j``,
    zero-based, in lexicographic order."""
    return list(permutations(range(n), 2))


def chsh_n(n: int) -> XorGame:
    if n < 2:
        raise ContractError(f"CHSH(n) needs n >= 2, got {n}")
    pairs = chsh_pairs(n)
    check_capacity(n, len(pairs))
    c = 1.0 / (2 * n * (n - 1))
    g = np.zeros((n, len(pairs)))
    for col, (i, j) in enumerate(pairs):
        g[i, col] = -c if i > j else c
        g[j, col] = c
    labels = {
        "alice": [str(k + 1) for k in range(n)],
        "bob": [f"{i + 1},{j + 1}" for i, j in pairs],
    }
    return XorGame(g, labels)


def correlation_matrix(strategy: QuantumStrategy) -> np.ndarray:
    """Matrix of correlators ``<psi| A_i (x) B_j |psi>`` (real parts)."""
    m = strategy.state.matrix
    left = [a @ m for a in strategy.aliceObs]
    right = [m @ b.T for b in strategy.bobObs]
    out = np.empty((len(left), len(right)))
    for i, l in enumerate(left):
        for j, r in enumerate(right):
            out[i, j] = np.vdot(l, r).real
    return out


def _check_shapes(strategy: QuantumStrategy, game: XorGame) -> None:
    if len(strategy.aliceObs) != game.nA or len(strategy.bobObs) != game.nB:
        raise ContractError(
            f"strategy has {len(strategy.aliceObs)}x{len(strategy.bobObs)} observables, "
            f"game is {game.nA}x{game.nB}"
        )


def bias_of(strategy: QuantumStrategy, game: XorGame) -> BiasValue:
    _check_shapes(strategy, game)
    bias = float(np.sum(game.matrix * correlation_matrix(strategy)))
    return BiasValue(bias, (1.0 + bias) / 2.0)


def sign_projectors(obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the ``+1`` and ``-1`` eigenspaces of an observable."""
    w, v = herm_eig(obs)
    tau = max(kernel_tol(obs), 1e-12)
    plus = v[:, w > tau]
    minus = v[:, w < -tau]
    return plus @ plus.conj().T, minus @ minus.conj().T


def outcome_table(strategy: QuantumStrategy, game: XorGame) -> tuple[np.ndarray, np.ndarray]:
    """Question pairs with nonzero weight and their Born-rule outcome
    distributions over ``(a, b) in {(+,+), (+,-), (-,+), (-,-)}``."""
    _check_shapes(strategy, game)
    m = strategy.state.matrix
    pa = [sign_projectors(a) for a in strategy.aliceObs]
    pb = [sign_projectors(b) for b in strategy.bobObs]
    cells = np.argwhere(game.matrix != 0)
    probs = np.empty((len(cells), 4))
    for row, (i, j) in enumerate(cells):
        k = 0
        for p in pa[i]:
            pm = p @ m
            for q in pb[j]:
                probs[row, k] = max(np.vdot(m, pm @ q.T).real, 0.0)
                k += 1
        probs[row] /= probs[row].sum()
    return cells, probs


def simulate_rounds(
    strategy: QuantumStrategy,
    game: XorGame,
    rounds: int,
    seed: int,
    partitions: int = 1,
    workers: int = 1,
) -> tuple[float, float]:
    """Play ``rounds`` referee rounds and return ``(empirical success, stderr)``.

    Partition ``p`` draws from ``default_rng([seed, p])``; the result depends on
    ``(seed, partitions)`` only, never on ``workers``.
    """
    if rounds < 1:
        raise ContractError("rounds must be >= 1")
    if partitions < 1:
        raise ContractError("partitions must be >= 1")
    cells, probs = outcome_table(strategy, game)
    weights = np.abs(game.matrix[cells[:, 0], cells[:, 1]])
    weights = weights / weights.sum()
    want_equal = game.matrix[cells[:, 0], cells[:, 1]] > 0
    # outcome product is +1 for (+,+) and (-,-)
    equal_outcome = np.array([True, False, False, True])
    sizes = [rounds // partitions + (p < rounds % partitions) for p in range(partitions)]

    def play(p: int) -> int:
        rng = np.random.default_rng([seed, p])
        q = rng.choice(len(cells), size=sizes[p], p=weights)
        u = rng.random(sizes[p])
        cdf = np.cumsum(probs[q], axis=1)
        outcome = np.minimum((u[:, None] >= cdf).sum(axis=1), 3)
        return int(np.sum(equal_outcome[outcome] == want_equal[q]))

    if workers > 1 and partitions > 1:
        with ThreadPoolExecutor(workers) as pool:
            wins = sum(pool.map(play, range(partitions)))
    else:
        wins = sum(play(p) for p in range(partitions))
    phat = wins / rounds
    return phat, float(np.sqrt(max(phat * (1 - phat), 0.0) / rounds))


def classical_strategy(alice_signs: Sequence[int], bob_signs: Sequence[int]) -> QuantumStrategy:
    """Deterministic strategy as a one-dimensional quantum strategy."""
    return QuantumStrategy(
        tuple(np.array([[float(s)]]) for s in alice_signs),
        tuple(np.array([[float(s)]]) for s in bob_signs),
        BipartiteState(1, 1, np.ones(1)),
    )
