"""Rigidity diagnostics for CHSH(n) strategies.

Everything here is a state-dependent quantity of the form ``||O|psi>||`` for
some operator ``O`` built from the strategy, evaluated on the coefficient
matrix ``M`` of ``|psi>`` (``(X (x) Y)|psi> <-> X M Y^T``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ContractError
from .game import QuantumStrategy, bias_of, chsh_n, chsh_pairs, is_observable
from .matcore import (
    BipartiteState,
    check_capacity,
    herm_eig,
    kernel_tol,
    op_abs_signum,
    partial_trace,
    svd,
)

OPT_BIAS = np.sqrt(2) / 2
EXACT_SEARCH_MAX = 12


@dataclass
class RigidityReport:
    """Per-pair figures for the ``n choose 2`` embedded CHSH games.

    Pair arrays are ``n x n`` with entries at ``[i, j]``, ``i < j`` (zero-based);
    ``crossConsistency[i, j]`` is ``||(A_i (x) Id - Id (x) tildeA_ij)|psi>||``
    for every ordered ``i != j``.
    """

    n: int
    epsilon: float
    pairBiases: np.ndarray
    aliceAnticomm: np.ndarray
    bobAnticomm: np.ndarray
    crossConsistency: np.ndarray
    averages: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "pairBiases": self.pairBiases.tolist(),
            "aliceAnticomm": self.aliceAnticomm.tolist(),
            "bobAnticomm": self.bobAnticomm.tolist(),
            "crossConsistency": self.crossConsistency.tolist(),
            "averages": dict(self.averages),
        }


@dataclass
class QubitPairs:
    m: int
    aliceX: list
    aliceZ: list
    bobX: list
    bobZ: list
    residuals: dict
    pairResiduals: np.ndarray

    def to_dict(self) -> dict:
        return {"m": self.m, "residuals": dict(self.residuals), "pairResiduals": self.pairResiduals.tolist()}


@dataclass
class EntropyCertificate:
    entropyBits: float
    r: int
    delta: float
    fannesLowerBound: float
    eta: float = 0.0
    subset: tuple = ()
    epsilon: float = 0.0
    m: int = 0

    def to_dict(self) -> dict:
        return {
            "entropyBits": self.entropyBits,
            "r": self.r,
            "delta": self.delta,
            "fannesLowerBound": self.fannesLowerBound,
            "eta": self.eta,
            "subset": [int(k) for k in self.subset],
            "epsilon": self.epsilon,
            "m": self.m,
        }


def _anticomm(a, b):
    return a @ b + b @ a


def _comm(a, b):
    return a @ b - b @ a


def _norm(coeffs) -> float:
    return float(np.linalg.norm(coeffs))


def _swap(state: BipartiteState) -> BipartiteState:
    return BipartiteState.from_matrix(state.matrix.T)


def complete_signum(m) -> np.ndarray:
    """``M / |M|`` extended by the identity on the kernel of ``M``."""
    m = np.asarray(m, dtype=complex)
    _, sgn = op_abs_signum(m)
    w, v = herm_eig(m)
    ker = v[:, np.abs(w) <= kernel_tol(m)]
    return sgn + ker @ ker.conj().T


def tilde_observables(bij, bji) -> tuple[np.ndarray, np.ndarray]:
    """Bob-side images of Alice's pair: signums of ``B_ij + B_ji`` and ``B_ij - B_ji``."""
    bij = np.asarray(bij, dtype=complex)
    bji = np.asarray(bji, dtype=complex)
    for name, b in (("bij", bij), ("bji", bji)):
        if not is_observable(b):
            raise ContractError(f"{name} is not an observable")
    return complete_signum(bij + bji), complete_signum(bij - bji)


def _require_chsh_shape(strategy: QuantumStrategy, n: int) -> None:
    if n < 2 or len(strategy.aliceObs) != n or len(strategy.bobObs) != n * (n - 1):
        raise ContractError(
            f"strategy with {len(strategy.aliceObs)}x{len(strategy.bobObs)} observables "
            f"is not shaped for CHSH({n})"
        )


def tilde_table(strategy: QuantumStrategy, n: int) -> dict:
    """``{(i, j): tildeA_ij}`` for all ordered pairs ``i != j``."""
    _require_chsh_shape(strategy, n)
    col = {p: k for k, p in enumerate(chsh_pairs(n))}
    out = {}
    for i, j in combinations(range(n), 2):
        out[i, j], out[j, i] = tilde_observables(strategy.bobObs[col[i, j]], strategy.bobObs[col[j, i]])
    return out


def embedded_chsh_report(strategy: QuantumStrategy, n: int) -> RigidityReport:
    """Split a CHSH(n) strategy into its embedded CHSH games and measure residuals."""
    _require_chsh_shape(strategy, n)
    st = strategy.state
    m = st.matrix
    A = strategy.aliceObs
    B = strategy.bobObs
    col = {p: k for k, p in enumerate(chsh_pairs(n))}
    tilde = tilde_table(strategy, n)

    def corr(a, b):
        return np.vdot(m, a @ m @ b.T).real

    eps = np.zeros((n, n))
    alice_ac = np.zeros((n, n))
    bob_ac = np.zeros((n, n))
    cross = np.zeros((n, n))
    for i, j in combinations(range(n), 2):
        bij, bji = B[col[i, j]], B[col[j, i]]
        # conditional game: A_i.(B_ij + B_ji) + A_j.(B_ij - B_ji), each weight 1/4
        bias = 0.25 * (corr(A[i], bij) + corr(A[i], bji) + corr(A[j], bij) - corr(A[j], bji))
        eps[i, j] = 1.0 - bias / OPT_BIAS
        alice_ac[i, j] = _norm(_anticomm(A[i], A[j]) @ m)
        bob_ac[i, j] = _norm(m @ _anticomm(tilde[i, j], tilde[j, i]).T)
        cross[i, j] = _norm(A[i] @ m - m @ tilde[i, j].T)
        cross[j, i] = _norm(A[j] @ m - m @ tilde[j, i].T)

    iu = np.triu_indices(n, 1)
    offdiag = ~np.eye(n, dtype=bool)
    epsilon = 1.0 - bias_of(strategy, chsh_n(n)).bias / OPT_BIAS
    averages = {
        "pairEpsilon": float(eps[iu].mean()),
        "aliceAnticomm": float(alice_ac[iu].mean()),
        "bobAnticomm": float(bob_ac[iu].mean()),
        "crossConsistency": float(cross[offdiag].mean()),
    }
    return RigidityReport(n, float(epsilon), eps, alice_ac, bob_ac, cross, averages)


def _is_balanced(op: np.ndarray, tol: float = 1e-8) -> bool:
    return op.shape[0] % 2 == 0 and abs(np.trace(op)) <= tol


def exact_anticommute_repair(x, z, state: BipartiteState) -> np.ndarray:
    """Balanced observable anti-commuting exactly with ``x`` and close to ``z``.

    In an eigenbasis of ``x`` where ``x = diag(Id, -Id)`` and the off-diagonal
    block of ``z`` is diagonal and non-negative (via its SVD), the result is
    the block swap ``[[0, Id], [Id, 0]]``. On ``|psi>``,
    ``||(z - result)|psi>|| <= sqrt(3/2) ||{x, z}|psi>||``.
    """
    x = np.asarray(x, dtype=complex)
    z = np.asarray(z, dtype=complex)
    dim = x.shape[0]
    if x.shape != (dim, dim) or z.shape != (dim, dim):
        raise ContractError("x and z must be square of equal size")
    if dim % 2:
        raise ContractError(f"odd dimension {dim}; pad the strategy first")
    if state.dimA != dim:
        raise ContractError(f"state A-dimension {state.dimA} does not match {dim}")
    for name, op in (("x", x), ("z", z)):
        if not is_observable(op):
            raise ContractError(f"{name} is not an observable")
        if not _is_balanced(op):
            raise ContractError(f"{name} is not balanced (trace {np.trace(op).real:.3g})")
    h = dim // 2
    _, v = herm_eig(x)
    vp, vm = v[:, :h], v[:, h:]
    c = vp.conj().T @ z @ vm
    u, _, w = svd(c)
    p = vp @ u
    q = vm @ w
    zt = p @ q.conj().T
    return zt + zt.conj().T


def balance_pad(strategy: QuantumStrategy) -> QuantumStrategy:
    """Double both local spaces: ``A -> A (+) (-A)``, state supported on the first summand."""
    da, db = strategy.dimA, strategy.dimB
    check_capacity(2 * da, 2 * db)

    def pad(op):
        n = op.shape[0]
        out = np.zeros((2 * n, 2 * n), dtype=complex)
        out[:n, :n] = op
        out[n:, n:] = -op
        return out

    m = np.zeros((2 * da, 2 * db), dtype=complex)
    m[:da, :db] = strategy.state.matrix
    return QuantumStrategy(
        tuple(pad(a) for a in strategy.aliceObs),
        tuple(pad(b) for b in strategy.bobObs),
        BipartiteState.from_matrix(m),
    )


def needs_padding(strategy: QuantumStrategy) -> bool:
    return not all(_is_balanced(op) for op in strategy.aliceObs + strategy.bobObs)


def bob_proxies(strategy: QuantumStrategy, n: int, report: RigidityReport | None = None) -> list:
    """For each ``i`` the ``tildeA_ij`` with smallest cross-consistency residual."""
    report = report or embedded_chsh_report(strategy, n)
    tilde = tilde_table(strategy, n)
    out = []
    for i in range(n):
        j = min((j for j in range(n) if j != i), key=lambda j: (report.crossConsistency[i, j], j))
        out.append(tilde[i, j])
    return out


def _qubit_side(ops, state, k, reverse):
    """Two-stage construction of one anti-commuting pair from ``ops[3k..3k+2]``.

    ``reverse`` flips operator products, which is what keeps Bob's pair
    consistent with Alice's: ``(P (x) Id)|psi> = (Id (x) P^T)|psi>`` on a
    maximally entangled state and transposition reverses products.
    """
    a, b, c = ops[3 * k], ops[3 * k + 1], ops[3 * k + 2]
    a_fix = exact_anticommute_repair(b, a, state)
    c_fix = exact_anticommute_repair(b, c, state)
    if reverse:
        x = 1j * b @ a_fix
        z_raw = 1j * c_fix @ b
    else:
        x = 1j * a_fix @ b
        z_raw = 1j * b @ c_fix
    x = 0.5 * (x + x.conj().T)
    z_raw = 0.5 * (z_raw + z_raw.conj().T)
    z = exact_anticommute_repair(x, z_raw, state)
    m = state.matrix
    shifts = (_norm((a_fix - a) @ m), _norm((c_fix - c) @ m), _norm((z - z_raw) @ m))
    return x, z, shifts


def build_qubit_pairs(strategy: QuantumStrategy, n: int) -> QubitPairs:
    """``floor(n/3)`` exactly anti-commuting pairs per side from a CHSH(n) strategy.

    Alice: ``X_k = i A~_{3k-2} A_{3k-1}``, ``Z_k = i A_{3k-1} A~_{3k}`` (one-based),
    each ``A~`` repaired to anti-commute with ``A_{3k-1}``, then ``Z_k`` repaired
    against ``X_k``. Bob runs the same construction on the proxies of
    :func:`bob_proxies` with products reversed.
    """
    if n < 3:
        raise ContractError(f"qubit pairs need n >= 3, got {n}")
    _require_chsh_shape(strategy, n)
    if needs_padding(strategy):
        raise ContractError("observables are not balanced; apply balance_pad first")
    st = strategy.state
    st_b = _swap(st)
    report = embedded_chsh_report(strategy, n)
    proxies = bob_proxies(strategy, n, report)
    mcount = n // 3
    ax, az, bx, bz, shifts = [], [], [], [], []
    for k in range(mcount):
        x, z, s1 = _qubit_side(strategy.aliceObs, st, k, reverse=False)
        xb, zb, s2 = _qubit_side(proxies, st_b, k, reverse=True)
        ax.append(x)
        az.append(z)
        bx.append(xb)
        bz.append(zb)
        shifts.extend(s1 + s2)

    m = st.matrix
    alice = [(ax[k], az[k]) for k in range(mcount)]
    bob = [(bx[k], bz[k]) for k in range(mcount)]
    pair_res = np.zeros((mcount, mcount))
    a_comm, b_comm = [], []
    for k in range(mcount):
        for l in range(mcount):
            if k == l:
                continue
            worst = 0.0
            for p in range(2):
                for q in range(2):
                    ra = _norm(_comm(alice[k][p], alice[l][q]) @ m)
                    rb = _norm(m @ _comm(bob[k][p], bob[l][q]).T)
                    a_comm.append(ra)
                    b_comm.append(rb)
                    worst = max(worst, ra, rb)
            pair_res[k, l] = worst
    consistency, stabilizer = [], []
    for k in range(mcount):
        for p in range(2):
            pa, pb = alice[k][p], bob[k][p]
            consistency.append(_norm(pa @ m - m @ pb.T))
            stabilizer.append(_norm(pa @ m @ pb.T - m))

    # input residuals of the construction (averages over i and i != j)
    A = strategy.aliceObs
    proxy_gap = np.mean([_norm(A[i] @ m - m @ proxies[i].T) for i in range(n)])
    ac = np.mean([_norm(_anticomm(A[i], A[j]) @ m) for i in range(n) for j in range(n) if i != j])
    residuals = {
        "aliceCommutator": float(np.mean(a_comm)) if a_comm else 0.0,
        "bobCommutator": float(np.mean(b_comm)) if b_comm else 0.0,
        "consistency": float(np.mean(consistency)),
        "stabilizer": float(np.max(stabilizer)),
        "maxRepairShift": float(np.max(shifts)),
        "aliceAnticommMax": float(max(_norm(_anticomm(x, z)) for x, z in alice)),
        "bobAnticommMax": float(max(_norm(_anticomm(x, z)) for x, z in bob)),
        "inputDelta": float(max(proxy_gap, ac)),
    }
    return QubitPairs(mcount, ax, az, bx, bz, residuals, pair_res)


def select_good_subset(pair_residuals, r: int, threshold: float | None = None, method: str = "auto"):
    """Index set of size ``r`` with small pairwise residuals.

    Returns ``(subset, max pairwise residual on subset)``. ``method="exact"``
    enumerates all subsets (lexicographically first optimum); ``"greedy"``
    repeatedly drops the vertex of largest degree in the graph of residuals
    above ``threshold``, falling back to the largest row maximum once that
    graph is empty. ``"auto"`` is exact for ``m <= 12``.
    """
    res = np.asarray(pair_residuals, dtype=float)
    mcount = res.shape[0]
    if res.shape != (mcount, mcount):
        raise ContractError("pair residuals must be a square matrix")
    if r < 1 or r > mcount:
        raise ContractError(f"subset size r={r} must lie in [1, {mcount}]")
    sym = np.maximum(res, res.T)
    np.fill_diagonal(sym, 0.0)

    def worst(idx):
        idx = list(idx)
        return float(sym[np.ix_(idx, idx)].max()) if len(idx) > 1 else 0.0

    if method == "auto":
        method = "exact" if mcount <= EXACT_SEARCH_MAX else "greedy"
    if method == "exact":
        best, best_val = None, np.inf
        for idx in combinations(range(mcount), r):
            v = worst(idx)
            if v < best_val:
                best, best_val = idx, v
        return tuple(best), best_val
    if method != "greedy":
        raise ContractError(f"unknown method {method!r}")
    if threshold is None:
        threshold = float(np.median(sym[~np.eye(mcount, dtype=bool)])) if mcount > 1 else 0.0
    keep = list(range(mcount))
    while len(keep) > r:
        sub = sym[np.ix_(keep, keep)]
        degree = (sub > threshold).sum(axis=1)
        rowmax = sub.max(axis=1)
        key = [(degree[t], rowmax[t], keep[t]) for t in range(len(keep))]
        if max(degree) == 0:
            key = [(rowmax[t], keep[t]) for t in range(len(keep))]
        drop = max(range(len(keep)), key=lambda t: key[t])
        keep.pop(drop)
    return tuple(keep), worst(keep)


def entanglement_entropy(state: BipartiteState) -> float:
    """Von Neumann entropy of ``rho_A`` in bits."""
    w, _ = herm_eig(partial_trace(state, "A"))
    w = w[w > 1e-300]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def fannes_lower_bound(r: int, delta: float) -> float:
    """``r - 4 delta r + 2 delta log2(delta)``."""
    if not 0.0 < delta < 1.0:
        raise ContractError(f"delta must lie in (0, 1), got {delta}")
    return r - 4.0 * delta * r + 2.0 * delta * np.log2(delta)


def certify_entropy(
    strategy: QuantumStrategy,
    n: int,
    r: int | None = None,
    delta: float = 0.01,
    threshold: float | None = None,
) -> EntropyCertificate:
    """Run report, qubit pairs, and subset selection; attach the measured entropy.

    ``eta`` is the largest pairwise commutator residual on the chosen subset,
    or the largest stabilizer residual ``||P_k (x) P'_k|psi> - |psi>||`` on it,
    whichever is bigger. The Fannes figure is evaluated at the given
    ``(r, delta)`` as a reference, not derived from ``eta``.
    """
    _require_chsh_shape(strategy, n)
    report = embedded_chsh_report(strategy, n)
    work = balance_pad(strategy) if needs_padding(strategy) else strategy
    pairs = build_qubit_pairs(work, n)
    r = pairs.m if r is None else r
    subset, worst = select_good_subset(pairs.pairResiduals, r, threshold)
    m = work.state.matrix
    stab = 0.0
    for k in subset:
        for pa, pb in ((pairs.aliceX[k], pairs.bobX[k]), (pairs.aliceZ[k], pairs.bobZ[k])):
            stab = max(stab, _norm(pa @ m @ pb.T - m))
    return EntropyCertificate(
        entanglement_entropy(strategy.state),
        r,
        delta,
        fannes_lower_bound(r, delta),
        max(worst, stab),
        subset,
        report.epsilon,
        pairs.m,
    )
