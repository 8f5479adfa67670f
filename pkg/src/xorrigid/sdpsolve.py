"""Vector relaxation of the XOR game bias.

The feasible set is a product of unit spheres and the objective is bilinear,
so block-coordinate ascent has a closed-form step: each player's vectors are
replaced by the normalized gradient ``G @ Y`` (resp. ``G.T @ X``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .game import XorGame

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class VectorStrategy:
    """Unit vectors ``xs`` (``nA x r``) and ``ys`` (``nB x r``)."""

    xs: np.ndarray
    ys: np.ndarray
    objective: float
    converged: bool = True
    sweeps: int = 0

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        ys = np.array(self.ys, dtype=float)
        if xs.ndim != 2 or ys.ndim != 2 or xs.shape[1] != ys.shape[1]:
            raise ContractError(f"incompatible vector arrays {xs.shape} and {ys.shape}")
        for name, v in (("xs", xs), ("ys", ys)):
            norms = np.linalg.norm(v, axis=1)
            if np.max(np.abs(norms - 1.0)) > 1e-10:
                raise ContractError(f"{name} are not unit vectors within 1e-10")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "objective", float(self.objective))

    @property
    def r(self) -> int:
        return self.xs.shape[1]

    @classmethod
    def from_vectors(cls, xs, ys, game: XorGame, **kw) -> "VectorStrategy":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return cls(xs, ys, sdp_objective(game, xs, ys), **kw)


def sdp_objective(game: XorGame, xs: np.ndarray, ys: np.ndarray) -> float:
    return float(np.sum(game.matrix * (xs @ ys.T)))


def tsirelson_rank(nA: int, nB: int) -> int:
    """Largest ``r`` with ``r(r+1)/2 <= nA + nB`` and ``r <= min(nA, nB)``."""
    r = 1
    while (r + 1) * (r + 2) // 2 <= nA + nB:
        r += 1
    return min(r, nA, nB)


def default_rank(game: XorGame) -> int:
    return tsirelson_rank(game.nA, game.nB) + 1


def _normalize_rows(target: np.ndarray, previous: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(target, axis=1)
    out = previous.copy()
    ok = norms > 1e-300
    out[ok] = target[ok] / norms[ok, None]
    return out


def _ascend(g, xs, ys, max_sweeps, tol):
    value = float(np.sum(g * (xs @ ys.T)))
    for sweep in range(1, max_sweeps + 1):
        xs = _normalize_rows(g @ ys, xs)
        ys = _normalize_rows(g.T @ xs, ys)
        new = float(np.sum(g * (xs @ ys.T)))
        if new - value < tol:
            return xs, ys, new, True, sweep
        value = new
    return xs, ys, value, False, max_sweeps


def _sphere(rng, n, r):
    v = rng.standard_normal((n, r))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def solve_bias(
    game: XorGame,
    rank: int | None = None,
    max_sweeps: int = 100_000,
    tol: float = 1e-10,
    seed: int = 0,
    restarts: int = 8,
) -> VectorStrategy:
    """Maximize ``sum G_ij x_i . y_j`` over unit vectors of dimension ``rank``.

    Runs ``restarts`` independent ascents from seeded random starts and keeps
    the best. The result is flagged ``converged=False`` when the best run hit
    ``max_sweeps``.
    """
    if rank is None:
        rank = default_rank(game)
    if rank < 1:
        raise ContractError(f"rank must be >= 1, got {rank}")
    if restarts < 1 or max_sweeps < 1:
        raise ContractError("restarts and max_sweeps must be >= 1")
    g = game.matrix
    best = None
    for k in range(restarts):
        rng = np.random.default_rng([seed, k])
        xs0 = _sphere(rng, game.nA, rank)
        ys0 = _sphere(rng, game.nB, rank)
        run = _ascend(g, xs0, ys0, max_sweeps, tol)
        if best is None or run[2] > best[2] + 1e-15:
            best = run
    xs, ys, _, converged, sweeps = best
    if not converged:
        log.warning("coordinate ascent hit max_sweeps=%d without converging", max_sweeps)
    return VectorStrategy(xs, ys, sdp_objective(game, xs, ys), converged, sweeps)


def certify_upper(game: XorGame, strategy: VectorStrategy | None = None) -> float:
    """Eigenvalue upper bound on the relaxation value.

    ``sum G x.y <= (n'+m')/2 * sigma_max(G)`` where ``n'``, ``m'`` count only
    rows and columns of ``G`` that are not identically zero.
    """
    g = game.matrix
    rows = int(np.count_nonzero(np.any(g != 0, axis=1)))
    cols = int(np.count_nonzero(np.any(g != 0, axis=0)))
    top = float(np.linalg.svd(g, compute_uv=False)[0])
    return 0.5 * (rows + cols) * top
