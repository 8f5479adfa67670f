"""Randomized dimension reduction of quantum strategies.

A strategy's vectors ``x_s = <psi|A_s (x) Id`` and ``y_t = <psi|Id (x) B_t``
are projected to ``C^d`` by a matrix of uniform quaternary signs, normalized,
and phase-twisted by ``||.||^{+-i alpha}`` with ``alpha`` hyperbolic-secant
distributed. In expectation the projected strategy keeps a ``1 - 1/d``
fraction of the bias. Realifying gives ``2d``-dimensional real vectors, which
Tsirelson's construction turns into observables of dimension ``2**d``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .clifford import tsirelson_lift
from .errors import ContractError
from .game import QuantumStrategy, XorGame
from .matcore import check_capacity
from .sdpsolve import VectorStrategy

log = logging.getLogger(__name__)

QUATERNARY = np.array([1, -1, 1j, -1j])
MIN_NORM = 1e-14
MAX_RESAMPLES = 16

# seed-stream roles
_PROJECTION = 0
_TWIST = 1


@dataclass(frozen=True)
class RoundingOutcome:
    reduced: VectorStrategy
    targetD: int
    alpha: float
    seed: int
    objective: float
    trial: int = 0
    resamples: int = 0
    imag: float = 0.0


def stream(seed: int, trial: int, role: int, index: int = 0) -> np.random.Generator:
    """Independent generator keyed by ``(seed, trial, role, index)``."""
    return np.random.default_rng([seed, trial, role, index])


def sample_sech(rng: np.random.Generator, size=None):
    """Hyperbolic-secant variates with density ``sech(pi a / 2) / 2``.

    Inverse-CDF sampling; the characteristic function is ``sech(t)``, hence
    ``E[a^{i alpha}] = 2a / (a^2 + 1)``.
    """
    u = rng.random(size)
    bad = (u <= 0.0) | (u >= 1.0)
    while np.any(bad):
        if np.ndim(u) == 0:
            u = rng.random()
        else:
            u[bad] = rng.random(int(np.count_nonzero(bad)))
        bad = (u <= 0.0) | (u >= 1.0)
    return (2.0 / np.pi) * np.log(np.tan(np.pi * u / 2.0))


def strategy_vectors(strategy: QuantumStrategy) -> tuple[np.ndarray, np.ndarray]:
    """Row vectors ``<psi|A_s (x) Id`` and ``<psi|Id (x) B_t`` (flattened).

    ``sum_st G_st x_s . conj(y_t)`` with the unconjugated dot product equals
    the strategy's bias.
    """
    st = strategy.state
    xs = np.array([st.apply(a=a).conj().reshape(-1) for a in strategy.aliceObs])
    ys = np.array([st.apply(b=b).conj().reshape(-1) for b in strategy.bobObs])
    return xs, ys


def realify(u: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real vectors with ``Re(u . w) = realify(u) . realify(w)`` (rows).

    ``u -> Re u (+) Im u`` and ``w -> Re w (+) (-Im w)``.
    """
    return (
        np.concatenate([u.real, u.imag], axis=-1),
        np.concatenate([w.real, -w.imag], axis=-1),
    )


def twist(v: np.ndarray, alpha: float, sign: int) -> np.ndarray:
    """Rows ``v / ||v|| * ||v||^{sign * i alpha}``."""
    norms = np.linalg.norm(v, axis=1)
    phase = alpha * np.log(norms)
    return v / norms[:, None] * (np.cos(phase) + 1j * sign * np.sin(phase))[:, None]


def _project(xs, ys, d, seed, trial, max_resamples):
    resamples = 0
    while True:
        rng = stream(seed, trial, _PROJECTION, resamples)
        g = QUATERNARY[rng.integers(0, 4, size=(d, xs.shape[1]))]
        xp = xs @ g.T / np.sqrt(d)
        yp = ys @ g.T / np.sqrt(d)
        small = min(np.linalg.norm(xp, axis=1).min(), np.linalg.norm(yp, axis=1).min())
        if small >= MIN_NORM:
            return xp, yp, resamples
        if resamples == max_resamples:
            # discrete signs can annihilate a vector with positive probability
            # for every draw (e.g. d=1); such rows become e_1
            log.info("projection still degenerate after %d resamples; using e_1", resamples)
            for v in (xp, yp):
                dead = np.linalg.norm(v, axis=1) < MIN_NORM
                v[dead] = 0.0
                v[dead, 0] = 1.0
            return xp, yp, resamples
        resamples += 1
        log.debug("projected vector norm %.3g below %g; resampling (%d)", small, MIN_NORM, resamples)


def _reduce_vectors(xs, ys, game: XorGame, d: int, seed: int, trial: int) -> RoundingOutcome:
    xp, yp, resamples = _project(xs, ys, d, seed, trial, MAX_RESAMPLES)
    alpha = float(sample_sech(stream(seed, trial, _TWIST)))
    u = twist(xp, alpha, +1)
    # Bob's twist carries the opposite phase so that after conjugation both
    # factors contribute ||x'||^{i alpha} ||y'||^{i alpha}
    v = twist(yp, alpha, -1)
    w = v.conj()
    value = np.sum(game.matrix * (u @ w.T))
    rx, ry = realify(u, w)
    reduced = VectorStrategy.from_vectors(rx, ry, game)
    return RoundingOutcome(reduced, d, alpha, seed, reduced.objective, trial, resamples, float(value.imag))


def _check(strategy: QuantumStrategy, game: XorGame, d: int) -> None:
    if d < 1:
        raise ContractError(f"target dimension d must be >= 1, got {d}")
    if len(strategy.aliceObs) != game.nA or len(strategy.bobObs) != game.nB:
        raise ContractError("strategy shape does not match the game")


def reduce(strategy: QuantumStrategy, game: XorGame, d: int, seed: int, trial: int = 0) -> RoundingOutcome:
    """One draw of projection and twist; the objective is real-valued."""
    _check(strategy, game, d)
    xs, ys = strategy_vectors(strategy)
    return _reduce_vectors(xs, ys, game, d, seed, trial)


def reduce_trials(
    strategy: QuantumStrategy,
    game: XorGame,
    d: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[RoundingOutcome]:
    """Outcomes for trials ``0..trials-1``, in trial order."""
    _check(strategy, game, d)
    if trials < 1:
        raise ContractError("trials must be >= 1")
    xs, ys = strategy_vectors(strategy)

    def one(t):
        return _reduce_vectors(xs, ys, game, d, seed, t)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, range(trials)))
    return [one(t) for t in range(trials)]


def mean_objective(outcomes: list[RoundingOutcome]) -> tuple[float, float]:
    """Sample mean and its standard error."""
    vals = np.array([o.objective for o in outcomes])
    se = vals.std(ddof=1) / np.sqrt(len(vals)) if len(vals) > 1 else float("nan")
    return float(vals.mean()), float(se)


def best_outcome(outcomes: list[RoundingOutcome]) -> RoundingOutcome:
    """Highest objective; the lowest trial index wins ties."""
    return max(outcomes, key=lambda o: (o.objective, -o.trial))


def reduce_to_quantum(
    strategy: QuantumStrategy,
    game: XorGame,
    d: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> QuantumStrategy:
    """Best of ``trials`` reductions, lifted to local dimension ``2**d``."""
    check_capacity(2**d, 2**d)
    best = best_outcome(reduce_trials(strategy, game, d, trials, seed, workers))
    return tsirelson_lift(best.reduced)
