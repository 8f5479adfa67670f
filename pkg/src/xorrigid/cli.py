"""Command-line front end.

Every JSON artifact carries a provenance header (tool version, seed, command,
SHA-256 of the input files). Exit codes: 2 for malformed inputs, 3 for
numeric contract violations, 4 for capacity overflow.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import secrets
import sys
from pathlib import Path

import numpy as np

from . import serialize as ser
from .clifford import detuned_slofstra, slofstra_strategy, tsirelson_lift
from .errors import CapacityError, ContractError, SchemaError, SolverError, XorRigidError
from .game import XorGame, bias_of, chsh_n, simulate_rounds
from .rigidity import (
    balance_pad,
    build_qubit_pairs,
    certify_entropy,
    embedded_chsh_report,
    entanglement_entropy,
    needs_padding,
)
from .rounding import best_outcome, mean_objective, reduce_trials
from .sdpsolve import solve_bias

log = logging.getLogger("xorrigid")

EXIT_SCHEMA = 2
EXIT_CONTRACT = 3
EXIT_CAPACITY = 4
THREADS_ENV = "XORRIGID_THREADS"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(32)


def _emit(path, doc: dict) -> None:
    text = ser.dumps(doc)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _chsh_size(nA: int, nB: int) -> int | None:
    return nA if nA >= 2 and nB == nA * (nA - 1) else None


def _load_strategy(path, game_path=None):
    """Strategy plus the game it is played against (explicit, embedded, or CHSH(n))."""
    doc = ser.read_json(path)
    strategy = ser.strategy_from_json(doc)
    if game_path is not None:
        game = ser.game_from_json(ser.read_json(game_path))
    elif "game" in doc:
        game = ser.game_from_json(doc["game"])
    else:
        n = _chsh_size(len(strategy.aliceObs), len(strategy.bobObs))
        if n is None:
            raise SchemaError(f"{path}: no embedded game and shape is not CHSH(n); pass --game")
        game = chsh_n(n)
    return strategy, game


def _strategy_doc(strategy, game, command, seed, inputs, extra=None) -> dict:
    payload = ser.strategy_to_json(strategy)
    payload["game"] = ser.game_to_json(game)
    bias = bias_of(strategy, game)
    payload["bias"] = bias.bias
    payload["successProbability"] = bias.successProbability
    if extra:
        payload.update(extra)
    return ser.with_provenance(payload, command, seed, inputs)


def cmd_game(args) -> None:
    seed = None
    if args.chsh_n is not None:
        game = chsh_n(args.chsh_n)
    elif args.random is not None:
        seed = _seed(args)
        rng = np.random.default_rng(seed)
        game = XorGame.normalized(rng.standard_normal(tuple(args.random)))
    else:
        raise SchemaError("game: give --chsh-n N or --random NA NB")
    _emit(args.output, ser.with_provenance(ser.game_to_json(game), "game", seed))


def cmd_solve(args) -> None:
    seed = _seed(args)
    game = ser.game_from_json(ser.read_json(args.game))
    v = solve_bias(game, args.rank, args.max_sweeps, args.tol, seed, args.restarts)
    payload = ser.vector_strategy_to_json(v)
    payload["game"] = ser.game_to_json(game)
    _emit(args.output, ser.with_provenance(payload, "solve", seed, [args.game]))


def cmd_lift(args) -> None:
    doc = ser.read_json(args.vectors)
    v = ser.vector_strategy_from_json(doc)
    if args.game:
        game = ser.game_from_json(ser.read_json(args.game))
    elif "game" in doc:
        game = ser.game_from_json(doc["game"])
    else:
        raise SchemaError("lift: vector file has no embedded game; pass --game")
    inputs = [args.vectors] + ([args.game] if args.game else [])
    _emit(args.output, _strategy_doc(tsirelson_lift(v), game, "lift", None, inputs))


def cmd_slofstra(args) -> None:
    if args.detune:
        s = detuned_slofstra(args.n, args.detune, tilt=not args.no_tilt)
    else:
        s = slofstra_strategy(args.n)
    _emit(args.output, _strategy_doc(s, chsh_n(args.n), "slofstra", None, []))


def cmd_round(args) -> None:
    seed = _seed(args)
    strategy, game = _load_strategy(args.strategy, args.game)
    outs = reduce_trials(strategy, game, args.d, args.trials, seed, workers=_threads())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trial", "alpha", "objective", "resamples"])
    for o in outs:
        w.writerow([o.trial, repr(o.alpha), repr(o.objective), o.resamples])
    if args.output in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(args.output).write_text(buf.getvalue())
    mean, se = mean_objective(outs)
    log.info("d=%d trials=%d mean objective %.6f (stderr %.2g)", args.d, args.trials, mean, se)
    if args.strategy_out:
        best = best_outcome(outs)
        lifted = tsirelson_lift(best.reduced)
        inputs = [args.strategy] + ([args.game] if args.game else [])
        extra = {"rounding": {"d": args.d, "trials": args.trials, "bestTrial": best.trial,
                              "alpha": best.alpha, "meanObjective": mean,
                              "stderr": None if np.isnan(se) else se}}
        _emit(args.strategy_out, _strategy_doc(lifted, game, "round", seed, inputs, extra))


def cmd_simulate(args) -> None:
    seed = _seed(args)
    strategy, game = _load_strategy(args.strategy, args.game)
    p, se = simulate_rounds(strategy, game, args.rounds, seed, args.partitions, _threads())
    payload = {
        "rounds": args.rounds,
        "partitions": args.partitions,
        "empiricalSuccess": p,
        "stderr": se,
        "predictedSuccess": bias_of(strategy, game).successProbability,
    }
    inputs = [args.strategy] + ([args.game] if args.game else [])
    _emit(args.output, ser.with_provenance(payload, "simulate", seed, inputs))


def _write_matrix_csv(path: Path, mat: np.ndarray) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(mat):
            w.writerow([repr(float(x)) for x in row])


def cmd_report(args) -> None:
    strategy, _ = _load_strategy(args.strategy)
    rep = embedded_chsh_report(strategy, args.n)
    payload = {"report": rep.to_dict()}
    if args.n >= 3:
        work = balance_pad(strategy) if needs_padding(strategy) else strategy
        payload["qubitPairs"] = build_qubit_pairs(work, args.n).to_dict()
    if args.emit_csv:
        prefix = Path(args.emit_csv)
        for name in ("pairBiases", "aliceAnticomm", "bobAnticomm", "crossConsistency"):
            _write_matrix_csv(prefix.with_name(f"{prefix.name}{name}.csv"), getattr(rep, name))
    _emit(args.output, ser.with_provenance(payload, "report", None, [args.strategy]))


def cmd_certify(args) -> None:
    strategy, _ = _load_strategy(args.strategy)
    cert = certify_entropy(strategy, args.n, args.r, args.delta, args.threshold)
    _emit(args.output, ser.with_provenance({"certificate": cert.to_dict()}, "certify", None, [args.strategy]))


def cmd_entropy(args) -> None:
    doc = ser.read_json(args.input)
    state = ser.state_from_json(doc["state"] if "state" in doc else doc)
    payload = {"entropyBits": entanglement_entropy(state), "dimA": state.dimA, "dimB": state.dimB}
    _emit(args.output, ser.with_provenance(payload, "entropy", None, [args.input]))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xorrigid", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")
        return sp

    sp = add("game", cmd_game, "write a game file")
    sp.add_argument("--chsh-n", type=int)
    sp.add_argument("--random", type=int, nargs=2, metavar=("NA", "NB"))
    sp.add_argument("--seed", type=int)

    sp = add("solve", cmd_solve, "solve the vector relaxation of a game")
    sp.add_argument("game")
    sp.add_argument("--rank", type=int)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-sweeps", type=int, default=100_000)
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--seed", type=int)

    sp = add("lift", cmd_lift, "lift a vector strategy to observables")
    sp.add_argument("vectors")
    sp.add_argument("--game")

    sp = add("slofstra", cmd_slofstra, "optimal CHSH(n) strategy")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--detune", type=float, default=0.0, help="Schmidt/tilt angle t")
    sp.add_argument("--no-tilt", action="store_true")

    sp = add("round", cmd_round, "randomized dimension reduction; per-trial CSV")
    sp.add_argument("strategy")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--game")
    sp.add_argument("--strategy-out", help="write the best trial lifted to dimension 2**d")

    sp = add("simulate", cmd_simulate, "sample referee rounds")
    sp.add_argument("strategy")
    sp.add_argument("--rounds", type=int, default=100_000)
    sp.add_argument("--partitions", type=int, default=1)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--game")

    sp = add("report", cmd_report, "embedded-CHSH residual report")
    sp.add_argument("strategy")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--emit-csv", metavar="PREFIX", help="write residual matrices as PREFIX<name>.csv")

    sp = add("certify", cmd_certify, "qubit-pair and entropy certificate")
    sp.add_argument("strategy")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int)
    sp.add_argument("--delta", type=float, default=0.01)
    sp.add_argument("--threshold", type=float)

    sp = add("entropy", cmd_entropy, "entanglement entropy of a state or strategy file")
    sp.add_argument("input")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (SchemaError, KeyError, TypeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except CapacityError as exc:
        print(f"error: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ContractError, SolverError) as exc:
        print(f"error: contract: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except XorRigidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
