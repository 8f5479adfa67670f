"""JSON layouts for matrices, states, games, and strategies.

Complex numbers are stored as ``[re, im]`` pairs, matrices row-major. Floats
go through ``repr`` (shortest round-trip form), so a write/read cycle is
bit-exact.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SchemaError, XorRigidError
from .game import QuantumStrategy, XorGame
from .matcore import BipartiteState
from .sdpsolve import VectorStrategy

PROVENANCE_KEYS = ("tool-version", "seed", "command", "inputs-hash")


def _require(doc: dict, keys, what: str) -> None:
    if not isinstance(doc, dict):
        raise SchemaError(f"{what}: expected a JSON object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise SchemaError(f"{what}: missing keys {missing}")


def _complex_list(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def _parse_complex(pairs, what: str) -> np.ndarray:
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise SchemaError(f"{what}: entries must be [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"rows": m.shape[0], "cols": m.shape[1], "entries": _complex_list(m)}


def matrix_from_json(doc) -> np.ndarray:
    _require(doc, ("rows", "cols", "entries"), "matrix")
    vals = _parse_complex(doc["entries"], "matrix")
    if vals.size != doc["rows"] * doc["cols"]:
        raise SchemaError(f"matrix: {vals.size} entries for {doc['rows']}x{doc['cols']}")
    return vals.reshape(doc["rows"], doc["cols"])


def state_to_json(s: BipartiteState) -> dict:
    return {"dimA": s.dimA, "dimB": s.dimB, "amplitudes": _complex_list(s.amplitudes)}


def state_from_json(doc) -> BipartiteState:
    _require(doc, ("dimA", "dimB", "amplitudes"), "state")
    return BipartiteState(int(doc["dimA"]), int(doc["dimB"]), _parse_complex(doc["amplitudes"], "state"))


def game_to_json(g: XorGame) -> dict:
    return {"nA": g.nA, "nB": g.nB, "matrix": g.matrix.tolist(), "labels": g.labels}


def game_from_json(doc) -> XorGame:
    _require(doc, ("nA", "nB", "matrix"), "game")
    mat = np.asarray(doc["matrix"], dtype=float)
    if mat.shape != (doc["nA"], doc["nB"]):
        raise SchemaError(f"game: matrix shape {mat.shape} does not match nA x nB")
    return XorGame(mat, doc.get("labels") or {})


def vector_strategy_to_json(v: VectorStrategy) -> dict:
    return {
        "r": v.r,
        "xs": v.xs.tolist(),
        "ys": v.ys.tolist(),
        "objective": v.objective,
        "converged": v.converged,
    }


def vector_strategy_from_json(doc) -> VectorStrategy:
    _require(doc, ("r", "xs", "ys", "objective"), "vector strategy")
    xs = np.asarray(doc["xs"], dtype=float)
    ys = np.asarray(doc["ys"], dtype=float)
    if xs.ndim != 2 or ys.ndim != 2 or xs.shape[1] != doc["r"] or ys.shape[1] != doc["r"]:
        raise SchemaError("vector strategy: xs/ys must be lists of length-r vectors")
    return VectorStrategy(xs, ys, doc["objective"], bool(doc.get("converged", True)))


def strategy_to_json(s: QuantumStrategy) -> dict:
    return {
        "dimA": s.dimA,
        "dimB": s.dimB,
        "aliceObs": [matrix_to_json(a) for a in s.aliceObs],
        "bobObs": [matrix_to_json(b) for b in s.bobObs],
        "state": state_to_json(s.state),
    }


def strategy_from_json(doc) -> QuantumStrategy:
    _require(doc, ("dimA", "dimB", "aliceObs", "bobObs", "state"), "strategy")
    state = state_from_json(doc["state"])
    if (state.dimA, state.dimB) != (doc["dimA"], doc["dimB"]):
        raise SchemaError("strategy: state dims disagree with dimA/dimB")
    return QuantumStrategy(
        tuple(matrix_from_json(m) for m in doc["aliceObs"]),
        tuple(matrix_from_json(m) for m in doc["bobObs"]),
        state,
    )


def inputs_hash(paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def with_provenance(payload: dict, command: str, seed, inputs=()) -> dict:
    doc = {
        "tool-version": __version__,
        "seed": seed,
        "command": command,
        "inputs-hash": inputs_hash(inputs),
    }
    doc.update(payload)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_json(path, doc: dict) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    except OSError as exc:
        raise XorRigidError(f"{path}: {exc}") from exc
