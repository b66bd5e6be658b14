"""JSON file formats for state sets and maskers.

Complex numbers are stored as two-element [re, im] arrays throughout, so
files are locale- and format-unambiguous and round-trip bit exactly
through Python's float repr.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fixed_reducing, masker as masking
from .hilbert import NORM_TOL, MultipartiteState, Operator, StateVector


class FileFormatError(ValueError):
    """Malformed input file; the message names the offending field."""


def _require(condition: bool, field: str, detail: str) -> None:
    if not condition:
        raise FileFormatError(f"field '{field}': {detail}")


def _complex_to_json(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def _vector_to_json(vector: np.ndarray) -> list[list[float]]:
    return [_complex_to_json(v) for v in vector]


def _matrix_to_json(matrix: np.ndarray) -> list[list[list[float]]]:
    return [_vector_to_json(row) for row in matrix]


def _complex_from_json(value, field: str) -> complex:
    _require(
        isinstance(value, (list, tuple)) and len(value) == 2
        and all(isinstance(part, (int, float)) and not isinstance(part, bool) for part in value),
        field,
        f"expected a two-element [re, im] number pair, got {value!r}",
    )
    return complex(value[0], value[1])


def _vector_from_json(data, field: str, length: int | None = None) -> np.ndarray:
    _require(isinstance(data, list) and data, field, "expected a nonempty list of [re, im] pairs")
    if length is not None:
        _require(len(data) == length, field, f"has length {len(data)}, expected {length}")
    return np.array([_complex_from_json(v, f"{field}[{i}]") for i, v in enumerate(data)])


def _matrix_from_json(data, field: str, size: int) -> np.ndarray:
    _require(isinstance(data, list) and len(data) == size, field,
             f"expected {size} matrix rows")
    return np.array([_vector_from_json(row, f"{field}[{i}]", size) for i, row in enumerate(data)])


def _dims_from_json(data, field: str) -> tuple[int, ...]:
    _require(
        isinstance(data, list) and data
        and all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in data),
        field,
        f"expected a nonempty list of positive integers, got {data!r}",
    )
    return tuple(data)


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"field 'document': {path} is not valid JSON ({exc})") from exc
    _require(isinstance(document, dict), "document", "top level must be a JSON object")
    return document


def state_set_to_json(
    dims: Sequence[int],
    vectors: Sequence[np.ndarray],
    labels: Sequence[str] | None = None,
) -> dict:
    document = {
        "dims": [int(d) for d in dims],
        "states": [_vector_to_json(np.asarray(v, dtype=complex)) for v in vectors],
    }
    if labels is not None:
        document["labels"] = list(labels)
    return document


def state_set_from_json(
    document: dict, field: str = "", *, renormalize: bool = False
) -> tuple[tuple[int, ...], list[np.ndarray], list[str] | None]:
    prefix = f"{field}." if field else ""
    dims = _dims_from_json(document.get("dims"), f"{prefix}dims")
    total = int(np.prod(dims))
    raw_states = document.get("states")
    _require(isinstance(raw_states, list) and raw_states, f"{prefix}states",
             "expected a nonempty list of state vectors")
    vectors = []
    for i, raw in enumerate(raw_states):
        vector = _vector_from_json(raw, f"{prefix}states[{i}]", total)
        norm = float(np.linalg.norm(vector))
        if renormalize:
            _require(norm > 0, f"{prefix}states[{i}]", "cannot renormalize the zero vector")
            vector = vector / norm
        else:
            _require(
                abs(norm - 1.0) <= NORM_TOL,
                f"{prefix}states[{i}]",
                f"is not normalized (|norm - 1| = {abs(norm - 1.0):.3e}); "
                "pass --renormalize to repair",
            )
        vectors.append(vector)
    labels = document.get("labels")
    if labels is not None:
        _require(
            isinstance(labels, list) and len(labels) == len(vectors)
            and all(isinstance(l, str) for l in labels),
            f"{prefix}labels",
            "expected one string per state",
        )
    return dims, vectors, labels


def load_state_set(
    path, *, renormalize: bool = False
) -> tuple[tuple[int, ...], list[np.ndarray], list[str] | None]:
    """Read a state-set file, validating shape and normalization."""
    return state_set_from_json(_load_json(path), renormalize=renormalize)


def save_state_set(path, dims, vectors, labels=None) -> None:
    Path(path).write_text(
        json.dumps(state_set_to_json(dims, vectors, labels), indent=1) + "\n",
        encoding="utf-8",
    )


def _ancilla_index(ancilla: StateVector) -> int:
    index = int(np.argmax(np.abs(ancilla.amplitudes)))
    residual = ancilla.amplitudes.copy()
    residual[index] -= 1.0
    if float(np.max(np.abs(residual))) > 1e-12:
        raise ValueError(
            "only computational-basis ancilla states can be written to a masker file"
        )
    return index


def masker_to_json(m) -> dict:
    """Serializable form of a masker; inverse of masker_from_json."""
    d = m.dim
    document = {
        "dims": [d, d],
        "unitary": _matrix_to_json(m.unitary.entries),
        "targets": state_set_to_json(
            (d, d), [s.amplitudes for s in m.targets.states]
        ),
        "inputs": state_set_to_json((d,), [a.amplitudes for a in m.inputs]),
        "ancilla_index": _ancilla_index(m.ancilla),
    }
    if isinstance(m, masking.ProbabilisticMasker):
        document["kind"] = "probabilistic"
        document["dims"] = [d, d, m.probe_dim]
        document["gammas"] = [float(g) for g in m.gammas]
        document["probe_dim"] = m.probe_dim
    else:
        document["kind"] = "deterministic"
    return document


def masker_from_json(document: dict):
    kind = document.get("kind")
    _require(kind in ("deterministic", "probabilistic"), "kind",
             f"expected 'deterministic' or 'probabilistic', got {kind!r}")
    dims = _dims_from_json(document.get("dims"), "dims")
    expected_subsystems = 2 if kind == "deterministic" else 3
    _require(len(dims) == expected_subsystems, "dims",
             f"a {kind} masker acts on {expected_subsystems} subsystems, got {len(dims)}")
    _require(dims[0] == dims[1], "dims", f"local dimensions must match, got {dims}")
    d = dims[0]

    input_dims, input_vectors, _ = state_set_from_json(document.get("inputs") or {}, "inputs")
    _require(input_dims == (d,), "inputs.dims", f"expected [{d}], got {list(input_dims)}")
    inputs = tuple(StateVector(v) for v in input_vectors)
    n = len(inputs)

    target_dims, target_vectors, _ = state_set_from_json(document.get("targets") or {}, "targets")
    _require(target_dims == (d, d), "targets.dims", f"expected [{d}, {d}], got {list(target_dims)}")
    _require(len(target_vectors) == n, "targets.states", f"expected {n} target states")
    targets = fixed_reducing.from_states(
        [MultipartiteState(v, (d, d)) for v in target_vectors]
    )

    ancilla_index = document.get("ancilla_index")
    _require(
        isinstance(ancilla_index, int) and not isinstance(ancilla_index, bool)
        and 0 <= ancilla_index < d,
        "ancilla_index",
        f"expected an integer in [0, {d - 1}], got {ancilla_index!r}",
    )
    ancilla_state = StateVector(np.eye(d, dtype=complex)[ancilla_index])

    total = int(np.prod(dims))
    unitary = Operator(_matrix_from_json(document.get("unitary"), "unitary", total))

    if kind == "deterministic":
        return masking.DeterministicMasker(inputs, ancilla_state, targets, unitary)

    probe_dim = document.get("probe_dim")
    _require(probe_dim == n + 1, "probe_dim", f"expected {n + 1}, got {probe_dim!r}")
    _require(dims[2] == probe_dim, "dims", f"probe subsystem must have dimension {probe_dim}")
    raw_gammas = document.get("gammas")
    _require(
        isinstance(raw_gammas, list) and len(raw_gammas) == n
        and all(isinstance(g, (int, float)) and not isinstance(g, bool) for g in raw_gammas),
        "gammas",
        f"expected {n} numbers",
    )
    gammas = np.asarray(raw_gammas, dtype=float)
    _require(bool(np.all(gammas > 0)) and bool(np.all(gammas <= 1)), "gammas",
             "efficiencies must lie in (0, 1]")
    probe_start = np.zeros(probe_dim, dtype=complex)
    probe_start[0] = 1.0
    failures = masking.failure_branches(unitary, inputs, ancilla_state, targets, gammas)
    return masking.ProbabilisticMasker(
        inputs, ancilla_state, targets, gammas, StateVector(probe_start), unitary, failures
    )


def load_masker(path):
    """Read a masker file back into a masker value."""
    return masker_from_json(_load_json(path))


def save_masker(m, path) -> None:
    """Write a masker to ``path`` as JSON; round-trips losslessly."""
    Path(path).write_text(json.dumps(masker_to_json(m), indent=1) + "\n", encoding="utf-8")
