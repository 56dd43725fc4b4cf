"""
JSON state files.

Schema::

    {"type": "pure", "dims": [2, 2], "amplitudes": [[re, im], ...]}
    {"type": "mixed", "dims": [2], "matrix": [[[re, im], ...], ...]}

A pure file may add ``"normalize": true`` and, when written by the product
sampler, ``"parts"``: a list of single-party pure-state objects whose tensor
product is the state. Plain numbers are accepted wherever ``[re, im]`` is.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..exceptions import StateFileError, StateValidationError
from ..models.states import DensityMatrix, PureState, SubsystemShape
from .reporting import dump_json

logger = logging.getLogger(__name__)

State = Union[PureState, DensityMatrix]


def _complex(entry: Any, where: str, problems: List[str]) -> complex:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry):
        return complex(entry[0], entry[1])
    problems.append(f"{where}: expected a number or [re, im], got {entry!r}")
    return 0j


def _dims(data: Dict[str, Any], problems: List[str]) -> Optional[SubsystemShape]:
    dims = data.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 2 for d in dims):
        problems.append(f"dims: expected a nonempty list of integers >= 2, got {dims!r}")
        return None
    return SubsystemShape(tuple(dims))


def parse_state(data: Any) -> State:
    """Build a state from a decoded JSON object, collecting every schema problem"""
    if not isinstance(data, dict):
        raise StateFileError("state file must hold a JSON object")
    problems: List[str] = []
    kind = data.get("type")
    if kind not in ("pure", "mixed"):
        problems.append(f"type: expected 'pure' or 'mixed', got {kind!r}")
    shape = _dims(data, problems)

    if kind == "pure":
        raw = data.get("amplitudes")
        if not isinstance(raw, list):
            problems.append("amplitudes: expected a list")
            raw = []
        amps = np.array([_complex(a, f"amplitudes[{i}]", problems) for i, a in enumerate(raw)], dtype=complex)
        if shape is not None and amps.size != shape.total_dim:
            problems.append(f"amplitudes: {amps.size} entries for total dimension {shape.total_dim}")
        if problems:
            raise StateFileError("invalid pure state file", problems)
        if data.get("normalize", False):
            amps = amps / np.linalg.norm(amps)
        try:
            return PureState(amps, shape)
        except StateValidationError as exc:
            raise StateFileError("invalid pure state file", [str(exc)]) from exc

    if kind == "mixed":
        raw = data.get("matrix")
        if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
            problems.append("matrix: expected a list of rows")
            raw = []
        elif len({len(row) for row in raw}) > 1:
            problems.append("matrix: rows differ in length")
            raw = []
        matrix = np.array([[_complex(e, f"matrix[{i}][{j}]", problems) for j, e in enumerate(row)]
                           for i, row in enumerate(raw)], dtype=complex)
        if shape is not None and matrix.shape != (shape.total_dim, shape.total_dim):
            problems.append(f"matrix: shape {matrix.shape} for total dimension {shape.total_dim}")
        if problems:
            raise StateFileError("invalid mixed state file", problems)
        try:
            return DensityMatrix(matrix, shape)
        except StateValidationError as exc:
            raise StateFileError("invalid mixed state file", [str(exc)]) from exc

    raise StateFileError("invalid state file", problems)


def _read(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise StateFileError(f"cannot read state file {path}", [str(exc)]) from exc
    except json.JSONDecodeError as exc:
        raise StateFileError(f"state file {path} is not valid JSON", [str(exc)]) from exc
    logger.debug("Loaded state file %s", path)
    return data


def load_state(path: Union[str, Path]) -> State:
    return parse_state(_read(path))


def load_parts(path: Union[str, Path]) -> Optional[List[PureState]]:
    """The ``parts`` list of a product-state file, or None"""
    data = _read(path)
    if not isinstance(data, dict) or "parts" not in data:
        return None
    return [parse_state(dict(part, type="pure")) for part in data["parts"]]


def _pairs(values: np.ndarray) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in values]


def state_to_dict(state: State, parts: Optional[Sequence[PureState]] = None) -> Dict[str, Any]:
    if isinstance(state, PureState):
        record = {"type": "pure", "dims": list(state.dims), "amplitudes": _pairs(state.amplitudes)}
        if parts:
            record["parts"] = [{"dims": list(p.dims), "amplitudes": _pairs(p.amplitudes)} for p in parts]
        return record
    return {"type": "mixed", "dims": list(state.dims), "matrix": [_pairs(row) for row in state.matrix]}


def save_state(state: State, path: Union[str, Path], parts: Optional[Sequence[PureState]] = None):
    dump_json(state_to_dict(state, parts), path)
