"""JSON wire formats for matrices, observables, measurements, multimeters.

Complex numbers travel as ``[re, im]`` pairs; a matrix is the flat
row-major list of its entries' pairs, a vector the list of its components'
pairs.  Schemas:

* observable:   ``{"dim": int, "outcomes": [str], "effects": [matrix]}``
* measurement:  ``{"system_dim": int, "apparatus_dim": int,
  "pointer": observable, "coupling": matrix, "probe": vector}``
* multimeter:   measurement without ``"probe"``
* quantity:     ``{"dim": int, "matrix": matrix}``
* states list:  ``{"states": [{"label": str, "vector": vector}]}``

Parsing reports :class:`SchemaError` with the dotted path of the offending
field.  Serialization uses Python's shortest round-trip float text, so a
serialize/parse cycle reproduces every entry bit-for-bit.
"""

from __future__ import annotations

import json
from math import isqrt

import numpy as np

from .errors import SchemaError
from .measurement import NormalMeasurement
from .multimeter import Multimeter
from .observables import DiscreteObservable


def matrix_to_pairs(a) -> list:
    m = np.asarray(a, dtype=np.complex128)
    return [[float(x.real), float(x.imag)] for x in m.ravel()]


def vector_to_pairs(v) -> list:
    return [[float(x.real), float(x.imag)] for x in np.asarray(v, np.complex128).ravel()]


def _pairs_to_array(pairs, field: str) -> np.ndarray:
    if not isinstance(pairs, list):
        raise SchemaError(field, "expected a list of [re, im] pairs")
    out = np.empty(len(pairs), dtype=np.complex128)
    for k, item in enumerate(pairs):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in item)
        ):
            raise SchemaError(f"{field}[{k}]", "expected an [re, im] pair of numbers")
        out[k] = complex(item[0], item[1])
    return out


def pairs_to_matrix(pairs, field: str, dim: int | None = None) -> np.ndarray:
    flat = _pairs_to_array(pairs, field)
    side = isqrt(flat.size)
    if side * side != flat.size:
        raise SchemaError(field, f"{flat.size} entries do not form a square matrix")
    if dim is not None and side != dim:
        raise SchemaError(field, f"matrix is {side}x{side}, expected {dim}x{dim}")
    return flat.reshape(side, side)


def pairs_to_vector(pairs, field: str, dim: int | None = None) -> np.ndarray:
    flat = _pairs_to_array(pairs, field)
    if dim is not None and flat.size != dim:
        raise SchemaError(field, f"vector has {flat.size} components, expected {dim}")
    return flat


def _require(doc, key: str, kind, field: str):
    if not isinstance(doc, dict):
        raise SchemaError(field or "document", "expected a JSON object")
    prefix = f"{field}." if field else ""
    if key not in doc:
        raise SchemaError(f"{prefix}{key}", "missing required field")
    value = doc[key]
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaError(f"{prefix}{key}", "expected an integer")
    elif kind is str and not isinstance(value, str):
        raise SchemaError(f"{prefix}{key}", "expected a string")
    elif kind is list and not isinstance(value, list):
        raise SchemaError(f"{prefix}{key}", "expected a list")
    elif kind is dict and not isinstance(value, dict):
        raise SchemaError(f"{prefix}{key}", "expected an object")
    return value


def observable_to_json(obs: DiscreteObservable) -> dict:
    return {
        "dim": obs.space_dim,
        "outcomes": list(obs.outcomes),
        "effects": [matrix_to_pairs(e) for e in obs.effects],
    }


def observable_from_json(doc, field: str = "observable") -> DiscreteObservable:
    dim = _require(doc, "dim", int, field)
    outcomes = _require(doc, "outcomes", list, field)
    effects = _require(doc, "effects", list, field)
    if not all(isinstance(x, str) for x in outcomes):
        raise SchemaError(f"{field}.outcomes", "labels must be strings")
    if len(effects) != len(outcomes):
        raise SchemaError(
            f"{field}.effects", f"{len(effects)} effects for {len(outcomes)} outcomes"
        )
    mats = [
        pairs_to_matrix(e, f"{field}.effects[{k}]", dim) for k, e in enumerate(effects)
    ]
    return DiscreteObservable(dim, tuple(outcomes), tuple(mats))


def measurement_to_json(nm: NormalMeasurement) -> dict:
    return {
        "system_dim": nm.system_dim,
        "apparatus_dim": nm.apparatus_dim,
        "pointer": observable_to_json(nm.pointer),
        "coupling": matrix_to_pairs(nm.coupling),
        "probe": vector_to_pairs(nm.probe),
    }


def measurement_from_json(doc, field: str = "measurement") -> NormalMeasurement:
    dh = _require(doc, "system_dim", int, field)
    dk = _require(doc, "apparatus_dim", int, field)
    pointer = observable_from_json(_require(doc, "pointer", dict, field), f"{field}.pointer")
    coupling = pairs_to_matrix(_require(doc, "coupling", list, field),
                               f"{field}.coupling", dh * dk)
    probe = pairs_to_vector(_require(doc, "probe", list, field), f"{field}.probe", dk)
    return NormalMeasurement(dh, dk, pointer, coupling, probe)


def multimeter_to_json(mm: Multimeter) -> dict:
    return {
        "system_dim": mm.system_dim,
        "apparatus_dim": mm.apparatus_dim,
        "pointer": observable_to_json(mm.pointer),
        "coupling": matrix_to_pairs(mm.coupling),
    }


def multimeter_from_json(doc, field: str = "multimeter") -> Multimeter:
    dh = _require(doc, "system_dim", int, field)
    dk = _require(doc, "apparatus_dim", int, field)
    pointer = observable_from_json(_require(doc, "pointer", dict, field), f"{field}.pointer")
    coupling = pairs_to_matrix(_require(doc, "coupling", list, field),
                               f"{field}.coupling", dh * dk)
    return Multimeter(dh, dk, pointer, coupling)


def quantity_from_json(doc, field: str = "quantity") -> np.ndarray:
    dim = _require(doc, "dim", int, field)
    return pairs_to_matrix(_require(doc, "matrix", list, field), f"{field}.matrix", dim)


def quantity_to_json(a) -> dict:
    m = np.asarray(a, dtype=np.complex128)
    return {"dim": int(m.shape[0]), "matrix": matrix_to_pairs(m)}


def states_from_json(doc, field: str = "states") -> list[tuple[str, np.ndarray]]:
    entries = _require(doc, "states", list, "")
    out = []
    for k, item in enumerate(entries):
        label = _require(item, "label", str, f"{field}[{k}]")
        if not isinstance(label, str):
            raise SchemaError(f"{field}[{k}].label", "expected a string")
        vec = pairs_to_vector(
            _require(item, "vector", list, f"{field}[{k}]"), f"{field}[{k}].vector"
        )
        out.append((label, vec))
    if not out:
        raise SchemaError(field, "need at least one state")
    return out


def dumps(doc) -> str:
    """Canonical JSON text: sorted keys, newline-terminated."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
