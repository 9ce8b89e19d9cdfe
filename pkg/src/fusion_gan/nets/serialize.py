"""
JSON-safe encoding of float64 arrays and parameter sets.

Arrays are stored as base64 of little-endian float64 bytes together with their
shape, so a save/load round trip is bit-exact.
"""

from __future__ import annotations

import base64
import binascii
from typing import Dict, List

import numpy as np
from pydantic import BaseModel

from fusion_gan.engine import FloatArray, ParamSet
from fusion_gan.errors import CheckpointError


class ArrayRecord(BaseModel):
    shape: List[int]
    data: str


def encode_array(arr: FloatArray) -> ArrayRecord:
    a = np.ascontiguousarray(arr, dtype="<f8")
    return ArrayRecord(shape=list(a.shape), data=base64.b64encode(a.tobytes()).decode("ascii"))


def decode_array(record: ArrayRecord) -> FloatArray:
    """Inverse of :func:`encode_array`.

    Raises
    ------
    CheckpointError
        If the payload is not valid base64 or its length disagrees with the shape.
    """
    try:
        raw = base64.b64decode(record.data.encode("ascii"), validate=True)
    except (binascii.Error, ValueError) as e:
        raise CheckpointError(f"array payload is not valid base64: {e}") from e
    expected = int(np.prod(record.shape, dtype=np.int64)) * 8
    if len(raw) != expected:
        raise CheckpointError(f"array payload has {len(raw)} bytes, shape {record.shape} needs {expected}")
    return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(record.shape)


def encode_arrays(arrays: Dict[str, FloatArray]) -> Dict[str, ArrayRecord]:
    return {name: encode_array(a) for name, a in arrays.items()}


def decode_arrays(records: Dict[str, ArrayRecord]) -> Dict[str, FloatArray]:
    return {name: decode_array(r) for name, r in records.items()}


def encode_params(params: ParamSet) -> Dict[str, ArrayRecord]:
    return encode_arrays(params.snapshot())
