"""
Reference fusers for evaluation: copy-x, copy-y and the ground-truth oracle.
"""

from __future__ import annotations

import hashlib
from typing import Dict, Sequence, Tuple

from fusion_gan.data import FusionSample
from fusion_gan.engine import FloatArray, Tensor
from fusion_gan.errors import ContractError
from fusion_gan.nets import CopyFirstInput, CopySecondInput, Fuser, OracleFuser

BASELINES = ("copy-x", "copy-y", "oracle")


def _key(x: FloatArray, y: FloatArray) -> Tuple[str, str]:
    return hashlib.sha1(x.tobytes()).hexdigest(), hashlib.sha1(y.tobytes()).hexdigest()


def oracle_fuser(samples: Sequence[FusionSample]) -> OracleFuser:
    """Fuser answering each sample's ``(x, y)`` with its oracle image.

    Raises
    ------
    ContractError
        If a sample has no oracle, or is later queried with an unknown pair.
    """
    table: Dict[Tuple[str, str], FloatArray] = {}
    for i, s in enumerate(samples):
        if s.oracle is None:
            raise ContractError(f"sample {i} has no oracle image")
        table[_key(s.x, s.y)] = s.oracle

    def lookup(x: Tensor, y: Tensor) -> Tensor:
        found = table.get(_key(x.data, y.data))
        if found is None:
            raise ContractError("oracle fuser queried with a pair outside its samples")
        return Tensor(found)

    fuser = OracleFuser()
    fuser.set_lookup(lookup)
    return fuser


def make_baseline(name: str, samples: Sequence[FusionSample] = ()) -> Fuser:
    """Build the named baseline fuser (``copy-x``, ``copy-y`` or ``oracle``)."""
    if name == "copy-x":
        return CopyFirstInput()
    if name == "copy-y":
        return CopySecondInput()
    if name == "oracle":
        return oracle_fuser(samples)
    raise ContractError(f"unknown baseline {name!r}; choose one of {', '.join(BASELINES)}")
