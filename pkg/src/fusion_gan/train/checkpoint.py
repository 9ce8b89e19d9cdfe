"""
Versioned JSON checkpoints.

A checkpoint holds both parameter sets, both Adam states, the iteration, the
sampling RNG state and the effective config without ``out_dir``. Arrays are
base64 float64 so a save/load round trip is bit-exact and two identical runs
write byte-identical files.
"""

from __future__ import annotations

import json
import logging
import os
from typing import Any, Dict, Optional

import attrs
import numpy as np
from pydantic import BaseModel, ValidationError

from fusion_gan.engine import ParamSet
from fusion_gan.errors import CheckpointError, ConfigError, ContractError
from fusion_gan.nets import (
    ArrayRecord,
    DiscriminatorParams,
    GeneratorParams,
    NetConfig,
    decode_arrays,
    empty_params,
    encode_arrays,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
CHECKPOINT_KIND = "fusion-gan-checkpoint"


class OptimizerRecord(BaseModel):
    step: int
    moment1: Dict[str, ArrayRecord]
    moment2: Dict[str, ArrayRecord]


class CheckpointDoc(BaseModel):
    kind: str
    format_version: int
    iteration: int
    net_config: NetConfig
    config: Optional[Dict[str, Any]] = None
    generator: Dict[str, ArrayRecord]
    discriminator: Dict[str, ArrayRecord]
    generator_optimizer: OptimizerRecord
    discriminator_optimizer: OptimizerRecord
    rng_state: Optional[Dict[str, Any]] = None


@attrs.define
class LoadedCheckpoint:
    generator: GeneratorParams
    discriminator: DiscriminatorParams
    iteration: int
    config: Optional[Dict[str, Any]]
    rng_state: Optional[Dict[str, Any]]

    @property
    def net_config(self) -> NetConfig:
        return self.generator.net_config


def _optimizer_record(params: ParamSet) -> OptimizerRecord:
    step, m1, m2 = params.optimizer_state()
    return OptimizerRecord(step=step, moment1=encode_arrays(m1), moment2=encode_arrays(m2))


def save_checkpoint(
    path: str,
    g: GeneratorParams,
    d: DiscriminatorParams,
    iteration: int,
    *,
    config: Optional[Dict[str, Any]] = None,
    rng: Optional[np.random.Generator] = None,
) -> str:
    """Write a checkpoint to ``path`` (atomically) and return the path.

    Raises
    ------
    CheckpointError
        If the file cannot be written.
    """
    doc = CheckpointDoc(
        kind=CHECKPOINT_KIND,
        format_version=FORMAT_VERSION,
        iteration=iteration,
        net_config=g.net_config,
        config=config,
        generator=encode_arrays(g.snapshot()),
        discriminator=encode_arrays(d.snapshot()),
        generator_optimizer=_optimizer_record(g),
        discriminator_optimizer=_optimizer_record(d),
        rng_state=rng.bit_generator.state if rng is not None else None,
    )
    tmp = f"{path}.tmp"
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(doc.model_dump(mode="json"), f, sort_keys=True)
        os.replace(tmp, path)
    except OSError as e:
        raise CheckpointError(f"cannot write checkpoint {path}: {e}") from e
    logger.debug("checkpoint written: %s (iteration %d)", path, iteration)
    return path


def load_checkpoint(path: str) -> LoadedCheckpoint:
    """Load a checkpoint written by :func:`save_checkpoint`.

    Nothing is returned unless the whole file validates.

    Raises
    ------
    CheckpointError
        If the file is missing, truncated, of another format version, or its
        arrays do not match the recorded network layout.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError as e:
        raise CheckpointError(f"checkpoint not found: {path}") from e
    except (OSError, ValueError) as e:
        raise CheckpointError(f"cannot read checkpoint {path} (truncated or not JSON): {e}") from e
    if not isinstance(raw, dict) or raw.get("kind") != CHECKPOINT_KIND:
        raise CheckpointError(f"{path} is not a fusion-gan checkpoint")
    if raw.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path} has format version {raw.get('format_version')}, expected {FORMAT_VERSION}"
        )
    try:
        doc = CheckpointDoc.model_validate(raw)
    except ValidationError as e:
        raise CheckpointError(f"malformed checkpoint {path}: {e}") from e
    try:
        g, d = empty_params(doc.net_config)
    except ConfigError as e:
        raise CheckpointError(f"checkpoint {path} records an unusable network config: {e}") from e
    try:
        g.load_state(
            decode_arrays(doc.generator),
            step=doc.generator_optimizer.step,
            moment1=decode_arrays(doc.generator_optimizer.moment1),
            moment2=decode_arrays(doc.generator_optimizer.moment2),
        )
        d.load_state(
            decode_arrays(doc.discriminator),
            step=doc.discriminator_optimizer.step,
            moment1=decode_arrays(doc.discriminator_optimizer.moment1),
            moment2=decode_arrays(doc.discriminator_optimizer.moment2),
        )
    except (ContractError, KeyError) as e:
        raise CheckpointError(f"checkpoint {path} does not match its network layout: {e}") from e
    return LoadedCheckpoint(
        generator=g,
        discriminator=d,
        iteration=doc.iteration,
        config=doc.config,
        rng_state=doc.rng_state,
    )
