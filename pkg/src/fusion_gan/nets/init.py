"""
Seeded parameter initialisation.
"""

from __future__ import annotations

import logging
from typing import Iterable, Tuple

import numpy as np

from fusion_gan.engine import ParamSet

from .discriminator import discriminator_layout
from .generator import generator_layout
from .types import DiscriminatorParams, GeneratorParams, LayerSpec, NetConfig

logger = logging.getLogger(__name__)

INIT_STD = 0.02


def _populate(params: ParamSet, layout: Iterable[LayerSpec], rng: np.random.Generator) -> None:
    for spec in layout:
        if spec.kind == "norm":
            params.add(f"{spec.name}.g", np.ones(spec.cout))
            params.add(f"{spec.name}.s", np.zeros(spec.cout))
            continue
        if spec.kind == "conv":
            shape = (spec.cout, spec.cin, spec.k, spec.k)
        else:
            shape = (spec.cin, spec.cout, spec.k, spec.k)
        params.add(f"{spec.name}.w", rng.normal(0.0, INIT_STD, size=shape))
        params.add(f"{spec.name}.b", np.zeros(spec.cout))


def empty_params(cfg: NetConfig) -> Tuple[GeneratorParams, DiscriminatorParams]:
    """Placeholder parameter sets with the layout of ``cfg``, for loading checkpoints.

    Values come from a fixed ``default_rng(0)`` draw and are meant to be
    overwritten.
    """
    cfg.check()
    g = GeneratorParams(cfg)
    d = DiscriminatorParams(cfg)
    zero_rng = np.random.default_rng(0)
    _populate(g, generator_layout(cfg), zero_rng)
    _populate(d, discriminator_layout(cfg), zero_rng)
    return g, d


def init_params(seed: int, cfg: NetConfig) -> Tuple[GeneratorParams, DiscriminatorParams]:
    """Initialise generator and discriminator weights.

    Conv and transposed-conv weights are drawn from ``N(0, 0.02)`` in layout
    order (generator first) from one ``default_rng(seed)`` stream; biases and
    norm shifts are 0, norm gains 1.

    Raises
    ------
    ConfigError
        If ``cfg`` has inconsistent sizes.
    """
    cfg.check()
    rng = np.random.default_rng(seed)
    g = GeneratorParams(cfg)
    d = DiscriminatorParams(cfg)
    _populate(g, generator_layout(cfg), rng)
    _populate(d, discriminator_layout(cfg), rng)
    logger.debug(
        "initialised generator (%d params) and discriminator (%d params) with seed %d",
        g.num_parameters,
        d.num_parameters,
        seed,
    )
    return g, d
