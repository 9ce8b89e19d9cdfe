"""
Fusion networks: two-branch generator, pair discriminator, initialisation,
parameter-free stub fusers and parameter serialisation.
"""

from .discriminator import PairDiscriminator, discriminator_forward, discriminator_layout
from .generator import FusionGenerator, generator_forward, generator_layout, residual_block
from .init import INIT_STD, empty_params, init_params
from .serialize import ArrayRecord, decode_array, decode_arrays, encode_array, encode_arrays, encode_params
from .stubs import CopyFirstInput, CopySecondInput, OracleFuser
from .types import Critic, DiscriminatorParams, Fuser, GeneratorParams, LayerSpec, NetConfig

__all__ = [
    "NetConfig",
    "GeneratorParams",
    "DiscriminatorParams",
    "LayerSpec",
    "Fuser",
    "Critic",
    "generator_layout",
    "generator_forward",
    "residual_block",
    "FusionGenerator",
    "discriminator_layout",
    "discriminator_forward",
    "PairDiscriminator",
    "INIT_STD",
    "init_params",
    "empty_params",
    "CopyFirstInput",
    "CopySecondInput",
    "OracleFuser",
    "ArrayRecord",
    "encode_array",
    "decode_array",
    "encode_arrays",
    "decode_arrays",
    "encode_params",
]
