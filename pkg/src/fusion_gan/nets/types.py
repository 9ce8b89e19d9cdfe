"""
Typed records for the fusion networks.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import attrs
from pydantic import BaseModel, ConfigDict, Field

from fusion_gan.engine import ParamSet, Tensor
from fusion_gan.errors import ConfigError


class NetConfig(BaseModel):
    """Architecture hyperparameters shared by generator and discriminator.

    Attributes
    ----------
    res : int
        Square input resolution (power of two, >= 16).
    width : int
        Base channel width ``w`` of both networks.
    pool_k : int
        Min-pool window applied to the discriminator patch map.
    d_downsamples : int
        Number of stride-2 convolutions in the discriminator.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    res: int = Field(32, description="input resolution")
    width: int = Field(16, description="base channel width")
    pool_k: int = Field(4, description="min-pool window on the patch map")
    d_downsamples: int = Field(2, description="stride-2 layers in the discriminator")

    @property
    def patch_side(self) -> int:
        return self.res >> self.d_downsamples

    def check(self) -> "NetConfig":
        """Validate size relationships, returning ``self``.

        Raises
        ------
        ConfigError
            If the resolution, widths or pooling are inconsistent.
        """
        if self.res < 16 or self.res & (self.res - 1):
            raise ConfigError(f"res must be a power of two >= 16, got {self.res}")
        if self.width < 1:
            raise ConfigError(f"width must be >= 1, got {self.width}")
        if self.d_downsamples < 1 or (self.res >> self.d_downsamples) < 2:
            raise ConfigError(
                f"d_downsamples={self.d_downsamples} leaves a patch map smaller than 2x2 at res {self.res}"
            )
        if self.pool_k < 1 or self.patch_side % self.pool_k:
            raise ConfigError(
                f"pool_k={self.pool_k} must divide the patch-map side {self.patch_side} "
                f"(res {self.res}, {self.d_downsamples} discriminator downsamples)"
            )
        return self


class GeneratorParams(ParamSet):
    """Generator weights: ``branch_x.*``, ``branch_y.*``, ``trunk.*``, ``decoder.*``."""

    def __init__(self, net_config: NetConfig) -> None:
        super().__init__()
        self.net_config = net_config


class DiscriminatorParams(ParamSet):
    """Pair-discriminator weights: ``down<i>.*``, ``mid.*``, ``out.*``."""

    def __init__(self, net_config: NetConfig) -> None:
        super().__init__()
        self.net_config = net_config


@attrs.frozen
class LayerSpec:
    """One parameterised layer in a network layout.

    ``kind`` is ``"conv"``, ``"tconv"`` or ``"norm"``; ``k`` is the kernel side
    (unused for norms).
    """

    kind: str
    name: str
    cin: int
    cout: int
    k: int = 0


@runtime_checkable
class Fuser(Protocol):
    """Anything that maps an (x, y) pair to a fused image."""

    @property
    def params(self) -> ParamSet: ...

    def __call__(self, x: Tensor, y: Tensor) -> Tensor: ...


@runtime_checkable
class Critic(Protocol):
    """Anything that maps an image pair to a patch map."""

    @property
    def params(self) -> ParamSet: ...

    def __call__(self, a: Tensor, b: Tensor) -> Tensor: ...
