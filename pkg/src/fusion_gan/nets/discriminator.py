"""
Pair discriminator producing a patch map (least-squares GAN, no sigmoid).
"""

from __future__ import annotations

from typing import List, Optional

from fusion_gan.engine import Tensor, concat_channels, conv2d, instance_norm, leaky_relu
from fusion_gan.errors import ContractError, DimensionError

from .generator import check_image_pair
from .types import DiscriminatorParams, LayerSpec, NetConfig

LEAK = 0.2


def discriminator_layout(cfg: NetConfig) -> List[LayerSpec]:
    w = cfg.width
    layout: List[LayerSpec] = []
    cin = 6
    for i in range(cfg.d_downsamples):
        cout = w * (2**i)
        layout.append(LayerSpec("conv", f"down{i}", cin, cout, 4))
        if i > 0:
            layout.append(LayerSpec("norm", f"down{i}.norm", cout, cout))
        cin = cout
    layout += [
        LayerSpec("conv", "mid", cin, 2 * cin, 3),
        LayerSpec("norm", "mid.norm", 2 * cin, 2 * cin),
        LayerSpec("conv", "out", 2 * cin, 1, 3),
    ]
    return layout


def discriminator_forward(d: DiscriminatorParams, a: Tensor, b: Tensor) -> Tensor:
    """Score the pair ``(a, b)``; returns a ``(1, ph, pw)`` patch map.

    ``ph = H / 2**d_downsamples``. Pair order matters: ``a`` fills channels
    0-2 of the joint input and ``b`` channels 3-5.

    Raises
    ------
    DimensionError
        If ``a`` and ``b`` differ in shape or the size does not survive the
        stride-2 layers.
    """
    check_image_pair(a, b)
    n = d.net_config.d_downsamples
    for axis, size in (("height", a.shape[1]), ("width", a.shape[2])):
        if size % (2**n):
            raise DimensionError(
                f"discriminator {axis} {size} is not divisible by 2**{n}", axis=axis
            )
    h = concat_channels(a, b)
    for i in range(n):
        h = conv2d(h, d[f"down{i}.w"], d[f"down{i}.b"], stride=2, pad=1)
        if i > 0:
            h = instance_norm(h, d[f"down{i}.norm.g"], d[f"down{i}.norm.s"])
        h = leaky_relu(h, LEAK)
    h = conv2d(h, d["mid.w"], d["mid.b"], stride=1, pad=1)
    h = leaky_relu(instance_norm(h, d["mid.norm.g"], d["mid.norm.s"]), LEAK)
    return conv2d(h, d["out.w"], d["out.b"], stride=1, pad=1)


class PairDiscriminator:
    def __init__(self) -> None:
        self.m_params: Optional[DiscriminatorParams] = None

    @classmethod
    def from_params(cls, params: DiscriminatorParams) -> "PairDiscriminator":
        inst = cls()
        inst.set_params(params)
        return inst

    def set_params(self, params: DiscriminatorParams) -> None:
        self.m_params = params

    @property
    def params(self) -> DiscriminatorParams:
        if self.m_params is None:
            raise ContractError("discriminator has no parameters; use PairDiscriminator.from_params")
        return self.m_params

    def __call__(self, a: Tensor, b: Tensor) -> Tensor:
        return discriminator_forward(self.params, a, b)
