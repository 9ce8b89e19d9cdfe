"""
Two-branch fusion generator.

Each input passes its own encoder branch (7x7 stride-1 conv, two 3x3 stride-2
convs, two residual blocks). The branch outputs are concatenated and pass a
shared trunk of two residual blocks, then two 4x4 stride-2 transposed convs.
The stride-1 feature maps of both branches are concatenated, projected by a
1x1 conv and joined to the last decoder stage (U-Net style skip) before the
7x7 output conv and the [0, 1] squashing.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from fusion_gan.engine import (
    ParamSet,
    Tensor,
    add,
    concat_channels,
    conv2d,
    instance_norm,
    relu,
    tanh_unit,
    transposed_conv2d,
)
from fusion_gan.errors import ContractError, DimensionError

from .types import GeneratorParams, LayerSpec, NetConfig

BRANCHES = ("branch_x", "branch_y")


def _res_block_layout(prefix: str, ch: int) -> List[LayerSpec]:
    return [
        LayerSpec("conv", f"{prefix}.conv_a", ch, ch, 3),
        LayerSpec("norm", f"{prefix}.norm_a", ch, ch),
        LayerSpec("conv", f"{prefix}.conv_b", ch, ch, 3),
        LayerSpec("norm", f"{prefix}.norm_b", ch, ch),
    ]


def generator_layout(cfg: NetConfig) -> List[LayerSpec]:
    """Ordered layer list; parameter names and init order follow it."""
    w = cfg.width
    layout: List[LayerSpec] = []
    for br in BRANCHES:
        layout += [
            LayerSpec("conv", f"{br}.conv1", 3, w, 7),
            LayerSpec("norm", f"{br}.norm1", w, w),
            LayerSpec("conv", f"{br}.conv2", w, 2 * w, 3),
            LayerSpec("norm", f"{br}.norm2", 2 * w, 2 * w),
            LayerSpec("conv", f"{br}.conv3", 2 * w, 2 * w, 3),
            LayerSpec("norm", f"{br}.norm3", 2 * w, 2 * w),
        ]
        layout += _res_block_layout(f"{br}.res1", 2 * w)
        layout += _res_block_layout(f"{br}.res2", 2 * w)
    layout += _res_block_layout("trunk.res1", 4 * w)
    layout += _res_block_layout("trunk.res2", 4 * w)
    layout += [
        LayerSpec("tconv", "decoder.up1", 4 * w, 2 * w, 4),
        LayerSpec("norm", "decoder.norm1", 2 * w, 2 * w),
        LayerSpec("tconv", "decoder.up2", 2 * w, w, 4),
        LayerSpec("norm", "decoder.norm2", w, w),
        LayerSpec("conv", "decoder.skip", 2 * w, w, 1),
        LayerSpec("conv", "decoder.out", 2 * w, 3, 7),
    ]
    return layout


def _conv(p: ParamSet, name: str, x: Tensor, stride: int, pad: int) -> Tensor:
    return conv2d(x, p[f"{name}.w"], p[f"{name}.b"], stride=stride, pad=pad)


def _norm(p: ParamSet, name: str, x: Tensor) -> Tensor:
    return instance_norm(x, p[f"{name}.g"], p[f"{name}.s"])


def residual_block(p: ParamSet, prefix: str, h: Tensor) -> Tensor:
    """conv3x3 -> norm -> ReLU -> conv3x3 -> norm, plus the identity skip."""
    t = relu(_norm(p, f"{prefix}.norm_a", _conv(p, f"{prefix}.conv_a", h, 1, 1)))
    t = _norm(p, f"{prefix}.norm_b", _conv(p, f"{prefix}.conv_b", t, 1, 1))
    return add(h, t)


def encode_branch(p: ParamSet, branch: str, x: Tensor) -> Tuple[Tensor, Tensor]:
    """Run one encoder branch; returns (stride-1 features, encoded features)."""
    h1 = relu(_norm(p, f"{branch}.norm1", _conv(p, f"{branch}.conv1", x, 1, 3)))
    h = relu(_norm(p, f"{branch}.norm2", _conv(p, f"{branch}.conv2", h1, 2, 1)))
    h = relu(_norm(p, f"{branch}.norm3", _conv(p, f"{branch}.conv3", h, 2, 1)))
    h = residual_block(p, f"{branch}.res1", h)
    h = residual_block(p, f"{branch}.res2", h)
    return h1, h


def check_image_pair(x: Tensor, y: Tensor) -> None:
    if len(x.shape) != 3 or x.shape[0] != 3:
        raise DimensionError(f"expected a (3, H, W) image, got {x.shape}", axis="channels")
    if x.shape != y.shape:
        axis = "channels" if x.shape[0] != y.shape[0] else "height" if x.shape[1] != y.shape[1] else "width"
        raise DimensionError(f"input images differ in shape: {x.shape} vs {y.shape}", axis=axis)


def generator_forward(p: GeneratorParams, x: Tensor, y: Tensor) -> Tensor:
    """Fuse ``x``'s identity with ``y``'s shape.

    Parameters
    ----------
    p : GeneratorParams
        Generator weights.
    x, y : Tensor
        ``(3, H, W)`` images in [0, 1]; ``H`` and ``W`` powers of two >= 16.

    Returns
    -------
    Tensor
        ``(3, H, W)`` image in [0, 1].

    Raises
    ------
    DimensionError
        If ``x`` and ``y`` differ in shape or the size cannot round-trip the
        two stride-2 stages.
    """
    check_image_pair(x, y)
    for axis, n in (("height", x.shape[1]), ("width", x.shape[2])):
        if n < 16 or n & (n - 1):
            raise DimensionError(f"generator {axis} must be a power of two >= 16, got {n}", axis=axis)
    x1, hx = encode_branch(p, "branch_x", x)
    y1, hy = encode_branch(p, "branch_y", y)
    z = concat_channels(hx, hy)
    z = residual_block(p, "trunk.res1", z)
    z = residual_block(p, "trunk.res2", z)
    u = transposed_conv2d(z, p["decoder.up1.w"], p["decoder.up1.b"], stride=2, pad=1)
    u = relu(_norm(p, "decoder.norm1", u))
    u = transposed_conv2d(u, p["decoder.up2.w"], p["decoder.up2.b"], stride=2, pad=1)
    u = relu(_norm(p, "decoder.norm2", u))
    skip = _conv(p, "decoder.skip", concat_channels(x1, y1), 1, 0)
    return tanh_unit(_conv(p, "decoder.out", concat_channels(u, skip), 1, 3))


class FusionGenerator:
    """Callable generator bound to a parameter set.

    Use :meth:`from_params` to construct.
    """

    def __init__(self) -> None:
        self.m_params: Optional[GeneratorParams] = None

    @classmethod
    def from_params(cls, params: GeneratorParams) -> "FusionGenerator":
        inst = cls()
        inst.set_params(params)
        return inst

    def set_params(self, params: GeneratorParams) -> None:
        self.m_params = params

    @property
    def params(self) -> GeneratorParams:
        if self.m_params is None:
            raise ContractError("generator has no parameters; use FusionGenerator.from_params")
        return self.m_params

    def __call__(self, x: Tensor, y: Tensor) -> Tensor:
        return generator_forward(self.params, x, y)
