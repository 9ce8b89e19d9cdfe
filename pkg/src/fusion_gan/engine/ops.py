"""
Differentiable primitives used by the fusion networks and losses.

Convolutions are written as matrix products over im2col patch matrices on a
single ``(C, H, W)`` image. Every op here has a seeded finite-difference case in
:mod:`fusion_gan.engine.gradcheck`.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from fusion_gan.errors import ContractError, DimensionError

from .tensor import FloatArray, Function, Tensor

__all__ = [
    "im2col",
    "col2im",
    "conv2d",
    "transposed_conv2d",
    "leaky_relu",
    "relu",
    "tanh_unit",
    "instance_norm",
    "min_pool2d",
    "concat_channels",
    "slice_channels",
    "add",
    "scale",
    "sum_all",
    "weighted_sum",
    "mean_l1",
    "mean_sq",
]

Grads = Tuple[Optional[FloatArray], ...]


def _out_size(n: int, k: int, stride: int, pad: int) -> int:
    return (n + 2 * pad - k) // stride + 1


def im2col(x: FloatArray, kh: int, kw: int, stride: int, pad: int) -> Tuple[FloatArray, int, int]:
    """Unfold ``(C, H, W)`` into a ``(C*kh*kw, oh*ow)`` patch matrix (zero padding)."""
    c, h, w = x.shape
    oh = _out_size(h, kh, stride, pad)
    ow = _out_size(w, kw, stride, pad)
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad))) if pad else x
    col = np.empty((c, kh, kw, oh, ow), dtype=np.float64)
    for i in range(kh):
        i_max = i + stride * oh
        for j in range(kw):
            j_max = j + stride * ow
            col[:, i, j] = xp[:, i:i_max:stride, j:j_max:stride]
    return col.reshape(c * kh * kw, oh * ow), oh, ow


def col2im(
    cols: FloatArray, shape: Tuple[int, int, int], kh: int, kw: int, stride: int, pad: int
) -> FloatArray:
    """Fold a patch matrix back onto a ``(C, H, W)`` image, summing overlaps."""
    c, h, w = shape
    oh = _out_size(h, kh, stride, pad)
    ow = _out_size(w, kw, stride, pad)
    col = cols.reshape(c, kh, kw, oh, ow)
    img = np.zeros((c, h + 2 * pad, w + 2 * pad), dtype=np.float64)
    for i in range(kh):
        i_max = i + stride * oh
        for j in range(kw):
            j_max = j + stride * ow
            img[:, i:i_max:stride, j:j_max:stride] += col[:, i, j]
    return img[:, pad : pad + h, pad : pad + w]


def _check_image(x: FloatArray, op: str) -> None:
    if x.ndim != 3:
        raise DimensionError(f"{op}: expected a (C, H, W) input, got shape {x.shape}", axis="rank")


def _check_conv_args(
    op: str, x: FloatArray, kernel: FloatArray, bias: FloatArray, in_axis: int, out_axis: int,
    stride: int, pad: int,
) -> None:
    _check_image(x, op)
    if kernel.ndim != 4:
        raise DimensionError(f"{op}: kernel must be 4-D, got shape {kernel.shape}", axis="kernel")
    if stride < 1:
        raise ContractError(f"{op}: stride must be >= 1, got {stride}")
    if pad < 0:
        raise ContractError(f"{op}: pad must be >= 0, got {pad}")
    if kernel.shape[in_axis] != x.shape[0]:
        raise DimensionError(
            f"{op}: channels axis mismatch, input has {x.shape[0]} but kernel expects {kernel.shape[in_axis]}",
            axis="channels",
        )
    if bias.shape != (kernel.shape[out_axis],):
        raise DimensionError(
            f"{op}: bias must have shape ({kernel.shape[out_axis]},), got {bias.shape}", axis="bias"
        )
    if in_axis == 0:
        return
    kh, kw = kernel.shape[2], kernel.shape[3]
    if kh > x.shape[1] + 2 * pad:
        raise DimensionError(f"{op}: kernel height {kh} exceeds padded input height", axis="height")
    if kw > x.shape[2] + 2 * pad:
        raise DimensionError(f"{op}: kernel width {kw} exceeds padded input width", axis="width")


class Conv2d(Function):
    name = "conv2d"

    def forward(  # type: ignore[override]
        self, x: FloatArray, kernel: FloatArray, bias: FloatArray, *, stride: int, pad: int
    ) -> FloatArray:
        _check_conv_args(self.name, x, kernel, bias, 1, 0, stride, pad)
        f, _, kh, kw = kernel.shape
        cols, oh, ow = im2col(x, kh, kw, stride, pad)
        kmat = kernel.reshape(f, -1)
        self.saved = (x.shape, kernel.shape, cols, kmat, stride, pad)
        return (kmat @ cols + bias[:, None]).reshape(f, oh, ow)

    def backward(self, grad: FloatArray) -> Grads:
        x_shape, k_shape, cols, kmat, stride, pad = self.saved
        g = grad.reshape(k_shape[0], -1)
        dkernel = (g @ cols.T).reshape(k_shape)
        dbias = g.sum(axis=1)
        dx = col2im(kmat.T @ g, x_shape, k_shape[2], k_shape[3], stride, pad)
        return dx, dkernel, dbias


class TransposedConv2d(Function):
    name = "transposed_conv2d"

    def forward(  # type: ignore[override]
        self, x: FloatArray, kernel: FloatArray, bias: FloatArray, *, stride: int, pad: int
    ) -> FloatArray:
        _check_conv_args(self.name, x, kernel, bias, 0, 1, stride, pad)
        c, h, w = x.shape
        _, f, kh, kw = kernel.shape
        out_h = (h - 1) * stride - 2 * pad + kh
        out_w = (w - 1) * stride - 2 * pad + kw
        if out_h < 1:
            raise DimensionError(f"{self.name}: output height {out_h} is not positive", axis="height")
        if out_w < 1:
            raise DimensionError(f"{self.name}: output width {out_w} is not positive", axis="width")
        kmat = kernel.reshape(c, f * kh * kw)
        self.saved = (x, kernel.shape, kmat, stride, pad)
        cols = kmat.T @ x.reshape(c, h * w)
        out = col2im(cols, (f, out_h, out_w), kh, kw, stride, pad)
        return out + bias[:, None, None]

    def backward(self, grad: FloatArray) -> Grads:
        x, k_shape, kmat, stride, pad = self.saved
        c, h, w = x.shape
        gcols, _, _ = im2col(grad, k_shape[2], k_shape[3], stride, pad)
        dx = (kmat @ gcols).reshape(c, h, w)
        dkernel = (x.reshape(c, -1) @ gcols.T).reshape(k_shape)
        dbias = grad.sum(axis=(1, 2))
        return dx, dkernel, dbias


class LeakyRelu(Function):
    name = "leaky_relu"

    def forward(self, x: FloatArray, *, slope: float) -> FloatArray:  # type: ignore[override]
        if not 0.0 <= slope < 1.0:
            raise ContractError(f"{self.name}: slope must be in [0, 1), got {slope}")
        self.factor = np.where(x > 0, 1.0, slope)
        return x * self.factor

    def backward(self, grad: FloatArray) -> Grads:
        return (grad * self.factor,)


class TanhUnit(Function):
    """tanh rescaled to [0, 1]: ``(tanh(x) + 1) / 2``."""

    name = "tanh_unit"

    def forward(self, x: FloatArray) -> FloatArray:  # type: ignore[override]
        self.t = np.tanh(x)
        return 0.5 * (self.t + 1.0)

    def backward(self, grad: FloatArray) -> Grads:
        return (grad * 0.5 * (1.0 - self.t * self.t),)


class InstanceNorm(Function):
    name = "instance_norm"

    def forward(  # type: ignore[override]
        self, x: FloatArray, gain: FloatArray, shift: FloatArray, *, eps: float
    ) -> FloatArray:
        _check_image(x, self.name)
        c, h, w = x.shape
        if gain.shape != (c,) or shift.shape != (c,):
            raise DimensionError(
                f"{self.name}: gain/shift must have shape ({c},), got {gain.shape}/{shift.shape}",
                axis="channels",
            )
        if h * w < 2:
            raise ContractError(f"{self.name}: needs at least 2 spatial elements, got {h}x{w}")
        if eps <= 0:
            raise ContractError(f"{self.name}: eps must be positive, got {eps}")
        mu = x.mean(axis=(1, 2), keepdims=True)
        var = x.var(axis=(1, 2), keepdims=True)
        inv_std = 1.0 / np.sqrt(var + eps)
        xhat = (x - mu) * inv_std
        self.saved = (xhat, inv_std, gain)
        return gain[:, None, None] * xhat + shift[:, None, None]

    def backward(self, grad: FloatArray) -> Grads:
        xhat, inv_std, gain = self.saved
        n = xhat.shape[1] * xhat.shape[2]
        dxhat = grad * gain[:, None, None]
        dx = (inv_std / n) * (
            n * dxhat
            - dxhat.sum(axis=(1, 2), keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=(1, 2), keepdims=True)
        )
        dgain = (grad * xhat).sum(axis=(1, 2))
        dshift = grad.sum(axis=(1, 2))
        return dx, dgain, dshift


class MinPool2d(Function):
    """Non-overlapping k x k minimum pooling; ties go to the first element in row-major order."""

    name = "min_pool2d"

    def forward(self, x: FloatArray, *, k: int) -> FloatArray:  # type: ignore[override]
        _check_image(x, self.name)
        c, h, w = x.shape
        if k < 1:
            raise ContractError(f"{self.name}: pool size must be >= 1, got {k}")
        if h % k:
            raise DimensionError(f"{self.name}: height {h} is not divisible by {k}", axis="height")
        if w % k:
            raise DimensionError(f"{self.name}: width {w} is not divisible by {k}", axis="width")
        oh, ow = h // k, w // k
        windows = x.reshape(c, oh, k, ow, k).transpose(0, 1, 3, 2, 4).reshape(c, oh, ow, k * k)
        idx = windows.argmin(axis=-1)
        self.saved = (x.shape, k, idx)
        return np.take_along_axis(windows, idx[..., None], axis=-1)[..., 0]

    def backward(self, grad: FloatArray) -> Grads:
        (c, h, w), k, idx = self.saved
        oh, ow = h // k, w // k
        gw = np.zeros((c, oh, ow, k * k), dtype=np.float64)
        np.put_along_axis(gw, idx[..., None], grad[..., None], axis=-1)
        return (gw.reshape(c, oh, ow, k, k).transpose(0, 1, 3, 2, 4).reshape(c, h, w),)


class ConcatChannels(Function):
    name = "concat_channels"

    def forward(self, a: FloatArray, b: FloatArray) -> FloatArray:  # type: ignore[override]
        _check_image(a, self.name)
        _check_image(b, self.name)
        if a.shape[1] != b.shape[1]:
            raise DimensionError(f"{self.name}: height mismatch {a.shape[1]} vs {b.shape[1]}", axis="height")
        if a.shape[2] != b.shape[2]:
            raise DimensionError(f"{self.name}: width mismatch {a.shape[2]} vs {b.shape[2]}", axis="width")
        self.split = a.shape[0]
        return np.concatenate([a, b], axis=0)

    def backward(self, grad: FloatArray) -> Grads:
        return grad[: self.split], grad[self.split :]


class SliceChannels(Function):
    name = "slice_channels"

    def forward(self, x: FloatArray, *, start: int, stop: int) -> FloatArray:  # type: ignore[override]
        _check_image(x, self.name)
        if not 0 <= start < stop <= x.shape[0]:
            raise DimensionError(
                f"{self.name}: channel range [{start}, {stop}) outside 0..{x.shape[0]}", axis="channels"
            )
        self.saved = (x.shape, start, stop)
        return x[start:stop].copy()

    def backward(self, grad: FloatArray) -> Grads:
        shape, start, stop = self.saved
        dx = np.zeros(shape, dtype=np.float64)
        dx[start:stop] = grad
        return (dx,)


class Add(Function):
    name = "add"

    def forward(self, a: FloatArray, b: FloatArray) -> FloatArray:  # type: ignore[override]
        if a.shape != b.shape:
            raise DimensionError(f"{self.name}: shape mismatch {a.shape} vs {b.shape}", axis="shape")
        return a + b

    def backward(self, grad: FloatArray) -> Grads:
        return grad, grad


class Scale(Function):
    name = "scale"

    def forward(self, x: FloatArray, *, factor: float) -> FloatArray:  # type: ignore[override]
        self.factor = float(factor)
        return x * self.factor

    def backward(self, grad: FloatArray) -> Grads:
        return (grad * self.factor,)


class SumAll(Function):
    name = "sum_all"

    def forward(self, x: FloatArray) -> FloatArray:  # type: ignore[override]
        self.shape = x.shape
        return np.array(x.sum(), dtype=np.float64)

    def backward(self, grad: FloatArray) -> Grads:
        return (np.broadcast_to(grad, self.shape).copy(),)


class WeightedSum(Function):
    """Projection ``sum(x * weights)`` onto a fixed weight array."""

    name = "weighted_sum"

    def forward(self, x: FloatArray, *, weights: FloatArray) -> FloatArray:  # type: ignore[override]
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != x.shape:
            raise DimensionError(f"{self.name}: weights shape {w.shape} vs input {x.shape}", axis="shape")
        self.weights = w
        return np.array((x * w).sum(), dtype=np.float64)

    def backward(self, grad: FloatArray) -> Grads:
        return (grad * self.weights,)


class MeanL1(Function):
    name = "mean_l1"

    def forward(self, a: FloatArray, b: FloatArray) -> FloatArray:  # type: ignore[override]
        if a.shape != b.shape:
            raise DimensionError(f"{self.name}: shape mismatch {a.shape} vs {b.shape}", axis="shape")
        d = a - b
        self.sign = np.sign(d)
        return np.array(np.abs(d).mean(), dtype=np.float64)

    def backward(self, grad: FloatArray) -> Grads:
        g = self.sign * (grad / self.sign.size)
        return g, -g


class MeanSq(Function):
    name = "mean_sq"

    def forward(self, a: FloatArray, *, target: float) -> FloatArray:  # type: ignore[override]
        self.diff = a - float(target)
        return np.array((self.diff * self.diff).mean(), dtype=np.float64)

    def backward(self, grad: FloatArray) -> Grads:
        return (2.0 * self.diff * (grad / self.diff.size),)


def conv2d(input: Tensor, kernel: Tensor, bias: Tensor, stride: int = 1, pad: int = 0) -> Tensor:
    """2-D cross-correlation of a ``(C, H, W)`` input with an ``(F, C, kh, kw)`` kernel.

    Output spatial size is ``floor((H + 2*pad - kh) / stride) + 1`` (same for W).

    Raises
    ------
    DimensionError
        On shape mismatch; ``axis`` names the offending axis.
    """
    return Conv2d.apply(input, kernel, bias, stride=stride, pad=pad)


def transposed_conv2d(
    input: Tensor, kernel: Tensor, bias: Tensor, stride: int = 1, pad: int = 0
) -> Tensor:
    """Adjoint of :func:`conv2d`: ``(C, H, W)`` with a ``(C, F, kh, kw)`` kernel.

    Output size is ``(H - 1)*stride - 2*pad + kh``. The gradient with respect to
    the input equals :func:`conv2d` of the output gradient with the same kernel.
    """
    return TransposedConv2d.apply(input, kernel, bias, stride=stride, pad=pad)


def leaky_relu(input: Tensor, slope: float = 0.2) -> Tensor:
    """Elementwise ``max(v, slope*v)``; at 0 the negative branch is used."""
    return LeakyRelu.apply(input, slope=slope)


def relu(input: Tensor) -> Tensor:
    return LeakyRelu.apply(input, slope=0.0)


def tanh_unit(input: Tensor) -> Tensor:
    """tanh squashed into [0, 1]."""
    return TanhUnit.apply(input)


def instance_norm(input: Tensor, gain: Tensor, shift: Tensor, eps: float = 1e-5) -> Tensor:
    """Per-channel zero-mean unit-variance normalisation followed by ``gain*x + shift``."""
    return InstanceNorm.apply(input, gain, shift, eps=eps)


def min_pool2d(input: Tensor, k: int) -> Tensor:
    """Minimum over non-overlapping ``k x k`` windows (stride ``k``).

    Backward routes the gradient only to the argmin of each window.
    """
    return MinPool2d.apply(input, k=k)


def concat_channels(a: Tensor, b: Tensor) -> Tensor:
    return ConcatChannels.apply(a, b)


def slice_channels(input: Tensor, start: int, stop: int) -> Tensor:
    return SliceChannels.apply(input, start=start, stop=stop)


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def scale(input: Tensor, factor: float) -> Tensor:
    return Scale.apply(input, factor=factor)


def sum_all(input: Tensor) -> Tensor:
    return SumAll.apply(input)


def weighted_sum(input: Tensor, weights: FloatArray) -> Tensor:
    return WeightedSum.apply(input, weights=weights)


def mean_l1(a: Tensor, b: Tensor) -> Tensor:
    """Mean absolute difference; subgradient 0 where ``a == b``."""
    return MeanL1.apply(a, b)


def mean_sq(a: Tensor, target: float) -> Tensor:
    """Mean squared deviation of ``a`` from the constant ``target``."""
    return MeanSq.apply(a, target=target)
