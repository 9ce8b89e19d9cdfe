"""
Numerical core: float64 tensors, a reverse-mode gradient tape, the
differentiable primitives, parameter sets with Adam, and finite-difference
gradient verification.
"""

from .gradcheck import (
    GRADCHECK_REGISTRY,
    GradcheckCase,
    GradcheckResult,
    check_case,
    numerical_gradient,
    relative_error,
    run_gradcheck,
)
from .ops import (
    add,
    concat_channels,
    conv2d,
    instance_norm,
    leaky_relu,
    mean_l1,
    mean_sq,
    min_pool2d,
    relu,
    scale,
    slice_channels,
    sum_all,
    tanh_unit,
    transposed_conv2d,
    weighted_sum,
)
from .optim import ParamSet, adam_step
from .tensor import FloatArray, Function, GradTape, Tensor, active_tape, backward, detach

__all__ = [
    "FloatArray",
    "Function",
    "GradTape",
    "Tensor",
    "active_tape",
    "backward",
    "detach",
    "ParamSet",
    "adam_step",
    "add",
    "concat_channels",
    "conv2d",
    "instance_norm",
    "leaky_relu",
    "mean_l1",
    "mean_sq",
    "min_pool2d",
    "relu",
    "scale",
    "slice_channels",
    "sum_all",
    "tanh_unit",
    "transposed_conv2d",
    "weighted_sum",
    "GRADCHECK_REGISTRY",
    "GradcheckCase",
    "GradcheckResult",
    "check_case",
    "numerical_gradient",
    "relative_error",
    "run_gradcheck",
]
