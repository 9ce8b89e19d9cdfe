"""
Shape losses: same-identity reconstruction and the two cross-identity
consistency terms.
"""

from __future__ import annotations

from fusion_gan.engine import Tensor, add, detach, mean_l1, scale
from fusion_gan.nets import Fuser

from .types import LossWeights


def shape_loss_s1(g: Fuser, x: Tensor, y: Tensor) -> Tensor:
    """``mean|y - G(x, y)|`` for a same-identity pair (the output should be ``y``)."""
    return mean_l1(y, g(x, y))


def shape_loss_s2a(g: Fuser, x: Tensor, y: Tensor, stop_grad_inner: bool = False) -> Tensor:
    """``mean|y - G(y, G(x, y))|``; with ``stop_grad_inner`` the inner call is constant."""
    inner = g(x, y)
    if stop_grad_inner:
        inner = detach(inner)
    return mean_l1(y, g(y, inner))


def shape_loss_s2b(g: Fuser, x: Tensor, y: Tensor, stop_grad_inner: bool = False) -> Tensor:
    """``mean|G(x, y) - G(G(x, y), y)|``; with ``stop_grad_inner`` only the outer
    call's inner argument is constant."""
    fused = g(x, y)
    inner = detach(fused) if stop_grad_inner else fused
    return mean_l1(fused, g(inner, y))


def total_shape_loss(
    g: Fuser,
    x: Tensor,
    y: Tensor,
    x2: Tensor,
    y2: Tensor,
    w: LossWeights,
    stop_grad_inner: bool = False,
) -> Tensor:
    """``L_S1(x2, y2) + alpha * (L_S2a(x, y) + L_S2b(x, y))``.

    ``(x2, y2)`` is a same-identity pair; ``(x, y)`` a cross-identity pair.
    """
    s1 = shape_loss_s1(g, x2, y2)
    cross = add(
        shape_loss_s2a(g, x, y, stop_grad_inner),
        shape_loss_s2b(g, x, y, stop_grad_inner),
    )
    return add(s1, scale(cross, w.alpha))
