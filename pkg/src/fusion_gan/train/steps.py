"""
The two training phases.

Phase I (cross-identity pair) runs three updates in order: generator on the
identity loss, discriminator on the identity loss, generator on the weighted
cross-identity shape losses. Phase II (same-identity pair) runs one generator
update on the weighted reconstruction loss. Each recorded loss is measured
immediately before its own update.
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional

from fusion_gan.data import FusionSample
from fusion_gan.engine import GradTape, ParamSet, Tensor, adam_step, add, detach, scale
from fusion_gan.errors import ContractError, NonFiniteLossError
from fusion_gan.losses import (
    identity_loss_d,
    identity_loss_g,
    shape_loss_s1,
    shape_loss_s2a,
    shape_loss_s2b,
)
from fusion_gan.nets import Critic, Fuser

from .types import StepLosses, TrainConfig

logger = logging.getLogger(__name__)


def _finite(term: str, value: Tensor, iteration: int) -> float:
    v = value.item()
    if not math.isfinite(v):
        raise NonFiniteLossError(term, iteration, v)
    return v


def apply_update(tape: GradTape, loss: Optional[Tensor], params: ParamSet, lr: float, cfg: TrainConfig) -> bool:
    """Backpropagate ``loss`` and take one Adam step on ``params``.

    Skipped (returns ``False``) when there is nothing to optimise: no loss,
    or a loss that no parameter influences (parameter-free fusers).
    """
    if loss is None or not loss.requires_grad or len(params) == 0:
        return False
    params.zero_grad()
    tape.backward(loss)
    adam_step(params, lr=lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.adam_eps)
    return True


def _weighted_sum(terms: List[Tensor], weight: float) -> Optional[Tensor]:
    if not terms or weight == 0.0:
        return None
    total = terms[0]
    for t in terms[1:]:
        total = add(total, t)
    return scale(total, weight)


def train_step_phase1(
    g: Fuser, d: Critic, sample: FusionSample, cfg: TrainConfig, iteration: int = 0
) -> StepLosses:
    """Cross-identity step: G identity update, D identity update, G shape update.

    Parameters
    ----------
    g, d : Fuser, Critic
        Generator and discriminator; updated in place.
    sample : FusionSample
        Cross-identity pair with ``x_hat`` from x's set.
    cfg : TrainConfig
        Weights, toggles, learning rates and algorithm variants.
    iteration : int
        Used in non-finite diagnostics.

    Returns
    -------
    StepLosses
        ``identity_g``, ``identity_d``, ``s2a``, ``s2b``.

    Raises
    ------
    ContractError
        If the sample is same-identity or has no ``x_hat``.
    NonFiniteLossError
        If a loss is NaN or infinite (checked before its update).
    """
    if sample.same_identity:
        raise ContractError("phase I needs a cross-identity sample")
    if sample.x_hat is None:
        raise ContractError("phase I needs x_hat, another image of x's set")
    x, y, x_hat = Tensor(sample.x), Tensor(sample.y), Tensor(sample.x_hat)
    toggles = cfg.loss_toggles
    shape_weight = cfg.beta * cfg.alpha

    # (1) generator, identity loss through a frozen discriminator
    with GradTape() as tape:
        fake = g(x, y)
        loss_ig = identity_loss_g(d, x, fake, cfg.min_patch, cfg.pool_k, cfg.literal_max)
        identity_g = _finite("identity_g", loss_ig, iteration)
        total = loss_ig
        s2a_v = s2b_v = None
        if cfg.fuse_generator_updates:
            s2a = shape_loss_s2a(g, x, y, cfg.stop_grad_inner)
            s2b = shape_loss_s2b(g, x, y, cfg.stop_grad_inner)
            s2a_v = _finite("s2a", s2a, iteration)
            s2b_v = _finite("s2b", s2b, iteration)
            shape = _weighted_sum([t for t, on in ((s2a, toggles.s2a), (s2b, toggles.s2b)) if on], shape_weight)
            if shape is not None:
                total = add(loss_ig, shape)
        apply_update(tape, total, g.params, cfg.lr_g, cfg)

    # (2) discriminator on the pre-update fake
    with GradTape() as tape:
        loss_d = identity_loss_d(d, x, x_hat, detach(fake))
        identity_d = _finite("identity_d", loss_d, iteration)
        apply_update(tape, loss_d, d.params, cfg.lr_d, cfg)

    # (3) generator, cross-identity shape losses
    if not cfg.fuse_generator_updates:
        with GradTape() as tape:
            s2a = shape_loss_s2a(g, x, y, cfg.stop_grad_inner)
            s2b = shape_loss_s2b(g, x, y, cfg.stop_grad_inner)
            s2a_v = _finite("s2a", s2a, iteration)
            s2b_v = _finite("s2b", s2b, iteration)
            shape = _weighted_sum([t for t, on in ((s2a, toggles.s2a), (s2b, toggles.s2b)) if on], shape_weight)
            apply_update(tape, shape, g.params, cfg.lr_g, cfg)

    return StepLosses(identity_g=identity_g, identity_d=identity_d, s2a=s2a_v, s2b=s2b_v)


def train_step_phase2(g: Fuser, sample: FusionSample, cfg: TrainConfig, iteration: int = 0) -> StepLosses:
    """Same-identity step: one generator update on ``beta * L_S1``.

    Raises
    ------
    ContractError
        If the sample is cross-identity.
    NonFiniteLossError
        If the loss is NaN or infinite.
    """
    if not sample.same_identity:
        raise ContractError("phase II needs a same-identity sample")
    x, y = Tensor(sample.x), Tensor(sample.y)
    with GradTape() as tape:
        s1 = shape_loss_s1(g, x, y)
        s1_v = _finite("s1", s1, iteration)
        loss = _weighted_sum([s1] if cfg.loss_toggles.s1 else [], cfg.beta)
        apply_update(tape, loss, g.params, cfg.lr_g, cfg)
    return StepLosses(s1=s1_v)
