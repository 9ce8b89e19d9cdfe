"""
Fusion objectives: identity (pair-adversarial) and shape losses.
"""

from .identity import FAKE, REAL, identity_loss_d, identity_loss_g, patch_objective
from .shape import shape_loss_s1, shape_loss_s2a, shape_loss_s2b, total_shape_loss
from .types import LossWeights

__all__ = [
    "LossWeights",
    "REAL",
    "FAKE",
    "identity_loss_d",
    "identity_loss_g",
    "patch_objective",
    "shape_loss_s1",
    "shape_loss_s2a",
    "shape_loss_s2b",
    "total_shape_loss",
]
