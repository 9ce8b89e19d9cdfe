"""
fusion-gan: desk-scale identity/shape image fusion with a from-scratch
autodiff engine.
"""

from __future__ import annotations

from .nets import FusionGenerator, PairDiscriminator
from .train import FusionTrainer, TrainConfig, train

__all__ = ["FusionGenerator", "PairDiscriminator", "FusionTrainer", "TrainConfig", "train", "__version__"]

__version__ = "0.1.0"
