"""
Default training hyperparameters.

Collected in a class with class variables.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class Defaults:
    """Default values for TrainConfig."""

    N_SETS: int = 3
    N_PER_SET: int = 200
    RES: int = 32
    WIDTH: int = 16
    D_DOWNSAMPLES: int = 2
    POOL_K: int = 4

    ALPHA: float = 0.5
    BETA: float = 10.0
    LR_G: float = 2e-4
    LR_D: float = 1e-4
    BETA1: float = 0.5
    BETA2: float = 0.999
    ADAM_EPS: float = 1e-8

    ITERS: int = 3000
    SEED: int = 0
    MIN_PATCH: bool = True
    PHASE2_EVERY: int = 1
    FUSE_GENERATOR_UPDATES: bool = False
    LITERAL_MAX: bool = False
    STOP_GRAD_INNER: bool = False
    LOSS_TOGGLES: Dict[str, bool] = {"s1": True, "s2a": True, "s2b": True}

    LOG_EVERY: int = 50
    CHECKPOINT_EVERY: int = 500
    EVAL_EVERY: int = 0
    EVAL_SAMPLES: int = 16

    DATA_DIR: Optional[str] = None
    OUT_DIR: Optional[str] = None

    CONFIG_FILE: str = "fusion-gan-config.yaml"
    CONFIG_ENV: str = "FUSION_GAN_CONFIG"

    @classmethod
    def as_dict(cls) -> Dict[str, Any]:
        """Defaults keyed by TrainConfig field name."""
        return {
            "n_sets": cls.N_SETS,
            "n_per_set": cls.N_PER_SET,
            "res": cls.RES,
            "width": cls.WIDTH,
            "d_downsamples": cls.D_DOWNSAMPLES,
            "pool_k": cls.POOL_K,
            "alpha": cls.ALPHA,
            "beta": cls.BETA,
            "lr_g": cls.LR_G,
            "lr_d": cls.LR_D,
            "beta1": cls.BETA1,
            "beta2": cls.BETA2,
            "adam_eps": cls.ADAM_EPS,
            "iters": cls.ITERS,
            "seed": cls.SEED,
            "min_patch": cls.MIN_PATCH,
            "phase2_every": cls.PHASE2_EVERY,
            "fuse_generator_updates": cls.FUSE_GENERATOR_UPDATES,
            "literal_max": cls.LITERAL_MAX,
            "stop_grad_inner": cls.STOP_GRAD_INNER,
            "loss_toggles": dict(cls.LOSS_TOGGLES),
            "log_every": cls.LOG_EVERY,
            "checkpoint_every": cls.CHECKPOINT_EVERY,
            "eval_every": cls.EVAL_EVERY,
            "eval_samples": cls.EVAL_SAMPLES,
            "data_dir": cls.DATA_DIR,
            "out_dir": cls.OUT_DIR,
        }
