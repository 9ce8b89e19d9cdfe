"""
FusionTrainer runs the alternating two-phase training loop.

Follows the project's service-class guide: no-arg constructor, m_-prefixed
members, factory methods, strong typing, and NumPy-style docstrings.

Artifacts under ``out_dir`` (nothing is written when it is ``None``)::

    out_dir/history.jsonl                   one record per logged step
    out_dir/checkpoints/ckpt_<iter>.json    on schedule and at the final step
"""

from __future__ import annotations

import logging
import os
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from fusion_gan.data import (
    FusionSample,
    IdentitySet,
    generate_sets,
    load_image_dirs,
    make_holdout_samples,
    sample_pair,
)
from fusion_gan.errors import CheckpointError, ConfigError, DataError
from fusion_gan.evaluate import oracle_l1
from fusion_gan.nets import (
    DiscriminatorParams,
    FusionGenerator,
    GeneratorParams,
    PairDiscriminator,
    init_params,
)

from .checkpoint import load_checkpoint, save_checkpoint
from .steps import train_step_phase1, train_step_phase2
from .types import HistoryRecord, StepLosses, TrainConfig, TrainHistory

logger = logging.getLogger(__name__)

# Pair sampling draws from its own stream, separate from dataset rendering
# (seed, set, index) and held-out samples.
TRAIN_STREAM = 0x54524149
HISTORY_FILE = "history.jsonl"
CHECKPOINT_DIR = "checkpoints"


def checkpoint_name(iteration: int) -> str:
    return f"ckpt_{iteration:06d}.json"


def load_training_sets(cfg: TrainConfig) -> List[IdentitySet]:
    """Sets named by ``cfg``: the dataset directory, or freshly generated ones.

    Raises
    ------
    ConfigError
        If directory images do not match ``cfg.res``.
    DataError
        If the directory cannot be read, or a set holds fewer than two images
        (phase I draws a second image of x's set for the real pair).
    """
    if cfg.data_dir is None:
        return generate_sets(cfg.n_sets, cfg.n_per_set, cfg.res, cfg.seed)
    sets = load_image_dirs(cfg.data_dir)
    if sets[0].res != cfg.res:
        raise ConfigError(f"images in {cfg.data_dir} are {sets[0].res}px but res is {cfg.res}")
    for s in sets:
        if len(s.images) < 2:
            path = os.path.join(cfg.data_dir, s.label)
            raise DataError(f"set {s.label} holds {len(s.images)} image; training needs at least 2 per set", path=path)
    return sets


class FusionTrainer:
    """
    Stateful trainer for one generator/discriminator pair.

    Attributes
    ----------
    m_config : TrainConfig or None
        Effective configuration.
    m_generator, m_discriminator : FusionGenerator, PairDiscriminator
        Networks updated in place.
    m_sets : list of IdentitySet
        Training data.
    m_rng : numpy.random.Generator or None
        Pair-sampling stream; saved in checkpoints.
    m_history : TrainHistory
        Logged records so far.
    m_iteration : int
        Last completed iteration.
    m_checkpoints : list of str
        Checkpoint files written by this trainer.
    """

    def __init__(self) -> None:
        self.m_config: Optional[TrainConfig] = None
        self.m_generator = FusionGenerator()
        self.m_discriminator = PairDiscriminator()
        self.m_sets: List[IdentitySet] = []
        self.m_rng: Optional[np.random.Generator] = None
        self.m_history = TrainHistory()
        self.m_iteration = 0
        self.m_checkpoints: List[str] = []
        self.m_holdout: Optional[List[FusionSample]] = None

    @property
    def config(self) -> Optional[TrainConfig]:
        return self.m_config

    @property
    def generator(self) -> FusionGenerator:
        return self.m_generator

    @property
    def discriminator(self) -> PairDiscriminator:
        return self.m_discriminator

    @property
    def history(self) -> TrainHistory:
        return self.m_history

    @property
    def iteration(self) -> int:
        return self.m_iteration

    @property
    def checkpoints(self) -> List[str]:
        return list(self.m_checkpoints)

    @property
    def history_path(self) -> Optional[str]:
        if self.m_config is None or self.m_config.out_dir is None:
            return None
        return os.path.join(self.m_config.out_dir, HISTORY_FILE)

    def set_sets(self, sets: Sequence[IdentitySet]) -> None:
        if len(sets) < 2:
            raise ConfigError(f"training needs at least 2 identity sets, got {len(sets)}")
        for s in sets:
            if len(s.images) < 2:
                raise DataError(f"set {s.label} holds {len(s.images)} image; training needs at least 2 per set")
        self.m_sets = list(sets)
        self.m_holdout = None

    @classmethod
    def from_config(
        cls, cfg: TrainConfig, sets: Optional[Sequence[IdentitySet]] = None
    ) -> "FusionTrainer":
        """Fresh trainer with seeded initial parameters.

        Parameters
        ----------
        cfg : TrainConfig
            Effective configuration.
        sets : sequence of IdentitySet, optional
            Training data; loaded or generated from ``cfg`` when omitted.
        """
        inst = cls()
        inst.m_config = cfg
        inst.set_sets(sets if sets is not None else load_training_sets(cfg))
        g, d = init_params(cfg.seed, cfg.net_config)
        inst.m_generator.set_params(g)
        inst.m_discriminator.set_params(d)
        inst.m_rng = np.random.default_rng([cfg.seed, TRAIN_STREAM])
        return inst

    @classmethod
    def resume(
        cls,
        path: str,
        *,
        out_dir: Optional[str] = None,
        overrides: Optional[Dict[str, Any]] = None,
        sets: Optional[Sequence[IdentitySet]] = None,
    ) -> "FusionTrainer":
        """Trainer restored from a checkpoint, ready to continue.

        The configuration comes from the checkpoint; ``overrides`` (e.g. a
        larger ``iters``) are applied on top. When ``out_dir`` holds a history
        file, records after the checkpoint's iteration are dropped.

        Raises
        ------
        CheckpointError
            If the checkpoint cannot be loaded or carries no config.
        """
        ckpt = load_checkpoint(path)
        if ckpt.config is None:
            raise CheckpointError(f"checkpoint {path} carries no training config; cannot resume")
        data: Dict[str, Any] = dict(ckpt.config)
        data["out_dir"] = out_dir
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        cfg = TrainConfig.model_validate(data)
        inst = cls()
        inst.m_config = cfg
        inst.set_sets(sets if sets is not None else load_training_sets(cfg))
        inst.m_generator.set_params(ckpt.generator)
        inst.m_discriminator.set_params(ckpt.discriminator)
        rng = np.random.default_rng([cfg.seed, TRAIN_STREAM])
        if ckpt.rng_state is not None:
            rng.bit_generator.state = ckpt.rng_state
        inst.m_rng = rng
        inst.m_iteration = ckpt.iteration
        hist_path = inst.history_path
        if hist_path is not None and os.path.isfile(hist_path):
            with open(hist_path, "r", encoding="utf-8") as f:
                inst.m_history = TrainHistory.from_lines(f.readlines())
            inst.m_history.truncate(ckpt.iteration)
        logger.info("resumed from %s at iteration %d", path, ckpt.iteration)
        return inst

    # ------------------------------------------------------------------
    # loop
    # ------------------------------------------------------------------
    def _holdout(self) -> List[FusionSample]:
        assert self.m_config is not None
        if self.m_holdout is None:
            cfg = self.m_config
            self.m_holdout = make_holdout_samples(self.m_sets, cfg.eval_samples, cfg.seed)
        return self.m_holdout

    def _write_history_file(self) -> None:
        path = self.history_path
        if path is None:
            return
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                for rec in self.m_history:
                    f.write(TrainHistory.to_line(rec) + "\n")
        except OSError as e:
            raise DataError(f"cannot write history: {e}", path=path) from e

    def _append_history(self, record: HistoryRecord) -> None:
        self.m_history.append(record)
        path = self.history_path
        if path is None:
            return
        try:
            with open(path, "a", encoding="utf-8") as f:
                f.write(TrainHistory.to_line(record) + "\n")
        except OSError as e:
            raise DataError(f"cannot append history: {e}", path=path) from e

    def save(self, path: Optional[str] = None) -> str:
        """Checkpoint the current state; defaults to the scheduled file name.

        Raises
        ------
        ConfigError
            If no path is given and the config has no ``out_dir``.
        """
        cfg = self.m_config
        assert cfg is not None and self.m_rng is not None
        if path is None:
            if cfg.out_dir is None:
                raise ConfigError("no checkpoint path and no out_dir configured")
            path = os.path.join(cfg.out_dir, CHECKPOINT_DIR, checkpoint_name(self.m_iteration))
        save_checkpoint(
            path,
            self.m_generator.params,
            self.m_discriminator.params,
            self.m_iteration,
            config=cfg.portable_dump(),
            rng=self.m_rng,
        )
        if path not in self.m_checkpoints:
            self.m_checkpoints.append(path)
        return path

    def step(self, iteration: int) -> StepLosses:
        """Run one iteration: phase I, then phase II when on cadence."""
        cfg = self.m_config
        assert cfg is not None and self.m_rng is not None
        cross = sample_pair(self.m_sets, False, self.m_rng)
        losses = train_step_phase1(self.m_generator, self.m_discriminator, cross, cfg, iteration)
        if iteration % cfg.phase2_every == 0:
            same = sample_pair(self.m_sets, True, self.m_rng)
            losses = losses.merged(train_step_phase2(self.m_generator, same, cfg, iteration))
        return losses

    def run(self) -> TrainHistory:
        """Train until ``cfg.iters``, logging and checkpointing on schedule.

        Returns
        -------
        TrainHistory
            All records, including any restored on resume.

        Raises
        ------
        NonFiniteLossError
            When a loss becomes NaN or infinite; names the term and iteration.
        """
        cfg = self.m_config
        if cfg is None or self.m_rng is None:
            raise ConfigError("trainer has no configuration; use from_config or resume")
        self._write_history_file()
        start = time.perf_counter()
        if self.m_iteration >= cfg.iters:
            logger.info("nothing to do: iteration %d already reaches iters=%d", self.m_iteration, cfg.iters)
        for it in range(self.m_iteration + 1, cfg.iters + 1):
            losses = self.step(it)
            self.m_iteration = it
            eval_due = cfg.eval_every > 0 and it % cfg.eval_every == 0
            if it % cfg.log_every == 0 or it == cfg.iters or eval_due:
                gen_l1 = oracle_l1(self.m_generator, self._holdout())[0] if eval_due else None
                record = HistoryRecord(
                    iteration=it,
                    oracle_l1_gen=gen_l1,
                    wall_clock=time.perf_counter() - start,
                    **losses.model_dump(),
                )
                self._append_history(record)
                logger.info(
                    "iter %d: L_I(G) %.4f L_I(D) %.4f L_S1 %s L_S2a %.4f L_S2b %.4f%s",
                    it,
                    losses.identity_g,
                    losses.identity_d,
                    f"{losses.s1:.4f}" if losses.s1 is not None else "-",
                    losses.s2a,
                    losses.s2b,
                    f" oracle-L1 {gen_l1:.4f}" if gen_l1 is not None else "",
                )
            if cfg.out_dir is not None and (
                it == cfg.iters or (cfg.checkpoint_every > 0 and it % cfg.checkpoint_every == 0)
            ):
                self.save()
        return self.m_history


def train(
    cfg: TrainConfig, sets: Optional[Sequence[IdentitySet]] = None
) -> Tuple[GeneratorParams, DiscriminatorParams, TrainHistory]:
    """Train from scratch; a pure function of ``cfg`` (and ``sets``).

    Returns
    -------
    tuple
        Trained generator and discriminator parameters and the history.
    """
    trainer = FusionTrainer.from_config(cfg, sets)
    history = trainer.run()
    return trainer.generator.params, trainer.discriminator.params, history
