"""
Typed records for training: configuration, step losses, history and the run
manifest.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Iterator, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fusion_gan.errors import ConfigError, ContractError
from fusion_gan.losses import LossWeights
from fusion_gan.nets import NetConfig

from .defaults import Defaults


class LossToggles(BaseModel):
    """Which shape terms take part in updates.

    The identity loss has no switch: it always trains. The Min-Patch switch is
    :attr:`TrainConfig.min_patch`.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    s1: bool = True
    s2a: bool = True
    s2b: bool = True


class TrainConfig(BaseModel):
    """All training hyperparameters.

    Attributes
    ----------
    n_sets, n_per_set, res : int
        Synthetic dataset shape (ignored for sizes when ``data_dir`` is set).
    alpha, beta : float
        Cross-identity shape weight and shape-vs-identity weight.
    lr_g, lr_d : float
        Adam learning rates of generator and discriminator.
    pool_k : int
        Min-pool window on the patch map.
    iters : int
        Iteration budget (> 0).
    min_patch : bool
        Judge the generator by the worst patch per window.
    loss_toggles : LossToggles
        Shape-term switches for ablations.
    phase2_every : int
        Run the same-identity phase every this many iterations.
    fuse_generator_updates : bool
        Merge the generator's identity and cross-identity shape updates into one
        step.
    literal_max : bool
        Generator maximises the fake-pair term instead of pulling it to 1.
    stop_grad_inner : bool
        Treat the inner generator call of the cross-identity shape terms as a
        constant.
    eval_every, eval_samples : int
        Held-out oracle-L1 cadence (0 disables) and sample count.
    data_dir, out_dir : str | None
        Dataset directory to train on; artifact directory (nothing is written
        when ``None``).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_sets: int = Field(Defaults.N_SETS, ge=2)
    n_per_set: int = Field(Defaults.N_PER_SET, ge=2)
    res: int = Defaults.RES
    width: int = Field(Defaults.WIDTH, ge=1)
    d_downsamples: int = Field(Defaults.D_DOWNSAMPLES, ge=1)
    pool_k: int = Field(Defaults.POOL_K, ge=1)

    alpha: float = Field(Defaults.ALPHA, ge=0.0)
    beta: float = Field(Defaults.BETA, ge=0.0)
    lr_g: float = Field(Defaults.LR_G, ge=0.0)
    lr_d: float = Field(Defaults.LR_D, ge=0.0)
    beta1: float = Field(Defaults.BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(Defaults.BETA2, ge=0.0, lt=1.0)
    adam_eps: float = Field(Defaults.ADAM_EPS, gt=0.0)

    iters: int = Field(Defaults.ITERS, gt=0)
    seed: int = Field(Defaults.SEED, ge=0)
    min_patch: bool = Defaults.MIN_PATCH
    loss_toggles: LossToggles = Field(default_factory=LossToggles)
    phase2_every: int = Field(Defaults.PHASE2_EVERY, ge=1)
    fuse_generator_updates: bool = Defaults.FUSE_GENERATOR_UPDATES
    literal_max: bool = Defaults.LITERAL_MAX
    stop_grad_inner: bool = Defaults.STOP_GRAD_INNER

    log_every: int = Field(Defaults.LOG_EVERY, ge=1)
    checkpoint_every: int = Field(Defaults.CHECKPOINT_EVERY, ge=0)
    eval_every: int = Field(Defaults.EVAL_EVERY, ge=0)
    eval_samples: int = Field(Defaults.EVAL_SAMPLES, ge=1)

    data_dir: Optional[str] = Defaults.DATA_DIR
    out_dir: Optional[str] = Defaults.OUT_DIR

    @model_validator(mode="after")
    def _sizes_consistent(self) -> "TrainConfig":
        try:
            self.net_config.check()
        except ConfigError as e:
            raise ValueError(str(e)) from e
        return self

    @property
    def net_config(self) -> NetConfig:
        return NetConfig(res=self.res, width=self.width, pool_k=self.pool_k, d_downsamples=self.d_downsamples)

    @property
    def weights(self) -> LossWeights:
        return LossWeights(alpha=self.alpha, beta=self.beta)

    def portable_dump(self) -> Dict[str, Any]:
        """Config as plain data without ``out_dir`` (what checkpoints embed)."""
        return self.model_dump(mode="json", exclude={"out_dir"})


class StepLosses(BaseModel):
    """Loss values of one phase step, each measured before its own update."""

    identity_g: Optional[float] = None
    identity_d: Optional[float] = None
    s1: Optional[float] = None
    s2a: Optional[float] = None
    s2b: Optional[float] = None

    def merged(self, other: "StepLosses") -> "StepLosses":
        data = self.model_dump()
        data.update({k: v for k, v in other.model_dump().items() if v is not None})
        return StepLosses(**data)


class HistoryRecord(StepLosses):
    iteration: int
    oracle_l1_gen: Optional[float] = None
    wall_clock: float = 0.0


class TrainHistory:
    """Ordered history records with strictly increasing iterations."""

    def __init__(self) -> None:
        self.m_records: List[HistoryRecord] = []

    def __len__(self) -> int:
        return len(self.m_records)

    def __iter__(self) -> Iterator[HistoryRecord]:
        return iter(self.m_records)

    def __getitem__(self, idx: int) -> HistoryRecord:
        return self.m_records[idx]

    @property
    def records(self) -> List[HistoryRecord]:
        return list(self.m_records)

    def append(self, record: HistoryRecord) -> None:
        if self.m_records and record.iteration <= self.m_records[-1].iteration:
            raise ContractError(
                f"history iteration {record.iteration} does not follow {self.m_records[-1].iteration}"
            )
        self.m_records.append(record)

    def truncate(self, iteration: int) -> None:
        """Drop records after ``iteration``."""
        self.m_records = [r for r in self.m_records if r.iteration <= iteration]

    @staticmethod
    def to_line(record: HistoryRecord) -> str:
        return json.dumps(record.model_dump(), sort_keys=True)

    @classmethod
    def from_lines(cls, lines: List[str]) -> "TrainHistory":
        hist = cls()
        for line in lines:
            if line.strip():
                hist.append(HistoryRecord.model_validate_json(line))
        return hist


class RunManifest(BaseModel):
    """Record of one CLI run; every listed artifact exists on success."""

    command: str
    config: Dict[str, Any]
    dataset_hash: Optional[str] = None
    data_dir: Optional[str] = None
    checkpoints: List[str] = []
    history: Optional[str] = None
    metrics: List[str] = []
    started_at: str
    finished_at: str
