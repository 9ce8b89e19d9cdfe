"""
Desk-run acceptance checks over evaluation metrics.

A trained generator passes a seed when, on held-out cross-identity samples,
its oracle L1 is at most half the copy-x baseline's, its mean OKS beats the
copy-x baseline by a margin, and nearly every output carries x's palette.
A run passes when enough seeds do. The identity-only ablation arm is expected
to lose shape: its oracle L1 must not beat copy-x.
"""

from __future__ import annotations

from typing import List, Sequence

from pydantic import BaseModel

from fusion_gan.errors import ContractError

from .types import EvalMetrics

L1_RATIO = 0.5
OKS_MARGIN = 0.1
MIN_IDENTITY_SCORE = 0.9
MIN_PASSING_SEEDS = 2
ACCEPTANCE_SEEDS = (0, 1, 2)
HOLDOUT_SAMPLES = 100
HOLDOUT_SEED = 12345


class Criterion(BaseModel):
    """One inequality: ``value <= bound`` when ``upper`` else ``value >= bound``."""

    name: str
    value: float
    bound: float
    upper: bool

    @property
    def passed(self) -> bool:
        return self.value <= self.bound if self.upper else self.value >= self.bound

    def describe(self) -> str:
        op = "<=" if self.upper else ">="
        mark = "ok" if self.passed else "FAIL"
        return f"{self.name}: {self.value:.4f} {op} {self.bound:.4f} [{mark}]"


def desk_criteria(gen: EvalMetrics, copy_x: EvalMetrics) -> List[Criterion]:
    """The three per-seed inequalities for a trained generator.

    ``gen`` and ``copy_x`` must be evaluated on the same samples; the copy-x
    oracle L1 is read from ``gen`` and its OKS from ``copy_x``.

    Raises
    ------
    ContractError
        If the two reports disagree on the copy-x oracle L1 (different samples).
    """
    if abs(gen.oracle_l1_copy_x - copy_x.oracle_l1_copy_x) > 1e-12:
        raise ContractError(
            f"reports were computed on different samples (copy-x L1 {gen.oracle_l1_copy_x} "
            f"vs {copy_x.oracle_l1_copy_x})"
        )
    return [
        Criterion(name="oracle_l1", value=gen.oracle_l1_gen, bound=L1_RATIO * gen.oracle_l1_copy_x, upper=True),
        Criterion(name="mean_oks", value=gen.mean_oks, bound=copy_x.mean_oks + OKS_MARGIN, upper=False),
        Criterion(name="identity_score", value=gen.identity_score, bound=MIN_IDENTITY_SCORE, upper=False),
    ]


def shape_lost(identity_only: EvalMetrics) -> Criterion:
    """The identity-only arm's oracle L1 is not better than copy-x."""
    return Criterion(
        name="identity_only_l1",
        value=identity_only.oracle_l1_gen,
        bound=identity_only.oracle_l1_copy_x,
        upper=False,
    )


def seed_passes(criteria: Sequence[Criterion]) -> bool:
    return all(c.passed for c in criteria)


def run_passes(per_seed: Sequence[Sequence[Criterion]], min_passing: int = MIN_PASSING_SEEDS) -> bool:
    """``True`` when at least ``min_passing`` seeds meet every criterion."""
    return sum(seed_passes(c) for c in per_seed) >= min_passing
