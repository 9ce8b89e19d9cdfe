from __future__ import annotations

from typing import Dict, List, Tuple

import pytest

from fusion_gan.data import make_holdout_samples
from fusion_gan.errors import ContractError
from fusion_gan.evaluate import (
    ACCEPTANCE_SEEDS,
    HOLDOUT_SAMPLES,
    HOLDOUT_SEED,
    Criterion,
    EvalMetrics,
    desk_criteria,
    evaluate_samples,
    make_baseline,
    run_passes,
    seed_passes,
    shape_lost,
)
from fusion_gan.train import FusionTrainer, TrainConfig, arm_overrides, get_arm, load_training_sets


def _metrics(gen: float, copy_x: float = 0.04, oks: float = 0.8, ident: float = 1.0) -> EvalMetrics:
    return EvalMetrics(
        oracle_l1_gen=gen, oracle_l1_copy_x=copy_x, oracle_l1_copy_y=0.05, mean_oks=oks, identity_score=ident
    )


def test_desk_criteria_bounds() -> None:
    copy_x = _metrics(0.04, oks=0.3)
    ok = desk_criteria(_metrics(0.015, oks=0.5, ident=0.95), copy_x)
    assert [c.name for c in ok] == ["oracle_l1", "mean_oks", "identity_score"]
    assert seed_passes(ok)
    assert ok[0].bound == pytest.approx(0.02)
    assert ok[1].bound == pytest.approx(0.4)

    # L1 just above half of copy-x, as a near miss
    near = desk_criteria(_metrics(0.0248, copy_x=0.0426, oks=0.83), _metrics(0.0426, copy_x=0.0426, oks=0.3))
    assert [c.passed for c in near] == [False, True, True]
    assert not seed_passes(near)

    collapsed = desk_criteria(_metrics(0.468, copy_x=0.052, oks=0.175, ident=0.0), _metrics(0.052, copy_x=0.052, oks=0.3))
    assert not any(c.passed for c in collapsed)


def test_desk_criteria_rejects_mismatched_reports() -> None:
    with pytest.raises(ContractError):
        desk_criteria(_metrics(0.01, copy_x=0.04), _metrics(0.04, copy_x=0.05))


def test_run_passes_needs_two_seeds() -> None:
    good = [Criterion(name="a", value=0.0, bound=1.0, upper=True)]
    bad = [Criterion(name="a", value=2.0, bound=1.0, upper=True)]
    assert run_passes([good, good, bad])
    assert not run_passes([good, bad, bad])
    assert "FAIL" in bad[0].describe() and "<=" in bad[0].describe()


def test_identity_only_arm_loses_shape() -> None:
    assert shape_lost(_metrics(0.090, copy_x=0.043)).passed
    assert not shape_lost(_metrics(0.020, copy_x=0.043)).passed


def _train_and_evaluate(seed: int, **overrides: object) -> Tuple[EvalMetrics, EvalMetrics]:
    cfg = TrainConfig.model_validate({"seed": seed, **overrides})
    trainer = FusionTrainer.from_config(cfg)
    trainer.run()
    samples = make_holdout_samples(load_training_sets(cfg), HOLDOUT_SAMPLES, HOLDOUT_SEED)
    gen = evaluate_samples(trainer.generator, samples, iteration=trainer.iteration)
    return gen, evaluate_samples(make_baseline("copy-x"), samples)


@pytest.mark.slow
def test_default_config_meets_desk_criteria_on_two_of_three_seeds() -> None:
    per_seed: Dict[int, List[Criterion]] = {}
    for seed in ACCEPTANCE_SEEDS:
        gen, copy_x = _train_and_evaluate(seed)
        per_seed[seed] = desk_criteria(gen, copy_x)
    report = {s: [c.describe() for c in cs] for s, cs in per_seed.items()}
    assert run_passes(list(per_seed.values())), report


@pytest.mark.slow
def test_identity_only_arm_does_not_beat_copy_x() -> None:
    gen, _ = _train_and_evaluate(ACCEPTANCE_SEEDS[0], **arm_overrides(get_arm("identity-only")))
    assert shape_lost(gen).passed, gen.model_dump()
