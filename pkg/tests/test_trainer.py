from __future__ import annotations

import json
import os
import shutil
from pathlib import Path
from typing import Any, List

import numpy as np
import pytest

from fusion_gan.data import generate_sets, save_sets
from fusion_gan.errors import CheckpointError, ConfigError, ContractError, DataError
from fusion_gan.train import (
    CHECKPOINT_DIR,
    FORMAT_VERSION,
    HISTORY_FILE,
    MANIFEST_FILE,
    FusionTrainer,
    HistoryRecord,
    RunManifest,
    TrainConfig,
    checkpoint_name,
    load_checkpoint,
    save_checkpoint,
    train,
    utc_timestamp,
    write_manifest,
)
from fusion_gan.utils.imageio import list_pngs

TINY = dict(n_sets=2, n_per_set=3, res=16, width=2, pool_k=2, iters=4, log_every=1, checkpoint_every=2)


def _cfg(**kw: Any) -> TrainConfig:
    return TrainConfig.model_validate({**TINY, **kw})


def _records(path: str) -> List[dict]:
    with open(path, "r", encoding="utf-8") as f:
        rows = [json.loads(line) for line in f if line.strip()]
    for row in rows:
        row.pop("wall_clock")
    return rows


def _ckpt(out: Path, it: int) -> Path:
    return out / CHECKPOINT_DIR / checkpoint_name(it)


def test_smoke_train_two_iterations() -> None:
    g, d, history = train(_cfg(iters=2))
    assert [r.iteration for r in history] == [1, 2]
    last = history[-1]
    assert last.identity_g is not None and last.identity_d is not None
    assert last.s1 is not None and last.s2a is not None and last.s2b is not None
    assert all(np.all(np.isfinite(t.data)) for _, t in g.items())
    assert d.step == 2


def test_run_writes_history_and_scheduled_checkpoints(tmp_path: Path) -> None:
    out = tmp_path / "run"
    trainer = FusionTrainer.from_config(_cfg(out_dir=str(out), iters=5))
    trainer.run()
    assert trainer.iteration == 5
    names = sorted(os.listdir(out / CHECKPOINT_DIR))
    assert names == [checkpoint_name(2), checkpoint_name(4), checkpoint_name(5)]
    assert trainer.checkpoints == [str(_ckpt(out, i)) for i in (2, 4, 5)]
    rows = _records(str(out / HISTORY_FILE))
    assert [r["iteration"] for r in rows] == [1, 2, 3, 4, 5]
    assert all(r["oracle_l1_gen"] is None for r in rows)


def test_log_cadence_and_eval_records(tmp_path: Path) -> None:
    trainer = FusionTrainer.from_config(_cfg(iters=5, log_every=3, eval_every=2, eval_samples=2))
    history = trainer.run()
    assert [r.iteration for r in history] == [2, 3, 4, 5]
    by_it = {r.iteration: r for r in history}
    assert by_it[2].oracle_l1_gen is not None and by_it[4].oracle_l1_gen is not None
    assert by_it[3].oracle_l1_gen is None and by_it[5].oracle_l1_gen is None


def test_phase2_cadence() -> None:
    _, _, history = train(_cfg(iters=4, phase2_every=2))
    s1 = {r.iteration: r.s1 for r in history}
    assert s1[1] is None and s1[3] is None
    assert s1[2] is not None and s1[4] is not None


def test_identical_configs_write_identical_checkpoints(tmp_path: Path) -> None:
    for name in ("a", "b"):
        FusionTrainer.from_config(_cfg(out_dir=str(tmp_path / name))).run()
    for it in (2, 4):
        assert _ckpt(tmp_path / "a", it).read_bytes() == _ckpt(tmp_path / "b", it).read_bytes()
    assert _records(str(tmp_path / "a" / HISTORY_FILE)) == _records(str(tmp_path / "b" / HISTORY_FILE))


def test_resume_matches_uninterrupted_run(tmp_path: Path) -> None:
    full = tmp_path / "full"
    FusionTrainer.from_config(_cfg(out_dir=str(full))).run()

    # continue in a fresh directory
    fresh = tmp_path / "fresh"
    resumed = FusionTrainer.resume(str(_ckpt(full, 2)), out_dir=str(fresh))
    assert resumed.iteration == 2
    resumed.run()
    assert _ckpt(fresh, 4).read_bytes() == _ckpt(full, 4).read_bytes()
    assert _records(str(fresh / HISTORY_FILE)) == _records(str(full / HISTORY_FILE))[2:]

    # continue in place: history past the checkpoint is dropped and rewritten
    copy = tmp_path / "copy"
    shutil.copytree(full, copy)
    again = FusionTrainer.resume(str(_ckpt(copy, 2)), out_dir=str(copy))
    assert [r.iteration for r in again.history] == [1, 2]
    again.run()
    assert _records(str(copy / HISTORY_FILE)) == _records(str(full / HISTORY_FILE))


def test_resume_can_extend_the_budget(tmp_path: Path) -> None:
    out = tmp_path / "run"
    FusionTrainer.from_config(_cfg(out_dir=str(out), iters=2)).run()
    more = FusionTrainer.resume(str(_ckpt(out, 2)), out_dir=str(out), overrides={"iters": 3})
    more.run()
    assert more.iteration == 3
    assert [r.iteration for r in more.history] == [1, 2, 3]
    assert _ckpt(out, 3).is_file()


def test_checkpoint_round_trip_is_bit_exact(tmp_path: Path) -> None:
    trainer = FusionTrainer.from_config(_cfg(iters=1))
    trainer.run()
    path = trainer.save(str(tmp_path / "one.json"))
    ckpt = load_checkpoint(path)
    assert ckpt.iteration == 1
    assert ckpt.net_config == trainer.config.net_config  # type: ignore[union-attr]
    for name, t in trainer.generator.params.items():
        np.testing.assert_array_equal(ckpt.generator[name].data, t.data)
    assert ckpt.generator.step == trainer.generator.params.step
    assert ckpt.config is not None and "out_dir" not in ckpt.config


def _saved(tmp_path: Path) -> Path:
    trainer = FusionTrainer.from_config(_cfg(iters=1))
    return Path(trainer.save(str(tmp_path / "ck.json")))


def test_truncated_checkpoint_is_rejected(tmp_path: Path) -> None:
    path = _saved(tmp_path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(CheckpointError):
        load_checkpoint(str(path))


def test_checkpoint_version_and_kind_are_checked(tmp_path: Path) -> None:
    path = _saved(tmp_path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    path.write_text(json.dumps({**doc, "format_version": FORMAT_VERSION + 1}), encoding="utf-8")
    with pytest.raises(CheckpointError, match="format version"):
        load_checkpoint(str(path))
    path.write_text(json.dumps({**doc, "kind": "something-else"}), encoding="utf-8")
    with pytest.raises(CheckpointError):
        load_checkpoint(str(path))
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / "missing.json"))


def test_checkpoint_layout_mismatch(tmp_path: Path) -> None:
    path = _saved(tmp_path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["net_config"]["width"] = 3
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(CheckpointError):
        load_checkpoint(str(path))


def test_checkpoint_with_unusable_net_config(tmp_path: Path) -> None:
    path = _saved(tmp_path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["net_config"]["pool_k"] = 3
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(CheckpointError, match="network config"):
        load_checkpoint(str(path))


def test_resume_needs_embedded_config(tmp_path: Path) -> None:
    trainer = FusionTrainer.from_config(_cfg(iters=1))
    path = save_checkpoint(
        str(tmp_path / "bare.json"), trainer.generator.params, trainer.discriminator.params, 0
    )
    with pytest.raises(CheckpointError):
        FusionTrainer.resume(path)


def test_trainer_argument_errors() -> None:
    trainer = FusionTrainer.from_config(_cfg(iters=1))
    with pytest.raises(ConfigError):
        trainer.save()
    with pytest.raises(ConfigError):
        trainer.set_sets(generate_sets(2, 2, 16, seed=0)[:1])
    with pytest.raises(ConfigError):
        FusionTrainer().run()


def test_single_image_set_is_rejected(tmp_path: Path) -> None:
    root = tmp_path / "d"
    dirs = save_sets(generate_sets(2, 2, 16, seed=0), str(root))
    first = Path(dirs[0])
    os.remove(first / list_pngs(str(first))[0])
    with pytest.raises(DataError, match="at least 2 per set") as err:
        FusionTrainer.from_config(_cfg(data_dir=str(root)))
    assert err.value.path == str(first)
    sets = generate_sets(2, 2, 16, seed=0)
    sets[1].images = sets[1].images[:1]
    with pytest.raises(DataError):
        FusionTrainer().set_sets(sets)


def test_manifest_requires_existing_artifacts(tmp_path: Path) -> None:
    artifact = tmp_path / "h.jsonl"
    manifest = RunManifest(
        command="train",
        config={},
        history=str(artifact),
        started_at=utc_timestamp(),
        finished_at=utc_timestamp(),
    )
    with pytest.raises(ContractError):
        write_manifest(str(tmp_path), manifest)
    artifact.write_text("", encoding="utf-8")
    path = write_manifest(str(tmp_path), manifest)
    assert os.path.basename(path) == MANIFEST_FILE
    assert json.loads(Path(path).read_text(encoding="utf-8"))["history"] == str(artifact)


def test_history_records_must_increase() -> None:
    trainer = FusionTrainer.from_config(_cfg(iters=1))
    trainer.history.append(HistoryRecord(iteration=3))
    with pytest.raises(ContractError):
        trainer.history.append(HistoryRecord(iteration=3))
