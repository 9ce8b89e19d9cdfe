from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, List

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from fusion_gan.cli import cli, exit_code_for
from fusion_gan.data import dataset_hash
from fusion_gan.engine import ops
from fusion_gan.errors import (
    CheckpointError,
    ConfigError,
    DataError,
    DimensionError,
    FusionGanError,
    NonFiniteLossError,
)
from fusion_gan.train import CHECKPOINT_DIR, MANIFEST_FILE, checkpoint_name
from fusion_gan.utils.imageio import list_pngs, save_png

TINY_TRAIN = ["--res", "16", "--sets", "2", "--per-set", "3", "--iters", "2", "--pool-k", "2"]


def _set_dirs(root: Path) -> List[Path]:
    return sorted(p for p in root.iterdir() if p.is_dir())


@pytest.fixture(scope="module")
def dataset(tmp_path_factory: Any) -> Path:
    out = tmp_path_factory.mktemp("data")
    res = CliRunner().invoke(cli, ["gen-data", "--sets", "2", "--per-set", "4", "--res", "16", "--seed", "3", "--out", str(out)])
    assert res.exit_code == 0, res.output
    return Path(out)


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory: Any) -> Path:
    out = tmp_path_factory.mktemp("run")
    res = CliRunner().invoke(cli, ["train", *TINY_TRAIN, "--out", str(out)])
    assert res.exit_code == 0, res.output
    return Path(out) / CHECKPOINT_DIR / checkpoint_name(2)


def test_gen_data_writes_sets_and_is_reproducible(dataset: Path, tmp_path: Path) -> None:
    dirs = _set_dirs(dataset)
    assert len(dirs) == 2
    assert all(len(list_pngs(str(d))) == 4 for d in dirs)
    assert all((d / "specs.json").is_file() for d in dirs)
    again = tmp_path / "again"
    res = CliRunner().invoke(cli, ["gen-data", "--sets", "2", "--per-set", "4", "--res", "16", "--seed", "3", "--out", str(again)])
    assert res.exit_code == 0
    assert "wrote 8 images in 2 sets" in res.output
    assert dataset_hash(str(again)) == dataset_hash(str(dataset))


def test_gen_data_rejects_single_set(tmp_path: Path) -> None:
    res = CliRunner().invoke(cli, ["gen-data", "--sets", "1", "--out", str(tmp_path / "d")])
    assert res.exit_code == 2
    assert "error:" in res.stderr


def test_train_writes_manifest_history_and_checkpoint(checkpoint: Path) -> None:
    run_dir = checkpoint.parent.parent
    manifest = json.loads((run_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["command"] == "train"
    assert manifest["config"]["iters"] == 2
    assert manifest["checkpoints"][-1] == str(checkpoint)
    assert checkpoint.is_file()
    assert Path(manifest["history"]).is_file()


def test_train_bad_config_exits_2(tmp_path: Path) -> None:
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("alpah: 1.0\n", encoding="utf-8")
    res = CliRunner().invoke(cli, ["train", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert res.exit_code == 2


def test_train_missing_resume_checkpoint_exits_3(tmp_path: Path) -> None:
    res = CliRunner().invoke(cli, ["train", "--resume", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert res.exit_code == 3


def test_train_resume_rejects_config_flags(checkpoint: Path, tmp_path: Path) -> None:
    runner = CliRunner()
    res = runner.invoke(cli, ["train", "--resume", str(checkpoint), "--lr-d", "1e-3", "--no-s1", "--out", str(tmp_path / "o")])
    assert res.exit_code == 2
    assert "lr_d" in res.stderr and "loss_toggles" in res.stderr
    cfg = tmp_path / "c.yaml"
    cfg.write_text("iters: 4\n", encoding="utf-8")
    res = runner.invoke(cli, ["train", "--resume", str(checkpoint), "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert res.exit_code == 2
    assert not (tmp_path / "o").exists()


def test_fuse_with_unusable_checkpoint_exits_3(checkpoint: Path, dataset: Path, tmp_path: Path) -> None:
    doc = json.loads(checkpoint.read_text(encoding="utf-8"))
    doc["net_config"]["pool_k"] = 3
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc), encoding="utf-8")
    a, b = _set_dirs(dataset)
    x = a / list_pngs(str(a))[0]
    y = b / list_pngs(str(b))[0]
    res = CliRunner().invoke(cli, ["fuse", "--checkpoint", str(broken), "--x", str(x), "--y", str(y), "--out", str(tmp_path / "f.png")])
    assert res.exit_code == 3


def test_fuse_single_pair(checkpoint: Path, dataset: Path, tmp_path: Path) -> None:
    a, b = _set_dirs(dataset)
    x = a / list_pngs(str(a))[0]
    y = b / list_pngs(str(b))[0]
    out = tmp_path / "fused.png"
    res = CliRunner().invoke(cli, ["fuse", "--checkpoint", str(checkpoint), "--x", str(x), "--y", str(y), "--out", str(out)])
    assert res.exit_code == 0, res.output
    with Image.open(out) as im:
        assert im.size == (16, 16)


def test_fuse_fixed_x_and_fixed_y(checkpoint: Path, dataset: Path, tmp_path: Path) -> None:
    a, b = _set_dirs(dataset)
    x = a / list_pngs(str(a))[0]
    y = b / list_pngs(str(b))[0]
    runner = CliRunner()

    res = runner.invoke(cli, ["fuse", "--checkpoint", str(checkpoint), "--x", str(x), "--y-dir", str(b), "--out", str(tmp_path / "fx")])
    assert res.exit_code == 0, res.output
    fx = list_pngs(str(tmp_path / "fx"))
    assert len(fx) == 5 and "grid.png" in fx

    res = runner.invoke(cli, ["fuse", "--checkpoint", str(checkpoint), "--x-dir", str(a), "--y", str(y), "--out", str(tmp_path / "fy")])
    assert res.exit_code == 0, res.output
    fy = list_pngs(str(tmp_path / "fy"))
    assert len(fy) == 5 and "grid.png" in fy


def test_fuse_argument_errors(checkpoint: Path, dataset: Path, tmp_path: Path) -> None:
    a, b = _set_dirs(dataset)
    x = a / list_pngs(str(a))[0]
    runner = CliRunner()
    both = runner.invoke(
        cli, ["fuse", "--checkpoint", str(checkpoint), "--x", str(x), "--x-dir", str(a), "--y-dir", str(b), "--out", str(tmp_path / "o")]
    )
    assert both.exit_code == 2

    big = tmp_path / "big.png"
    save_png(np.zeros((3, 32, 32)), str(big))
    wrong = runner.invoke(cli, ["fuse", "--checkpoint", str(checkpoint), "--x", str(big), "--y", str(x), "--out", str(tmp_path / "o.png")])
    assert wrong.exit_code == 2

    empty = tmp_path / "empty"
    empty.mkdir()
    none = runner.invoke(cli, ["fuse", "--checkpoint", str(checkpoint), "--x", str(x), "--y-dir", str(empty), "--out", str(tmp_path / "o")])
    assert none.exit_code == 3


def test_eval_copy_y_baseline_matches_its_own_column(dataset: Path, tmp_path: Path) -> None:
    out = tmp_path / "eval"
    res = CliRunner().invoke(cli, ["eval", "--baseline", "copy-y", "--data", str(dataset), "--n-samples", "6", "--out", str(out)])
    assert res.exit_code == 0, res.output
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    assert metrics["oracle_l1_gen"] == metrics["oracle_l1_copy_y"]
    assert (out / "grid.png").is_file()
    manifest = json.loads((out / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["command"] == "eval"
    assert manifest["dataset_hash"] == dataset_hash(str(dataset))


def test_eval_checkpoint_uses_embedded_config(checkpoint: Path, tmp_path: Path) -> None:
    out = tmp_path / "eval"
    res = CliRunner().invoke(cli, ["eval", "--checkpoint", str(checkpoint), "--n-samples", "3", "--out", str(out)])
    assert res.exit_code == 0, res.output
    metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
    assert metrics["iteration"] == 2


def test_eval_argument_errors(dataset: Path, tmp_path: Path) -> None:
    runner = CliRunner()
    zero = runner.invoke(cli, ["eval", "--baseline", "oracle", "--data", str(dataset), "--n-samples", "0", "--out", str(tmp_path / "e")])
    assert zero.exit_code == 2
    alone = runner.invoke(cli, ["eval", "--baseline", "oracle", "--out", str(tmp_path / "e")])
    assert alone.exit_code == 2


def test_gradcheck_single_op_passes() -> None:
    res = CliRunner().invoke(cli, ["gradcheck", "--op", "conv2d", "--instances", "2"])
    assert res.exit_code == 0, res.output
    assert "conv2d" in res.stdout


def test_gradcheck_reports_broken_rule(monkeypatch: Any) -> None:
    def bad_backward(self: Any, grad: np.ndarray) -> Any:
        return (grad * self.factor * 1.5,)

    monkeypatch.setattr(ops.Scale, "backward", bad_backward)
    res = CliRunner().invoke(cli, ["gradcheck", "--op", "scale", "--op", "add"])
    assert res.exit_code == 1
    assert "scale" in res.stderr
    assert "add" not in res.stderr


def test_exit_codes_by_error_kind() -> None:
    assert exit_code_for(NonFiniteLossError("s1", 3, float("nan"))) == 4
    assert exit_code_for(DataError("x", path="p")) == 3
    assert exit_code_for(CheckpointError("x")) == 3
    assert exit_code_for(ConfigError("x")) == 2
    assert exit_code_for(DimensionError("x", axis="H")) == 2
    assert exit_code_for(FusionGanError("x")) == 1


def test_verbose_flag_is_accepted(tmp_path: Path) -> None:
    res = CliRunner().invoke(cli, ["-v", "gen-data", "--sets", "2", "--per-set", "1", "--res", "16", "--out", str(tmp_path / "d")])
    assert res.exit_code == 0
    assert os.path.isdir(tmp_path / "d")
