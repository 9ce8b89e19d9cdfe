"""
Click-based CLI for fusion-gan.

Provides subcommands for generating the synthetic dataset, training,
fusing images with a checkpoint, evaluating against the oracle, and running
the gradient-check suite.

Exit codes: 0 success, 1 check failure, 2 usage or config, 3 IO / data /
checkpoint, 4 non-finite loss.
"""

from __future__ import annotations

import functools
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple, TypeVar

import click
from rich.console import Console
from rich.table import Table

from .data import dataset_hash, generate_sets, load_image_dirs, make_holdout_samples, save_sets
from .engine import run_gradcheck
from .errors import (
    CheckpointError,
    ConfigError,
    ContractError,
    DataError,
    DimensionError,
    FusionGanError,
    NonFiniteLossError,
    SpecError,
)
from .evaluate import BASELINES, emit_report, fuse_array, make_baseline
from .nets import FusionGenerator, Fuser
from .train import (
    Defaults,
    FusionTrainer,
    HistoryRecord,
    RunManifest,
    TrainConfig,
    load_checkpoint,
    load_train_config,
    load_training_sets,
    utc_timestamp,
    write_manifest,
)
from .utils import compose_grid, list_pngs, load_png, save_png
from .utils.logging import configure_logging

F = TypeVar("F", bound=Callable[..., Any])

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NON_FINITE = 4


def exit_code_for(err: FusionGanError) -> int:
    """Stable exit code of a library error."""
    if isinstance(err, NonFiniteLossError):
        return EXIT_NON_FINITE
    if isinstance(err, (DataError, CheckpointError)):
        return EXIT_IO
    if isinstance(err, (ConfigError, ContractError, DimensionError, SpecError)):
        return EXIT_USAGE
    return EXIT_CHECK_FAILED


def _maps_errors(fn: F) -> F:
    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except FusionGanError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(exit_code_for(e))

    return wrapper  # type: ignore[return-value]


@click.group(help="fusion-gan CLI: identity/shape image fusion at desk scale")
@click.option("--verbose", "-v", is_flag=True, default=False, help="Debug logging")
def cli(verbose: bool) -> None:
    """Root command group."""
    configure_logging(verbose)


@cli.command("gen-data", help="Generate the synthetic identity/shape dataset")
@click.option("--sets", "n_sets", type=int, default=Defaults.N_SETS, show_default=True, help="Identity sets (>= 2)")
@click.option("--per-set", "n_per_set", type=int, default=Defaults.N_PER_SET, show_default=True, help="Images per set")
@click.option("--res", type=int, default=Defaults.RES, show_default=True, help="Image side: 16, 32 or 64")
@click.option("--seed", type=int, default=Defaults.SEED, show_default=True, help="Dataset seed")
@click.option("--workers", type=int, default=1, show_default=True, help="Render threads")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Output directory")
@_maps_errors
def cmd_gen_data(n_sets: int, n_per_set: int, res: int, seed: int, workers: int, out_dir: str) -> None:
    """Write ``out/set_<id>/img_<idx>.png`` plus ``specs.json`` per set."""
    sets = generate_sets(n_sets, n_per_set, res, seed, workers=workers)
    save_sets(sets, out_dir)
    click.echo(
        f"wrote {sum(len(s) for s in sets)} images in {len(sets)} sets ({res}x{res}) to {out_dir} "
        f"[hash {dataset_hash(out_dir)[:12]}]"
    )


@cli.command("train", help="Train generator and discriminator")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="YAML/JSON config file")
@click.option("--data", "data_dir", type=click.Path(file_okay=False), default=None, help="Dataset directory")
@click.option("--sets", "n_sets", type=int, default=None, help="Synthetic sets when --data is not given")
@click.option("--per-set", "n_per_set", type=int, default=None, help="Synthetic images per set")
@click.option("--res", type=int, default=None, help="Image side")
@click.option("--iters", type=int, default=None, help="Iteration budget")
@click.option("--alpha", type=float, default=None, help="Cross-identity shape weight")
@click.option("--beta", type=float, default=None, help="Shape vs identity weight")
@click.option("--lr-g", type=float, default=None, help="Generator learning rate")
@click.option("--lr-d", type=float, default=None, help="Discriminator learning rate")
@click.option("--pool-k", type=int, default=None, help="Min-pool window on the patch map")
@click.option("--min-patch/--no-min-patch", default=None, help="Min-Patch generator objective")
@click.option("--no-s1", is_flag=True, default=False, help="Disable L_S1")
@click.option("--no-s2a", is_flag=True, default=False, help="Disable L_S2a")
@click.option("--no-s2b", is_flag=True, default=False, help="Disable L_S2b")
@click.option("--phase2-every", type=int, default=None, help="Run phase II every N iterations")
@click.option("--fuse-updates", is_flag=True, default=False, help="Single combined generator update")
@click.option("--literal-max", is_flag=True, default=False, help="Generator maximises the fake-pair term")
@click.option("--stop-grad-inner", is_flag=True, default=False, help="Constant inner call in L_S2a/L_S2b")
@click.option("--log-every", type=int, default=None, help="History cadence")
@click.option("--checkpoint-every", type=int, default=None, help="Checkpoint cadence (0: final only)")
@click.option("--eval-every", type=int, default=None, help="Held-out oracle-L1 cadence (0: off)")
@click.option("--seed", type=int, default=None, help="Training seed")
@click.option("--resume", "resume_from", type=click.Path(dir_okay=False), default=None, help="Continue from checkpoint")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Output directory")
@_maps_errors
def cmd_train(
    config_path: Optional[str],
    data_dir: Optional[str],
    n_sets: Optional[int],
    n_per_set: Optional[int],
    res: Optional[int],
    iters: Optional[int],
    alpha: Optional[float],
    beta: Optional[float],
    lr_g: Optional[float],
    lr_d: Optional[float],
    pool_k: Optional[int],
    min_patch: Optional[bool],
    no_s1: bool,
    no_s2a: bool,
    no_s2b: bool,
    phase2_every: Optional[int],
    fuse_updates: bool,
    literal_max: bool,
    stop_grad_inner: bool,
    log_every: Optional[int],
    checkpoint_every: Optional[int],
    eval_every: Optional[int],
    seed: Optional[int],
    resume_from: Optional[str],
    out_dir: str,
) -> None:
    """Run the training loop; writes checkpoints, history and manifest under --out."""
    started = utc_timestamp()
    toggles = {k: False for k, off in (("s1", no_s1), ("s2a", no_s2a), ("s2b", no_s2b)) if off}
    overrides: Dict[str, Any] = {
        "data_dir": data_dir,
        "n_sets": n_sets,
        "n_per_set": n_per_set,
        "res": res,
        "iters": iters,
        "alpha": alpha,
        "beta": beta,
        "lr_g": lr_g,
        "lr_d": lr_d,
        "pool_k": pool_k,
        "min_patch": min_patch,
        "loss_toggles": toggles or None,
        "phase2_every": phase2_every,
        "fuse_generator_updates": True if fuse_updates else None,
        "literal_max": True if literal_max else None,
        "stop_grad_inner": True if stop_grad_inner else None,
        "log_every": log_every,
        "checkpoint_every": checkpoint_every,
        "eval_every": eval_every,
        "seed": seed,
        "out_dir": out_dir,
    }
    if resume_from is not None:
        # the checkpoint carries the config; only the budget may grow
        fixed = sorted(k for k, v in overrides.items() if v is not None and k not in ("iters", "out_dir"))
        if config_path is not None:
            fixed.insert(0, "config")
        if fixed:
            raise click.UsageError(
                f"--resume takes its config from the checkpoint; only --iters may change (got {', '.join(fixed)})"
            )
        trainer = FusionTrainer.resume(resume_from, out_dir=out_dir, overrides={"iters": iters})
    else:
        trainer = FusionTrainer.from_config(load_train_config(config_path, overrides=overrides))
    cfg = trainer.config
    assert cfg is not None
    history = trainer.run()
    manifest = RunManifest(
        command="train",
        config=cfg.model_dump(mode="json"),
        dataset_hash=dataset_hash(cfg.data_dir) if cfg.data_dir else None,
        data_dir=cfg.data_dir,
        checkpoints=trainer.checkpoints,
        history=trainer.history_path,
        started_at=started,
        finished_at=utc_timestamp(),
    )
    path = write_manifest(out_dir, manifest)
    last = history[-1] if len(history) else None
    click.echo(f"trained to iteration {trainer.iteration}; {len(history)} history records; manifest {path}")
    if last is not None:
        click.echo(
            f"last: L_I(G)={last.identity_g:.4f} L_I(D)={last.identity_d:.4f} "
            f"L_S2a={last.s2a:.4f} L_S2b={last.s2b:.4f}"
        )


def _load_generator(checkpoint: str) -> Tuple[FusionGenerator, int]:
    ckpt = load_checkpoint(checkpoint)
    return FusionGenerator.from_params(ckpt.generator), ckpt.net_config.res


def _load_checked(path: str, res: int) -> Any:
    img = load_png(path)
    if img.shape[1:] != (res, res):
        raise ConfigError(f"{path} is {img.shape[2]}x{img.shape[1]} but the checkpoint expects {res}x{res}")
    return img


def _dir_images(directory: str, res: int) -> List[Tuple[str, Any]]:
    if not os.path.isdir(directory):
        raise DataError(f"directory not found: {directory}", path=directory)
    names = list_pngs(directory)
    if not names:
        raise DataError(f"no PNG images in {directory}", path=directory)
    return [(os.path.splitext(n)[0], _load_checked(os.path.join(directory, n), res)) for n in names]


@cli.command("fuse", help="Fuse x's identity with y's shape using a checkpoint")
@click.option("--checkpoint", type=click.Path(dir_okay=False), required=True, help="Checkpoint file")
@click.option("--x", "x_path", type=click.Path(dir_okay=False), default=None, help="Identity image")
@click.option("--y", "y_path", type=click.Path(dir_okay=False), default=None, help="Shape image")
@click.option("--x-dir", type=click.Path(file_okay=False), default=None, help="Identity images (batch)")
@click.option("--y-dir", type=click.Path(file_okay=False), default=None, help="Shape images (batch)")
@click.option("--out", "out_path", type=click.Path(), required=True, help="Output PNG, or directory in batch mode")
@_maps_errors
def cmd_fuse(
    checkpoint: str,
    x_path: Optional[str],
    y_path: Optional[str],
    x_dir: Optional[str],
    y_dir: Optional[str],
    out_path: str,
) -> None:
    """Single pair, fixed-x (``--x`` + ``--y-dir``), fixed-y (``--x-dir`` + ``--y``) or all pairs."""
    if (x_path is None) == (x_dir is None) or (y_path is None) == (y_dir is None):
        raise click.UsageError("give exactly one of --x/--x-dir and exactly one of --y/--y-dir")
    g, res = _load_generator(checkpoint)
    if x_path is not None and y_path is not None:
        out = fuse_array(g, _load_checked(x_path, res), _load_checked(y_path, res))
        save_png(out, out_path)
        click.echo(f"wrote {out_path}")
        return
    xs = [("x", _load_checked(x_path, res))] if x_path is not None else _dir_images(x_dir or "", res)
    ys = [("y", _load_checked(y_path, res))] if y_path is not None else _dir_images(y_dir or "", res)
    written: List[str] = []
    rows = []
    if x_path is not None:
        # fixed x: one row per y
        x_img = xs[0][1]
        for name, y_img in ys:
            out = fuse_array(g, x_img, y_img)
            written.append(os.path.join(out_path, f"fused_{name}.png"))
            save_png(out, written[-1])
            rows.append([x_img, y_img, out])
    elif y_path is not None:
        # fixed y: one row per x
        y_img = ys[0][1]
        for name, x_img in xs:
            out = fuse_array(g, x_img, y_img)
            written.append(os.path.join(out_path, f"fused_{name}.png"))
            save_png(out, written[-1])
            rows.append([x_img, y_img, out])
    else:
        for x_name, x_img in xs:
            row = [x_img]
            for y_name, y_img in ys:
                out = fuse_array(g, x_img, y_img)
                written.append(os.path.join(out_path, f"fused_{x_name}__{y_name}.png"))
                save_png(out, written[-1])
                row.append(out)
            rows.append(row)
    save_png(compose_grid(rows), os.path.join(out_path, "grid.png"))
    click.echo(f"wrote {len(written)} fused images and grid.png to {out_path}")


@cli.command("eval", help="Evaluate a checkpoint or baseline on held-out samples")
@click.option("--checkpoint", type=click.Path(dir_okay=False), default=None, help="Checkpoint file")
@click.option("--baseline", type=click.Choice(list(BASELINES)), default=None, help="Evaluate a reference fuser")
@click.option("--data", "data_dir", type=click.Path(file_okay=False), default=None, help="Dataset directory with specs")
@click.option("--n-samples", type=click.IntRange(min=1), default=100, show_default=True, help="Held-out samples")
@click.option("--seed", type=int, default=0, show_default=True, help="Held-out sample seed")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Report directory")
@_maps_errors
def cmd_eval(
    checkpoint: Optional[str],
    baseline: Optional[str],
    data_dir: Optional[str],
    n_samples: int,
    seed: int,
    out_dir: str,
) -> None:
    """Write ``grid.png``, ``metrics.json`` and ``manifest.json`` into --out."""
    started = utc_timestamp()
    if checkpoint is None and (baseline is None or data_dir is None):
        raise click.UsageError("give --checkpoint, or --baseline together with --data")
    history: List[HistoryRecord] = []
    g: Optional[Fuser] = None
    res: Optional[int] = None
    sets = None
    if checkpoint is not None:
        ckpt = load_checkpoint(checkpoint)
        res = ckpt.net_config.res
        g = FusionGenerator.from_params(ckpt.generator)
        history = [HistoryRecord(iteration=ckpt.iteration)]
        if data_dir is None:
            if ckpt.config is None:
                raise ConfigError(f"checkpoint {checkpoint} carries no config; pass --data")
            sets = load_training_sets(TrainConfig.model_validate(ckpt.config))
    if data_dir is not None:
        sets = load_image_dirs(data_dir)
    assert sets is not None
    if res is not None and sets[0].res != res:
        raise ConfigError(f"dataset images are {sets[0].res}px but the checkpoint expects {res}px")
    samples = make_holdout_samples(sets, n_samples, seed)
    if baseline is not None:
        g = make_baseline(baseline, samples)
    assert g is not None
    palettes = [s.identity for s in sets if s.identity is not None]
    paths = emit_report(history, samples, g, out_dir, palettes=palettes)
    with open(paths.metrics_json, "r", encoding="utf-8") as f:
        click.echo(f.read().rstrip())
    config: Dict[str, Any] = {
        "checkpoint": checkpoint,
        "baseline": baseline,
        "n_samples": n_samples,
        "seed": seed,
    }
    write_manifest(
        out_dir,
        RunManifest(
            command="eval",
            config=config,
            dataset_hash=dataset_hash(data_dir) if data_dir else None,
            data_dir=data_dir,
            checkpoints=[checkpoint] if checkpoint else [],
            metrics=[paths.metrics_json, paths.grid_png],
            started_at=started,
            finished_at=utc_timestamp(),
        ),
    )


@cli.command("gradcheck", help="Finite-difference check of every differentiable op")
@click.option("--seed", type=int, default=0, show_default=True, help="Base seed")
@click.option("--op", "ops", multiple=True, help="Only check this op (repeatable)")
@click.option("--instances", type=click.IntRange(min=1), default=5, show_default=True, help="Random cases per op")
@_maps_errors
def cmd_gradcheck(seed: int, ops: Tuple[str, ...], instances: int) -> None:
    """Print a per-op table; exit 1 if any op exceeds the threshold."""
    results = run_gradcheck(seed=seed, ops_filter=list(ops) or None, instances=instances)
    table = Table(title="gradcheck")
    table.add_column("op")
    table.add_column("instances", justify="right")
    table.add_column("max rel. error", justify="right")
    table.add_column("status")
    for r in results:
        table.add_row(r.op, str(r.instances), f"{r.max_rel_error:.2e}", "ok" if r.passed else "FAIL")
    Console(width=100).print(table)
    failed = [r for r in results if not r.passed]
    if failed:
        for r in failed:
            click.echo(f"gradcheck failed: {r.op} (max relative error {r.max_rel_error:.3e})", err=True)
        sys.exit(EXIT_CHECK_FAILED)


if __name__ == "__main__":  # pragma: no cover
    cli()
