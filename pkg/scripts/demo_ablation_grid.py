#!/usr/bin/env python3
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from typing import Dict, List, Tuple

from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from fusion_gan.evaluate import (
    ACCEPTANCE_SEEDS,
    HOLDOUT_SAMPLES,
    HOLDOUT_SEED,
    MIN_PASSING_SEEDS,
    Criterion,
    EvalMetrics,
    desk_criteria,
    run_passes,
    shape_lost,
)
from fusion_gan.train import ABLATION_ARMS, Defaults, arm_cli_flags

IDENTITY_ONLY = "identity-only"
FULL = "full+min-patch"


def read_metrics(report_dir: str) -> EvalMetrics:
    with open(os.path.join(report_dir, "metrics.json"), "r", encoding="utf-8") as f:
        return EvalMetrics.model_validate(json.load(f))


def main(argv: List[str]) -> int:
    ap = argparse.ArgumentParser(description="Train every loss ablation arm per seed and check the arm ordering")
    ap.add_argument("--out", default="runs/ablation", help="Working directory")
    ap.add_argument("--res", type=int, default=Defaults.RES, help="Image side")
    ap.add_argument("--iters", type=int, default=Defaults.ITERS, help="Training iterations per arm")
    ap.add_argument("--seeds", type=int, nargs="+", default=list(ACCEPTANCE_SEEDS), help="Dataset and training seeds")
    ap.add_argument("--n-samples", type=int, default=HOLDOUT_SAMPLES, help="Held-out cross-identity samples")
    args = ap.parse_args(argv)

    console = Console()
    console.print(
        Panel.fit(
            f"[bold]Ablation grid[/bold]\narms: [cyan]{len(ABLATION_ARMS)}[/cyan]  iters: [cyan]{args.iters}[/cyan]  "
            f"seeds: [cyan]{' '.join(map(str, args.seeds))}[/cyan]",
            title="fusion-gan",
        )
    )

    holdout = ["--n-samples", str(args.n_samples), "--seed", str(HOLDOUT_SEED)]
    results: Dict[Tuple[int, str], EvalMetrics] = {}
    copy_x: Dict[int, EvalMetrics] = {}
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        for seed in args.seeds:
            root = os.path.join(args.out, f"seed_{seed}")
            data = os.path.join(root, "data")
            prep = [
                ["fusion-gan-cli", "gen-data", "--res", str(args.res), "--seed", str(seed), "--out", data],
                ["fusion-gan-cli", "eval", "--baseline", "copy-x", "--data", data, *holdout, "--out", os.path.join(root, "copy_x")],
            ]
            if any(subprocess.call(cmd, stdout=subprocess.DEVNULL) != 0 for cmd in prep):
                console.print(f"[red]✗[/red] seed {seed}: dataset or baseline failed")
                continue
            copy_x[seed] = read_metrics(os.path.join(root, "copy_x"))
            for arm in ABLATION_ARMS:
                task = progress.add_task(f"seed {seed}: {arm.name}", total=None)
                arm_dir = os.path.join(root, arm.name)
                ckpt = os.path.join(arm_dir, "checkpoints", f"ckpt_{args.iters:06d}.json")
                train_cmd = [
                    "fusion-gan-cli", "train", "--data", data, "--res", str(args.res), "--iters", str(args.iters),
                    "--seed", str(seed), *arm_cli_flags(arm), "--out", arm_dir,
                ]
                eval_cmd = ["fusion-gan-cli", "eval", "--checkpoint", ckpt, "--data", data, *holdout, "--out", os.path.join(arm_dir, "eval")]
                rc = subprocess.call(train_cmd, stdout=subprocess.DEVNULL)
                if rc == 0:
                    rc = subprocess.call(eval_cmd, stdout=subprocess.DEVNULL)
                progress.remove_task(task)
                if rc != 0:
                    console.print(f"[yellow]⚠ arm failed:[/yellow] seed {seed} {arm.name} (exit {rc})")
                    continue
                results[(seed, arm.name)] = read_metrics(os.path.join(arm_dir, "eval"))
                console.print(f"[green]✓[/green] seed {seed}: {arm.name}")

    table = Table(title=f"ablation ({args.n_samples} held-out samples)")
    table.add_column("seed")
    table.add_column("arm")
    table.add_column("losses")
    table.add_column("oracle L1", justify="right")
    table.add_column("copy-x L1", justify="right")
    table.add_column("mean OKS", justify="right")
    table.add_column("identity", justify="right")
    for seed in args.seeds:
        for arm in ABLATION_ARMS:
            m = results.get((seed, arm.name))
            if m is None:
                table.add_row(str(seed), arm.name, arm.description, "-", "-", "-", "-")
                continue
            table.add_row(
                str(seed), arm.name, arm.description, f"{m.oracle_l1_gen:.4f}", f"{m.oracle_l1_copy_x:.4f}",
                f"{m.mean_oks:.3f}", f"{m.identity_score:.3f}",
            )
    console.print(table)

    need = min(MIN_PASSING_SEEDS, len(args.seeds))
    full: List[List[Criterion]] = []
    lost: List[List[Criterion]] = []
    for seed in args.seeds:
        if (seed, FULL) in results and seed in copy_x:
            full.append(desk_criteria(results[(seed, FULL)], copy_x[seed]))
        if (seed, IDENTITY_ONLY) in results:
            lost.append([shape_lost(results[(seed, IDENTITY_ONLY)])])
    ok = True
    if not run_passes(full, min_passing=need):
        console.print(f"[red]{FULL} does not meet the desk criteria on {need} seeds[/red]")
        ok = False
    if not run_passes(lost, min_passing=need):
        console.print(f"[red]{IDENTITY_ONLY} beats copy-x on oracle L1; shape should be lost without shape terms[/red]")
        ok = False
    if len(results) != len(ABLATION_ARMS) * len(args.seeds):
        console.print("[red]some arms failed to run[/red]")
        ok = False
    if ok:
        console.print("[green]ablation ordering holds[/green]")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
