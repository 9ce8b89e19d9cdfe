#!/usr/bin/env python3
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from typing import Dict, List

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
    seed_passes,
)
from fusion_gan.train import Defaults


def run(cmd: List[str]) -> int:
    return subprocess.call(cmd, stdout=subprocess.DEVNULL)


def read_metrics(report_dir: str) -> EvalMetrics:
    with open(os.path.join(report_dir, "metrics.json"), "r", encoding="utf-8") as f:
        return EvalMetrics.model_validate(json.load(f))


def main(argv: List[str]) -> int:
    ap = argparse.ArgumentParser(
        description="Desk-scale acceptance run: per seed generate data, train, evaluate against copy-x"
    )
    ap.add_argument("--out", default="runs/desk", help="Working directory")
    ap.add_argument("--res", type=int, default=Defaults.RES, help="Image side")
    ap.add_argument("--iters", type=int, default=Defaults.ITERS, help="Training iterations")
    ap.add_argument("--seeds", type=int, nargs="+", default=list(ACCEPTANCE_SEEDS), help="Dataset and training seeds")
    ap.add_argument("--n-samples", type=int, default=HOLDOUT_SAMPLES, help="Held-out cross-identity samples")
    args = ap.parse_args(argv)

    console = Console()
    console.print(
        Panel.fit(
            f"[bold]Desk-scale run[/bold]\nres: [cyan]{args.res}[/cyan]  iters: [cyan]{args.iters}[/cyan]  "
            f"seeds: [cyan]{' '.join(map(str, args.seeds))}[/cyan]\nout: [green]{args.out}[/green]",
            title="fusion-gan",
        )
    )

    per_seed: Dict[int, List[Criterion]] = {}
    metrics: Dict[int, EvalMetrics] = {}
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        for seed in args.seeds:
            root = os.path.join(args.out, f"seed_{seed}")
            data = os.path.join(root, "data")
            train_dir = os.path.join(root, "train")
            ckpt = os.path.join(train_dir, "checkpoints", f"ckpt_{args.iters:06d}.json")
            holdout = ["--n-samples", str(args.n_samples), "--seed", str(HOLDOUT_SEED)]
            steps = [
                ("generate dataset", ["fusion-gan-cli", "gen-data", "--res", str(args.res), "--seed", str(seed), "--out", data]),
                (
                    "train",
                    [
                        "fusion-gan-cli", "train", "--data", data, "--res", str(args.res), "--iters", str(args.iters),
                        "--seed", str(seed), "--eval-every", "250", "--out", train_dir,
                    ],
                ),
                ("evaluate copy-x", ["fusion-gan-cli", "eval", "--baseline", "copy-x", "--data", data, *holdout, "--out", os.path.join(root, "eval_copy_x")]),
                ("evaluate checkpoint", ["fusion-gan-cli", "eval", "--checkpoint", ckpt, "--data", data, *holdout, "--out", os.path.join(root, "eval")]),
            ]
            failed = False
            for desc, cmd in steps:
                task = progress.add_task(f"seed {seed}: {desc}", total=None)
                rc = run(cmd)
                progress.remove_task(task)
                if rc != 0:
                    console.print(f"[red]✗[/red] seed {seed}: {desc} (exit {rc})")
                    failed = True
                    break
            if failed:
                continue
            gen = read_metrics(os.path.join(root, "eval"))
            metrics[seed] = gen
            per_seed[seed] = desk_criteria(gen, read_metrics(os.path.join(root, "eval_copy_x")))
            mark = "[green]✓[/green]" if seed_passes(per_seed[seed]) else "[yellow]✗[/yellow]"
            console.print(f"{mark} seed {seed}")

    table = Table(title=f"held-out metrics ({args.n_samples} samples)")
    table.add_column("seed")
    table.add_column("oracle L1", justify="right")
    table.add_column("copy-x L1", justify="right")
    table.add_column("mean OKS", justify="right")
    table.add_column("identity", justify="right")
    table.add_column("checks")
    for seed in args.seeds:
        m = metrics.get(seed)
        if m is None:
            table.add_row(str(seed), "-", "-", "-", "-", "run failed")
            continue
        checks = "; ".join(c.describe() for c in per_seed[seed] if not c.passed) or "all pass"
        table.add_row(
            str(seed), f"{m.oracle_l1_gen:.4f}", f"{m.oracle_l1_copy_x:.4f}", f"{m.mean_oks:.3f}", f"{m.identity_score:.3f}", checks
        )
    console.print(table)

    if not run_passes(list(per_seed.values()), min_passing=min(MIN_PASSING_SEEDS, len(args.seeds))):
        console.print("[red]desk criteria not met on enough seeds[/red]")
        return 1
    console.print("[green]desk criteria met[/green]")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
