"""
Evaluation over held-out samples and report emission (metrics JSON + image grid).
"""

from __future__ import annotations

import logging
import os
from typing import List, Optional, Protocol, Sequence

import numpy as np

from fusion_gan.data import FusionSample, IdentitySpec, write_json
from fusion_gan.errors import ContractError, DataError
from fusion_gan.nets import Fuser
from fusion_gan.utils.imageio import compose_grid, save_png

from .fidelity import fuse_array, identity_score, oracle_l1
from .landmarks import detect_landmarks
from .oks import modified_oks
from .types import EvalMetrics, LandmarkSet, ReportPaths

logger = logging.getLogger(__name__)

GRID_FILE = "grid.png"
METRICS_FILE = "metrics.json"
GRID_MARGIN = 2
MAX_GRID_ROWS = 8


class HasIteration(Protocol):
    iteration: int


def sample_palettes(samples: Sequence[FusionSample]) -> List[IdentitySpec]:
    """Distinct identities appearing in ``samples``, ordered by id."""
    found = {}
    for s in samples:
        for ident in (s.x_identity, s.y_identity):
            if ident is not None:
                found[ident.id] = ident
    return [found[k] for k in sorted(found)]


def evaluate_samples(
    g: Fuser,
    samples: Sequence[FusionSample],
    palettes: Optional[Sequence[IdentitySpec]] = None,
    iteration: int = 0,
) -> EvalMetrics:
    """Compute the oracle-L1 triple, mean modified OKS and identity score.

    Raises
    ------
    ContractError
        If a sample lacks its oracle, landmarks or x identity.
    """
    gen, copy_x, copy_y = oracle_l1(g, samples)
    cands = list(palettes) if palettes is not None else sample_palettes(samples)
    oks_scores: List[float] = []
    id_hits: List[float] = []
    for i, s in enumerate(samples):
        if s.oracle_landmarks is None or s.x_identity is None:
            raise ContractError(f"sample {i} has no landmarks or identity spec")
        out = fuse_array(g, s.x, s.y)
        res = int(out.shape[1])
        ref = LandmarkSet.from_landmarks(s.oracle_landmarks, res)
        oks_scores.append(modified_oks(ref, detect_landmarks(out, s.x_identity)))
        id_hits.append(identity_score([out], s.x_identity, cands))
    return EvalMetrics(
        oracle_l1_gen=gen,
        oracle_l1_copy_x=copy_x,
        oracle_l1_copy_y=copy_y,
        mean_oks=float(np.mean(oks_scores)),
        identity_score=float(np.mean(id_hits)),
        iteration=iteration,
    )


def report_grid(g: Fuser, samples: Sequence[FusionSample], max_rows: int = MAX_GRID_ROWS) -> np.ndarray:
    """Rows of ``x | y | G(x, y) | oracle`` for the first ``max_rows`` samples."""
    rows = []
    for s in samples[:max_rows]:
        oracle = s.oracle if s.oracle is not None else np.zeros_like(s.x)
        rows.append([s.x, s.y, fuse_array(g, s.x, s.y), oracle])
    return compose_grid(rows, margin=GRID_MARGIN)


def emit_report(
    history: Sequence[HasIteration],
    samples: Sequence[FusionSample],
    g: Fuser,
    path: str,
    palettes: Optional[Sequence[IdentitySpec]] = None,
    max_rows: int = MAX_GRID_ROWS,
) -> ReportPaths:
    """Write ``grid.png`` and ``metrics.json`` into directory ``path``.

    The metrics iteration is the last history record's iteration (0 without
    history).

    Raises
    ------
    DataError
        If the directory or files cannot be written; the message names the path.
    """
    iteration = history[-1].iteration if history else 0
    metrics = evaluate_samples(g, samples, palettes, iteration)
    grid_path = os.path.join(path, GRID_FILE)
    metrics_path = os.path.join(path, METRICS_FILE)
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise DataError(f"cannot create report directory: {e}", path=path) from e
    save_png(report_grid(g, samples, max_rows), grid_path)
    try:
        write_json(metrics_path, metrics.model_dump())
    except OSError as e:
        raise DataError(f"cannot write metrics: {e}", path=metrics_path) from e
    logger.info(
        "report: oracle L1 %.4f (copy-x %.4f, copy-y %.4f), OKS %.3f, identity %.3f -> %s",
        metrics.oracle_l1_gen,
        metrics.oracle_l1_copy_x,
        metrics.oracle_l1_copy_y,
        metrics.mean_oks,
        metrics.identity_score,
        path,
    )
    return ReportPaths(grid_png=grid_path, metrics_json=metrics_path)
