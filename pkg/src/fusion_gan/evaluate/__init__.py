"""
Evaluation: landmark detection, modified OKS, oracle fidelity, identity
scoring, baselines and report emission.
"""

from .acceptance import (
    ACCEPTANCE_SEEDS,
    HOLDOUT_SAMPLES,
    HOLDOUT_SEED,
    MIN_PASSING_SEEDS,
    Criterion,
    desk_criteria,
    run_passes,
    seed_passes,
    shape_lost,
)
from .baselines import BASELINES, make_baseline, oracle_fuser
from .fidelity import dominant_foreground, fuse_array, identity_score, nearest_identity, oracle_l1, palette_match
from .landmarks import classify_and_fit, coverage_map, detect_landmarks, glyph_weights
from .oks import DEFAULT_PENALTY_PX, DEFAULT_SIGMA_FRAC, modified_oks
from .report import GRID_FILE, METRICS_FILE, emit_report, evaluate_samples, report_grid, sample_palettes
from .types import EvalMetrics, LandmarkPoint, LandmarkSet, ReportPaths

__all__ = [
    "LandmarkPoint",
    "LandmarkSet",
    "EvalMetrics",
    "ReportPaths",
    "coverage_map",
    "glyph_weights",
    "classify_and_fit",
    "detect_landmarks",
    "DEFAULT_SIGMA_FRAC",
    "DEFAULT_PENALTY_PX",
    "modified_oks",
    "fuse_array",
    "oracle_l1",
    "dominant_foreground",
    "palette_match",
    "nearest_identity",
    "identity_score",
    "BASELINES",
    "make_baseline",
    "oracle_fuser",
    "GRID_FILE",
    "METRICS_FILE",
    "sample_palettes",
    "evaluate_samples",
    "report_grid",
    "emit_report",
    "ACCEPTANCE_SEEDS",
    "HOLDOUT_SAMPLES",
    "HOLDOUT_SEED",
    "MIN_PASSING_SEEDS",
    "Criterion",
    "desk_criteria",
    "shape_lost",
    "seed_passes",
    "run_passes",
]
