"""
Training: configuration, the two phase steps, the FusionTrainer loop,
checkpoints, run manifests and ablation arms.
"""

from .ablation import ABLATION_ARMS, AblationArm, arm_cli_flags, arm_overrides, get_arm
from .checkpoint import FORMAT_VERSION, CheckpointDoc, LoadedCheckpoint, load_checkpoint, save_checkpoint
from .config import load_train_config, resolve_config_path
from .defaults import Defaults
from .manifest import MANIFEST_FILE, manifest_artifacts, utc_timestamp, write_manifest
from .steps import apply_update, train_step_phase1, train_step_phase2
from .trainer import CHECKPOINT_DIR, HISTORY_FILE, FusionTrainer, checkpoint_name, load_training_sets, train
from .types import HistoryRecord, LossToggles, RunManifest, StepLosses, TrainConfig, TrainHistory

__all__ = [
    "Defaults",
    "LossToggles",
    "TrainConfig",
    "StepLosses",
    "HistoryRecord",
    "TrainHistory",
    "RunManifest",
    "load_train_config",
    "resolve_config_path",
    "apply_update",
    "train_step_phase1",
    "train_step_phase2",
    "FusionTrainer",
    "load_training_sets",
    "checkpoint_name",
    "train",
    "HISTORY_FILE",
    "CHECKPOINT_DIR",
    "FORMAT_VERSION",
    "CheckpointDoc",
    "LoadedCheckpoint",
    "save_checkpoint",
    "load_checkpoint",
    "MANIFEST_FILE",
    "manifest_artifacts",
    "utc_timestamp",
    "write_manifest",
    "ABLATION_ARMS",
    "AblationArm",
    "get_arm",
    "arm_overrides",
    "arm_cli_flags",
]
