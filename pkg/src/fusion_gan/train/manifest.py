"""
Run manifests written next to CLI outputs.
"""

from __future__ import annotations

import logging
import os
from datetime import datetime, timezone
from typing import List

from fusion_gan.data import write_json
from fusion_gan.errors import ContractError, DataError

from .types import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def manifest_artifacts(manifest: RunManifest) -> List[str]:
    """Files the manifest vouches for."""
    files = list(manifest.checkpoints) + list(manifest.metrics)
    if manifest.history:
        files.append(manifest.history)
    return files


def write_manifest(out_dir: str, manifest: RunManifest) -> str:
    """Write ``out_dir/manifest.json`` after checking every listed artifact exists.

    Raises
    ------
    ContractError
        If a listed artifact is missing.
    DataError
        If the manifest cannot be written.
    """
    missing = [p for p in manifest_artifacts(manifest) if not os.path.isfile(p)]
    if missing:
        raise ContractError(f"manifest lists missing artifacts: {', '.join(missing)}")
    path = os.path.join(out_dir, MANIFEST_FILE)
    try:
        os.makedirs(out_dir, exist_ok=True)
        write_json(path, manifest.model_dump(mode="json"))
    except OSError as e:
        raise DataError(f"cannot write manifest: {e}", path=path) from e
    logger.debug("manifest written: %s", path)
    return path
