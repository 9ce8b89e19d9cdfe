"""
Dataset directories: one subdirectory per identity set.

Layout::

    root/set_<id>/img_<idx>.png
    root/set_<id>/specs.json      (synthetic data only)

``specs.json`` records the identity and per-image shape specs so a reloaded
synthetic dataset keeps its oracle.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from fusion_gan.errors import ConfigError, DataError
from fusion_gan.utils.imageio import list_pngs, load_png, save_png

from .types import IdentitySet, IdentitySpec, ShapeSpec

logger = logging.getLogger(__name__)

SPECS_FILE = "specs.json"


class ImageRecord(BaseModel):
    file: str
    shape: Optional[ShapeSpec] = None


class SetRecord(BaseModel):
    """Content of ``specs.json``."""

    identity: Optional[IdentitySpec] = None
    images: List[ImageRecord] = []


def write_json(path: str, payload: object) -> None:
    """Write JSON with sorted keys and a trailing newline (byte-stable output)."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def save_sets(sets: Sequence[IdentitySet], root: str) -> List[str]:
    """Write every set under ``root``; returns the set directories.

    Raises
    ------
    DataError
        If a file cannot be written.
    """
    dirs: List[str] = []
    for i, s in enumerate(sets):
        set_id = s.identity.id if s.identity is not None else i
        d = os.path.join(root, f"set_{set_id}")
        files = s.files or [f"img_{k:04d}.png" for k in range(len(s))]
        for name, img in zip(files, s.images):
            save_png(img, os.path.join(d, name))
        record = SetRecord(
            identity=s.identity,
            images=[ImageRecord(file=name, shape=s.shape_of(k)) for k, name in enumerate(files)],
        )
        try:
            write_json(os.path.join(d, SPECS_FILE), record.model_dump(mode="json"))
        except OSError as e:
            raise DataError(f"cannot write specs: {e}", path=d) from e
        dirs.append(d)
    logger.info("wrote %d sets to %s", len(dirs), root)
    return dirs


def _read_specs(path: str) -> Optional[SetRecord]:
    if not os.path.isfile(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            return SetRecord.model_validate(json.load(f))
    except (OSError, ValueError, ValidationError) as e:
        raise DataError(f"invalid specs file {path}: {e}", path=path) from e


def load_image_dirs(root: str) -> List[IdentitySet]:
    """Load one :class:`IdentitySet` per subdirectory of ``root``.

    Sets are labelled by subdirectory name, in sorted order. When a
    subdirectory holds ``specs.json`` its identity and shapes are re-attached.

    Raises
    ------
    ConfigError
        If ``root`` has fewer than two subdirectories.
    DataError
        If ``root`` is missing, a subdirectory holds no PNG, an image is
        unreadable or image sizes differ; the message names the file.
    """
    if not os.path.isdir(root):
        raise DataError(f"dataset directory not found: {root}", path=root)
    subdirs = sorted(d for d in os.listdir(root) if os.path.isdir(os.path.join(root, d)))
    if len(subdirs) < 2:
        raise ConfigError(f"{root} must contain at least 2 set subdirectories, found {len(subdirs)}")
    ref_shape = None
    sets: List[IdentitySet] = []
    for sub in subdirs:
        d = os.path.join(root, sub)
        files = list_pngs(d)
        if not files:
            raise DataError(f"no PNG images in {d}", path=d)
        images = []
        for name in files:
            path = os.path.join(d, name)
            img = load_png(path)
            if ref_shape is None:
                ref_shape = img.shape
            elif img.shape != ref_shape:
                raise DataError(
                    f"image {path} is {img.shape[2]}x{img.shape[1]}, expected "
                    f"{ref_shape[2]}x{ref_shape[1]}",
                    path=path,
                )
            images.append(img)
        record = _read_specs(os.path.join(d, SPECS_FILE))
        identity = record.identity if record is not None else None
        shapes: List[Optional[ShapeSpec]] = []
        if record is not None:
            by_file: Dict[str, Optional[ShapeSpec]] = {r.file: r.shape for r in record.images}
            shapes = [by_file.get(name) for name in files]
        sets.append(IdentitySet(label=sub, images=images, identity=identity, shapes=shapes, files=files))
    logger.info("loaded %d sets from %s", len(sets), root)
    return sets


def git_blob_hash(data: bytes) -> str:
    """SHA-1 of ``b"blob <len>\\0" + data``, as git hashes file contents."""
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def dataset_hash(root: str) -> str:
    """Content hash of a directory tree.

    SHA-256 over ``"<blob-hash> <relative/posix/path>\\n"`` lines of every file,
    sorted by path.

    Raises
    ------
    DataError
        If ``root`` is not a directory or a file cannot be read.
    """
    if not os.path.isdir(root):
        raise DataError(f"dataset directory not found: {root}", path=root)
    entries = []
    for dirpath, _, filenames in os.walk(root):
        for name in filenames:
            full = os.path.join(dirpath, name)
            rel = os.path.relpath(full, root).replace(os.sep, "/")
            try:
                with open(full, "rb") as f:
                    entries.append((rel, git_blob_hash(f.read())))
            except OSError as e:
                raise DataError(f"cannot read {full}: {e}", path=full) from e
    h = hashlib.sha256()
    for rel, blob in sorted(entries):
        h.update(f"{blob} {rel}\n".encode("utf-8"))
    return h.hexdigest()
