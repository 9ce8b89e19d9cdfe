"""
PNG IO and image grids.

Images are ``(3, H, W)`` float arrays in [0, 1]; on disk they are 8-bit RGB
with ``byte = round(v * 255)`` and ``v = byte / 255``.
"""

from __future__ import annotations

import os
from typing import List, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from fusion_gan.engine import FloatArray
from fusion_gan.errors import DataError


def to_bytes(img: FloatArray) -> np.ndarray:
    """``(3, H, W)`` floats to ``(H, W, 3)`` uint8."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[0] != 3:
        raise DataError(f"expected a (3, H, W) image, got shape {arr.shape}")
    return np.ascontiguousarray(np.round(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8).transpose(1, 2, 0))


def save_png(img: FloatArray, path: str) -> None:
    """Write an image as 8-bit RGB PNG, creating parent directories.

    Raises
    ------
    DataError
        If the file cannot be written.
    """
    parent = os.path.dirname(path)
    try:
        if parent:
            os.makedirs(parent, exist_ok=True)
        Image.fromarray(to_bytes(img)).save(path, format="PNG")
    except OSError as e:
        raise DataError(f"cannot write image: {e}", path=path) from e


def load_png(path: str) -> FloatArray:
    """Read a PNG as a ``(3, H, W)`` float64 array.

    Raises
    ------
    DataError
        If the file is missing, not an image or corrupt; the message names it.
    """
    try:
        with Image.open(path) as im:
            im.load()
            rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise DataError(f"cannot read image {path}: {e}", path=path) from e
    return rgb.transpose(2, 0, 1).astype(np.float64) / 255.0


def compose_grid(rows: Sequence[Sequence[FloatArray]], margin: int = 2, fill: float = 1.0) -> FloatArray:
    """Tile equally sized images into one ``(3, H, W)`` canvas.

    With ``r`` rows, ``c`` columns and side ``s`` the canvas is
    ``(r*s + (r+1)*margin) x (c*s + (c+1)*margin)``.
    """
    if not rows or not rows[0]:
        raise DataError("image grid needs at least one image")
    _, h, w = np.asarray(rows[0][0]).shape
    n_cols = max(len(r) for r in rows)
    out = np.full(
        (3, len(rows) * h + (len(rows) + 1) * margin, n_cols * w + (n_cols + 1) * margin),
        fill,
        dtype=np.float64,
    )
    for i, row in enumerate(rows):
        for j, img in enumerate(row):
            top = margin + i * (h + margin)
            left = margin + j * (w + margin)
            out[:, top : top + h, left : left + w] = img
    return out


def list_pngs(directory: str) -> List[str]:
    """Sorted PNG file names in ``directory``."""
    return sorted(f for f in os.listdir(directory) if f.lower().endswith(".png"))
