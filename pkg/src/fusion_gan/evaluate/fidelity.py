"""
Oracle-L1 fidelity and palette-based identity scoring.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from fusion_gan.data import FusionSample, IdentitySpec, background_field
from fusion_gan.engine import FloatArray, Tensor
from fusion_gan.errors import ContractError
from fusion_gan.nets import Fuser

from .landmarks import MIN_AREA_FRAC


def fuse_array(g: Fuser, x: FloatArray, y: FloatArray) -> FloatArray:
    """Run a fuser on raw arrays outside any gradient tape."""
    return g(Tensor(x), Tensor(y)).numpy()


def oracle_l1(g: Fuser, samples: Sequence[FusionSample]) -> Tuple[float, float, float]:
    """Mean absolute difference to the oracle for ``g`` and both copy baselines.

    Returns
    -------
    (mean_gen, mean_copy_x, mean_copy_y)

    Raises
    ------
    ContractError
        If ``samples`` is empty or a sample has no oracle.
    """
    if not samples:
        raise ContractError("oracle_l1 needs at least one sample")
    gen, cx, cy = [], [], []
    for i, s in enumerate(samples):
        if s.oracle is None:
            raise ContractError(f"sample {i} has no oracle image")
        gen.append(float(np.abs(fuse_array(g, s.x, s.y) - s.oracle).mean()))
        cx.append(float(np.abs(s.x - s.oracle).mean()))
        cy.append(float(np.abs(s.y - s.oracle).mean()))
    return float(np.mean(gen)), float(np.mean(cx)), float(np.mean(cy))


def dominant_foreground(
    img: FloatArray, candidate: IdentitySpec, min_area_frac: float = MIN_AREA_FRAC
) -> FloatArray | None:
    """Mean color of pixels far from ``candidate``'s background field.

    A pixel counts as foreground when its distance to the background field
    exceeds half the foreground-background distance. ``None`` unless the
    foreground and the remaining background each cover at least
    ``min_area_frac`` of the image: a flat or fully saturated image shows no
    glyph in this palette.
    """
    arr = np.asarray(img, dtype=np.float64)
    bgf = background_field(candidate, arr.shape[1])
    fg = np.asarray(candidate.fg, dtype=np.float64)[:, None, None]
    dist = np.linalg.norm(arr - bgf, axis=0)
    gap = np.linalg.norm(fg - bgf, axis=0)
    mask = dist > 0.5 * gap
    frac = float(mask.mean())
    if frac < min_area_frac or frac > 1.0 - min_area_frac:
        return None
    return arr[:, mask].mean(axis=1)


def palette_match(img: FloatArray, candidate: IdentitySpec) -> Optional[float]:
    """Distance from the image's foreground estimate to ``candidate.fg``.

    ``None`` when the candidate sees no glyph, or when the estimate lies
    farther than half the candidate's largest foreground-background gap from
    its foreground color.
    """
    est = dominant_foreground(img, candidate)
    if est is None:
        return None
    fg = np.asarray(candidate.fg, dtype=np.float64)
    gap = np.linalg.norm(fg[:, None, None] - background_field(candidate, np.asarray(img).shape[1]), axis=0)
    d = float(np.linalg.norm(est - fg))
    return d if d < 0.5 * float(gap.max()) else None


def nearest_identity(img: FloatArray, palettes: Sequence[IdentitySpec]) -> Optional[int]:
    """Index of the palette whose foreground best explains the image.

    ``None`` when no palette matches (see :func:`palette_match`).
    """
    best: Optional[int] = None
    best_d = np.inf
    for k, cand in enumerate(palettes):
        d = palette_match(img, cand)
        if d is not None and d < best_d:
            best, best_d = k, d
    return best


def identity_score(
    imgs: Iterable[Tensor | FloatArray],
    claimed: IdentitySpec,
    palettes: Sequence[IdentitySpec],
) -> float:
    """Fraction of images attributed to ``claimed`` among ``palettes``.

    ``claimed`` is added to the candidate list when missing. An image no
    palette matches counts as a miss. An empty image list scores 0.0.

    Raises
    ------
    ContractError
        If fewer than two distinct palettes compete.
    """
    candidates: List[IdentitySpec] = list(palettes)
    if claimed not in candidates:
        candidates.append(claimed)
    if len(candidates) < 2:
        raise ContractError("identity_score needs at least two palettes to choose between")
    target = candidates.index(claimed)
    hits = total = 0
    for img in imgs:
        arr = img.data if isinstance(img, Tensor) else np.asarray(img)
        hits += nearest_identity(arr, candidates) == target
        total += 1
    return hits / total if total else 0.0
