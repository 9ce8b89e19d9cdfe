"""
Palette-mask landmark detection.

The glyph's soft coverage is recovered per pixel by projecting the image onto
the foreground-minus-background direction of the known identity. The largest
connected blob (coverage > 0.5, 8-connected) is kept together with a 2-pixel
rim for anti-aliased edges. Glyph type and pose come from moments of the
coverage:

- a second-moment eigenvalue ratio above 4 means a bar; its length and
  thickness follow from the eigenvalues after removing the 1/12 px^2 that
  pixel-area averaging adds;
- otherwise the normalised third vs fourth complex moments separate
  triangles (3-fold symmetry) from squares (4-fold); the vertex direction is
  ``arg(M_n) / n`` and the circumradius follows from the area.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage

from fusion_gan.data import IdentitySpec, NUM_LANDMARKS, background_field, landmarks_from_geometry
from fusion_gan.engine import FloatArray, Tensor

from .types import LandmarkPoint, LandmarkSet

MIN_AREA_FRAC = 0.01
BAR_RATIO = 4.0
PIXEL_VARIANCE = 1.0 / 12.0
RIM = 2

# |M3| / A^2.5 of an equilateral triangle and |M4| / A^3 of a square
TRIANGLE_M3 = (3.0 * math.sqrt(3.0) / 40.0) / (3.0 * math.sqrt(3.0) / 4.0) ** 2.5
SQUARE_M4 = 1.0 / 60.0


def _as_array(img: Tensor | FloatArray) -> FloatArray:
    return img.data if isinstance(img, Tensor) else np.asarray(img, dtype=np.float64)


def coverage_map(img: Tensor | FloatArray, identity: IdentitySpec) -> FloatArray:
    """Per-pixel foreground fraction in [0, 1] relative to the identity's background field."""
    arr = _as_array(img)
    bgf = background_field(identity, arr.shape[1])
    direction = np.asarray(identity.fg, dtype=np.float64)[:, None, None] - bgf
    denom = np.maximum((direction * direction).sum(axis=0), 1e-12)
    cov = ((arr - bgf) * direction).sum(axis=0) / denom
    return np.clip(cov, 0.0, 1.0)


def glyph_weights(cov: FloatArray, min_area_frac: float = MIN_AREA_FRAC) -> Optional[FloatArray]:
    """Coverage restricted to the largest blob and its rim, or ``None`` when too small."""
    labels, n = ndimage.label(cov > 0.5, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return None
    sizes = np.bincount(labels.ravel())[1:]
    best = int(np.argmax(sizes)) + 1
    if sizes[best - 1] <= min_area_frac * cov.size:
        return None
    region = ndimage.binary_dilation(labels == best, structure=np.ones((3, 3), dtype=bool), iterations=RIM)
    return np.where(region, cov, 0.0)


def _moments(w: FloatArray) -> Tuple[float, FloatArray, FloatArray, complex, complex]:
    h, wd = w.shape
    ys, xs = np.mgrid[0:h, 0:wd]
    px = xs + 0.5
    py = ys + 0.5
    area = float(w.sum())
    cx = float((w * px).sum() / area)
    cy = float((w * py).sum() / area)
    dx = px - cx
    dy = py - cy
    cov = np.array(
        [
            [(w * dx * dx).sum(), (w * dx * dy).sum()],
            [(w * dx * dy).sum(), (w * dy * dy).sum()],
        ]
    ) / area
    z = dx + 1j * dy
    m3 = complex((w * z**3).sum())
    m4 = complex((w * z**4).sum())
    return area, np.array([cx, cy]), cov, m3, m4


def classify_and_fit(w: FloatArray) -> Tuple[str, FloatArray, FloatArray]:
    """Fit a glyph to coverage weights.

    Returns
    -------
    (glyph, outline, center)
        ``outline`` uses the same vertex convention as
        :func:`fusion_gan.data.glyph_polygon`.
    """
    area, center, cov, m3, m4 = _moments(w)
    evals, evecs = np.linalg.eigh(cov)
    lam_minor, lam_major = float(evals[0]), float(evals[1])
    if lam_major > BAR_RATIO * max(lam_minor, 1e-12):
        u = evecs[:, 1]
        n = evecs[:, 0]
        hl = math.sqrt(12.0 * max(lam_major - PIXEL_VARIANCE, 0.0)) / 2.0
        ht = math.sqrt(12.0 * max(lam_minor - PIXEL_VARIANCE, 0.0)) / 2.0
        outline = np.stack(
            [
                center + hl * u + ht * n,
                center - hl * u + ht * n,
                center - hl * u - ht * n,
                center + hl * u - ht * n,
            ]
        )
        return "bar", outline, center
    tri_score = abs(m3) / area**2.5 / TRIANGLE_M3
    sq_score = abs(m4) / area**3 / SQUARE_M4
    if tri_score > sq_score:
        r = math.sqrt(4.0 * area / (3.0 * math.sqrt(3.0)))
        theta = np.angle(m3) / 3.0
        ang = theta + np.arange(3) * (2.0 * math.pi / 3.0)
        glyph = "triangle"
    else:
        r = math.sqrt(area / 2.0)
        theta = np.angle(m4) / 4.0
        ang = theta + np.arange(4) * (math.pi / 2.0)
        glyph = "square"
    outline = center + r * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return glyph, outline, center


def detect_landmarks(img: Tensor | FloatArray, identity: IdentitySpec) -> LandmarkSet:
    """Detect the K=4 landmarks of the glyph drawn in ``identity``'s palette.

    Landmarks come back in the same canonical order and naming as the
    ground-truth landmarks of :class:`fusion_gan.data.ShapeSpec`. When no
    coverage blob exceeds 1% of the image area every landmark is absent.
    """
    arr = _as_array(img)
    res = int(arr.shape[1])
    w = glyph_weights(coverage_map(arr, identity))
    if w is None:
        return LandmarkSet.absent(NUM_LANDMARKS, res)
    glyph, outline, center = classify_and_fit(w)
    points = []
    for lm in landmarks_from_geometry(glyph, outline, center):  # type: ignore[arg-type]
        x = float(np.clip(lm.x, 0.0, res))
        y = float(np.clip(lm.y, 0.0, res))
        points.append(LandmarkPoint(name=lm.name, x=x, y=y))
    return LandmarkSet(points=points, res=res)
