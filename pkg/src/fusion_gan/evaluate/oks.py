"""
Modified object keypoint similarity.
"""

from __future__ import annotations

import math

from fusion_gan.errors import ContractError

from .types import LandmarkSet

DEFAULT_SIGMA_FRAC = 0.1
DEFAULT_PENALTY_PX = 100.0
PENALTY_REFERENCE_RES = 256


def modified_oks(
    ref: LandmarkSet,
    gen: LandmarkSet,
    sigma_frac: float = DEFAULT_SIGMA_FRAC,
    penalty_px: float = DEFAULT_PENALTY_PX,
) -> float:
    """Mean Gaussian keypoint similarity with a fixed penalty for missed detections.

    For every reference-present keypoint the score is ``exp(-d^2 / (2 sigma^2))``
    where ``sigma = sigma_frac * res`` and ``d`` is the pixel distance to the
    generated keypoint, or ``penalty_px * res / 256`` when that keypoint is
    absent. Returns 0.0 when no reference keypoint is present.

    Parameters
    ----------
    ref, gen : LandmarkSet
        Reference and generated landmarks; same K and resolution.
    sigma_frac : float, default=0.1
        Gaussian width as a fraction of the image side.
    penalty_px : float, default=100.0
        Missed-detection distance at 256 px, scaled to ``res``.

    Returns
    -------
    float
        Score in [0, 1].

    Raises
    ------
    ContractError
        If K or the resolution differ, or ``sigma_frac`` is not positive.
    """
    if len(ref.points) != len(gen.points):
        raise ContractError(f"landmark count mismatch: {len(ref.points)} vs {len(gen.points)}")
    if ref.res != gen.res:
        raise ContractError(f"landmark resolution mismatch: {ref.res} vs {gen.res}")
    if sigma_frac <= 0:
        raise ContractError(f"sigma_frac must be positive, got {sigma_frac}")
    sigma = sigma_frac * ref.res
    penalty = penalty_px * ref.res / PENALTY_REFERENCE_RES
    scores = []
    for r, g in zip(ref.points, gen.points):
        if not r.present:
            continue
        d = math.hypot(g.x - r.x, g.y - r.y) if g.present else penalty
        scores.append(math.exp(-(d * d) / (2.0 * sigma * sigma)))
    if not scores:
        return 0.0
    return float(sum(scores) / len(scores))
