"""
Procedural identity sets.

Identities (palettes and textures) come from one stream seeded with ``seed``;
every image draws its shape from its own sub-seed ``(seed, set, index)`` so
serial and threaded generation agree bit-exactly.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np

from fusion_gan.engine import FloatArray
from fusion_gan.errors import ConfigError, SpecError

from .render import make_shape_spec, render_array, shape_is_renderable
from .types import (
    CENTER_RANGE,
    GLYPHS,
    LEGIBILITY,
    SCALE_RANGE,
    SUPPORTED_RES,
    TEXTURES,
    IdentitySet,
    IdentitySpec,
    ShapeSpec,
)

logger = logging.getLogger(__name__)

PERIODS = (4, 6, 8)
MIN_PALETTE_DISTANCE = 0.3
MAX_PALETTE_ATTEMPTS = 10_000
MAX_SHAPE_ATTEMPTS = 1_000


def _grid_color(rng: np.random.Generator) -> Tuple[float, float, float]:
    k = rng.integers(0, 256, size=3)
    return (float(k[0] / 255.0), float(k[1] / 255.0), float(k[2] / 255.0))


def _legible(spec: IdentitySpec) -> bool:
    fg = np.asarray(spec.fg)
    return bool(
        np.max(np.abs(fg - np.asarray(spec.bg))) >= LEGIBILITY
        and np.max(np.abs(fg - np.asarray(spec.shade))) >= LEGIBILITY
    )


def _distinct(spec: IdentitySpec, others: List[IdentitySpec]) -> bool:
    fg = np.asarray(spec.fg)
    bg = np.asarray(spec.bg)
    return all(
        min(
            np.linalg.norm(fg - np.asarray(o.fg)),
            np.linalg.norm(bg - np.asarray(o.bg)),
            np.linalg.norm(fg - np.asarray(o.bg)),
            np.linalg.norm(bg - np.asarray(o.fg)),
        )
        >= MIN_PALETTE_DISTANCE
        for o in others
    )


def sample_identities(n_sets: int, rng: np.random.Generator) -> List[IdentitySpec]:
    """Draw ``n_sets`` pairwise-distinct, legible identities on the 8-bit grid.

    The foreground must also stand out from the texture shade, so glyphs stay
    legible on textured cells.

    Raises
    ------
    ConfigError
        If distinct palettes cannot be found (very large ``n_sets``).
    """
    out: List[IdentitySpec] = []
    attempts = 0
    while len(out) < n_sets:
        attempts += 1
        if attempts > MAX_PALETTE_ATTEMPTS:
            raise ConfigError(f"could not draw {n_sets} distinct palettes; use fewer sets")
        spec = IdentitySpec(
            id=len(out),
            fg=_grid_color(rng),
            bg=_grid_color(rng),
            texture=TEXTURES[int(rng.integers(len(TEXTURES)))],
            period=int(PERIODS[int(rng.integers(len(PERIODS)))]),
        )
        if _legible(spec) and _distinct(spec, out):
            out.append(spec)
    return out


def sample_shape(rng: np.random.Generator, res: int) -> ShapeSpec:
    """Draw a glyph uniformly, then its geometry until it fits the canvas.

    Only the geometry is redrawn on rejection, so glyph types stay exactly
    uniform.
    """
    glyph = GLYPHS[int(rng.integers(len(GLYPHS)))]
    for _ in range(MAX_SHAPE_ATTEMPTS):
        cx, cy = rng.uniform(*CENTER_RANGE, size=2)
        scale = rng.uniform(*SCALE_RANGE)
        rotation = rng.uniform(0.0, 2.0 * math.pi)
        spec = make_shape_spec(glyph, float(cx), float(cy), float(rotation), float(scale), res)
        if shape_is_renderable(spec, res):
            return spec
    raise SpecError(f"no renderable {glyph} found in {MAX_SHAPE_ATTEMPTS} draws at res {res}")


def _render_instance(
    identity: IdentitySpec, seed: int, set_idx: int, idx: int, res: int
) -> Tuple[FloatArray, ShapeSpec]:
    rng = np.random.default_rng([seed, set_idx, idx])
    shape = sample_shape(rng, res)
    return render_array(identity, shape, res), shape


def generate_sets(
    n_sets: int, n_per_set: int, res: int, seed: int, workers: int = 1
) -> List[IdentitySet]:
    """Generate ``n_sets`` identity sets of ``n_per_set`` rendered glyphs each.

    Parameters
    ----------
    n_sets : int
        Number of identities; at least 2.
    n_per_set : int
        Images per set.
    res : int
        Image side (16, 32 or 64).
    seed : int
        Dataset seed; the result is a pure function of the arguments.
    workers : int, default=1
        Render threads; output does not depend on it.

    Raises
    ------
    ConfigError
        On ``n_sets < 2``, ``n_per_set < 1`` or an unsupported resolution.
    """
    if n_sets < 2:
        raise ConfigError(f"n_sets must be >= 2 (identities need a counterpart), got {n_sets}")
    if n_per_set < 1:
        raise ConfigError(f"n_per_set must be >= 1, got {n_per_set}")
    if res not in SUPPORTED_RES:
        raise ConfigError(f"res must be one of {SUPPORTED_RES}, got {res}")
    identities = sample_identities(n_sets, np.random.default_rng(seed))
    jobs = [(s, i) for s in range(n_sets) for i in range(n_per_set)]

    def run(job: Tuple[int, int]) -> Tuple[FloatArray, ShapeSpec]:
        s, i = job
        return _render_instance(identities[s], seed, s, i, res)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rendered = list(pool.map(run, jobs))
    else:
        rendered = [run(job) for job in jobs]

    sets: List[IdentitySet] = []
    for s, identity in enumerate(identities):
        chunk = rendered[s * n_per_set : (s + 1) * n_per_set]
        sets.append(
            IdentitySet(
                label=f"set_{identity.id}",
                images=[img for img, _ in chunk],
                identity=identity,
                shapes=[shape for _, shape in chunk],
                files=[f"img_{i:04d}.png" for i in range(n_per_set)],
            )
        )
    logger.info("generated %d sets x %d images at %dx%d (seed %d)", n_sets, n_per_set, res, res, seed)
    return sets
