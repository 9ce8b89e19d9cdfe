"""
Pair sampling for training and held-out evaluation.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np

from fusion_gan.engine import FloatArray
from fusion_gan.errors import ContractError, DataError

from .generate import sample_shape
from .render import render_array
from .types import FusionSample, IdentitySet, IdentitySpec, ShapeSpec

# Held-out streams are seeded with this tag so they never coincide with the
# per-image training sub-seeds (seed, set, index).
HOLDOUT_STREAM = 0x484F4C44


def _pick_sets(n: int, same_identity: bool, rng: np.random.Generator) -> Tuple[int, int]:
    xs = int(rng.integers(n))
    if same_identity:
        return xs, xs
    ys = int(rng.integers(n - 1))
    return xs, ys + (ys >= xs)


def _other_index(n: int, exclude: int, rng: np.random.Generator) -> int:
    j = int(rng.integers(n - 1))
    return j + (j >= exclude)


def _oracle(
    identity: Optional[IdentitySpec], shape: Optional[ShapeSpec], res: int
) -> Optional[FloatArray]:
    if identity is None or shape is None:
        return None
    return render_array(identity, shape, res)


def sample_pair(
    sets: Sequence[IdentitySet], same_identity: bool, rng: np.random.Generator
) -> FusionSample:
    """Draw ``(x, y)`` from one set or from two different sets.

    Same-identity pairs use distinct images when the set has more than one.
    ``x_hat`` is drawn uniformly from x's set excluding x itself. When specs
    are attached, the sample carries the oracle rendering of (x's identity,
    y's shape) and y's landmarks.

    Raises
    ------
    DataError
        If there are no sets or any set is empty.
    ContractError
        If a cross-identity pair is requested from fewer than two sets.
    """
    if not sets:
        raise DataError("no identity sets to sample from")
    empty = [s.label for s in sets if len(s) == 0]
    if empty:
        raise DataError(f"empty identity set(s): {', '.join(empty)}")
    if not same_identity and len(sets) < 2:
        raise ContractError("cross-identity pairs need at least two sets")
    xs, ys = _pick_sets(len(sets), same_identity, rng)
    x_set, y_set = sets[xs], sets[ys]
    xi = int(rng.integers(len(x_set)))
    if same_identity and len(x_set) > 1:
        yi = _other_index(len(x_set), xi, rng)
    else:
        yi = int(rng.integers(len(y_set)))
    x_hat = x_set.images[_other_index(len(x_set), xi, rng)] if len(x_set) > 1 else None
    y_shape = y_set.shape_of(yi)
    res = int(y_set.images[yi].shape[1])
    return FusionSample(
        x=x_set.images[xi],
        y=y_set.images[yi],
        x_set=xs,
        y_set=ys,
        x_hat=x_hat,
        x_identity=x_set.identity,
        y_identity=y_set.identity,
        x_shape=x_set.shape_of(xi),
        y_shape=y_shape,
        oracle=_oracle(x_set.identity, y_shape, res),
        oracle_landmarks=list(y_shape.landmarks) if y_shape is not None else None,
    )


def make_holdout_samples(
    sets: Sequence[IdentitySet],
    n_samples: int,
    seed: int,
    same_identity: bool = False,
) -> List[FusionSample]:
    """Fresh pairs over the existing identities with newly drawn shapes.

    Sample ``k`` uses its own stream ``(seed, HOLDOUT_STREAM, k)``; x, y and
    ``x_hat`` are newly rendered so none of them is a training image.

    Raises
    ------
    DataError
        If any set lacks an identity spec (real-image directories).
    ContractError
        If ``n_samples < 1`` or cross-identity pairs are requested from one set.
    """
    if n_samples < 1:
        raise ContractError(f"n_samples must be >= 1, got {n_samples}")
    missing = [s.label for s in sets if s.identity is None]
    if missing:
        raise DataError(f"held-out samples need identity specs; missing for {', '.join(missing)}")
    if not same_identity and len(sets) < 2:
        raise ContractError("cross-identity pairs need at least two sets")
    res = sets[0].res
    out: List[FusionSample] = []
    for k in range(n_samples):
        rng = np.random.default_rng([seed, HOLDOUT_STREAM, k])
        xs, ys = _pick_sets(len(sets), same_identity, rng)
        x_id = sets[xs].identity
        y_id = sets[ys].identity
        assert x_id is not None and y_id is not None
        x_shape = sample_shape(rng, res)
        y_shape = sample_shape(rng, res)
        hat_shape = sample_shape(rng, res)
        out.append(
            FusionSample(
                x=render_array(x_id, x_shape, res),
                y=render_array(y_id, y_shape, res),
                x_set=xs,
                y_set=ys,
                x_hat=render_array(x_id, hat_shape, res),
                x_identity=x_id,
                y_identity=y_id,
                x_shape=x_shape,
                y_shape=y_shape,
                oracle=render_array(x_id, y_shape, res),
                oracle_landmarks=list(y_shape.landmarks),
            )
        )
    return out
