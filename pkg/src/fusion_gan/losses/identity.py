"""
Identity (pair-adversarial) losses in least-squares form.

The discriminator sees real pairs ``(x, x_hat)`` of two images sharing an
identity and fake pairs ``(x, G(x, y))``. Real pairs are pushed to 1 and fake
pairs to 0; the generator pushes fake pairs to 1, optionally judged only by the
worst patch of each min-pool window.
"""

from __future__ import annotations

from fusion_gan.engine import Tensor, add, detach, mean_sq, min_pool2d, scale
from fusion_gan.nets import Critic

REAL = 1.0
FAKE = 0.0


def identity_loss_d(d: Critic, x: Tensor, x_hat: Tensor, g_out: Tensor) -> Tensor:
    """Discriminator objective ``mean_sq(D(x, x_hat), 1) + mean_sq(D(x, g_out), 0)``.

    ``g_out`` is treated as a constant: no gradient reaches the generator.
    """
    real = mean_sq(d(x, x_hat), REAL)
    fake = mean_sq(d(x, detach(g_out)), FAKE)
    return add(real, fake)


def patch_objective(patch_map: Tensor, use_min_patch: bool, k: int, literal_max: bool = False) -> Tensor:
    """Generator objective on a patch map.

    With ``use_min_patch`` the map is first min-pooled with window ``k``.
    The default is ``mean_sq(m, 1)``. With ``literal_max`` the generator instead
    maximises ``mean_sq(m, 0)`` (returned negated so it is still minimised);
    that form is unbounded below and only exists for comparison runs.
    """
    m = min_pool2d(patch_map, k) if use_min_patch else patch_map
    if literal_max:
        return scale(mean_sq(m, FAKE), -1.0)
    return mean_sq(m, REAL)


def identity_loss_g(
    d: Critic,
    x: Tensor,
    g_out: Tensor,
    use_min_patch: bool,
    k: int,
    literal_max: bool = False,
) -> Tensor:
    """Generator identity objective through a frozen discriminator.

    Gradient flows through D's computation into ``g_out`` only; D's
    parameters receive none.

    Raises
    ------
    DimensionError
        If ``use_min_patch`` and ``k`` does not divide the patch map.
    """
    with d.params.frozen():
        return patch_objective(d(x, g_out), use_min_patch, k, literal_max)
