"""
Parameter-free fusers: the copy baselines and the ground-truth oracle.

They satisfy the same call protocol as :class:`FusionGenerator` so losses,
trainer steps and evaluation accept them unchanged.
"""

from __future__ import annotations

from typing import Callable, Optional

from fusion_gan.engine import ParamSet, Tensor
from fusion_gan.errors import ContractError

from .generator import check_image_pair


class _ParamFree:
    def __init__(self) -> None:
        self.m_params = ParamSet()

    @property
    def params(self) -> ParamSet:
        return self.m_params


class CopyFirstInput(_ParamFree):
    """``g(x, y) = x``."""

    name = "copy-x"

    def __call__(self, x: Tensor, y: Tensor) -> Tensor:
        check_image_pair(x, y)
        return x


class CopySecondInput(_ParamFree):
    """``g(x, y) = y``; reaches zero on every shape loss."""

    name = "copy-y"

    def __call__(self, x: Tensor, y: Tensor) -> Tensor:
        check_image_pair(x, y)
        return y


class OracleFuser(_ParamFree):
    """Returns a precomputed image for each call, set via :meth:`set_lookup`.

    The lookup receives ``(x, y)`` and returns the ground-truth fusion image.
    """

    name = "oracle"

    def __init__(self) -> None:
        super().__init__()
        self.m_lookup: Optional[Callable[[Tensor, Tensor], Tensor]] = None

    def set_lookup(self, lookup: Callable[[Tensor, Tensor], Tensor]) -> None:
        self.m_lookup = lookup

    def __call__(self, x: Tensor, y: Tensor) -> Tensor:
        check_image_pair(x, y)
        if self.m_lookup is None:
            raise ContractError("OracleFuser has no lookup; call set_lookup first")
        return self.m_lookup(x, y)
