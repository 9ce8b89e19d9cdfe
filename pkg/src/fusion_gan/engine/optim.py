"""
Named parameter collections and the adaptive-moment optimizer.
"""

from __future__ import annotations

import contextlib
import logging
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from fusion_gan.errors import ContractError

from .tensor import FloatArray, Tensor

logger = logging.getLogger(__name__)


class ParamSet:
    """Ordered, named collection of learnable tensors with Adam state.

    Every tensor appears exactly once; names are unique. Moment buffers and the
    step counter live here so they travel with the parameters into
    checkpoints.
    """

    def __init__(self) -> None:
        self.m_tensors: Dict[str, Tensor] = {}
        self.m_moment1: Dict[str, FloatArray] = {}
        self.m_moment2: Dict[str, FloatArray] = {}
        self.m_step: int = 0

    # ------------------------------------------------------------------
    # membership
    # ------------------------------------------------------------------
    def add(self, name: str, data: FloatArray) -> Tensor:
        """Register a new learnable tensor under ``name`` and return it."""
        if name in self.m_tensors:
            raise ContractError(f"duplicate parameter name: {name}")
        t = Tensor(data, requires_grad=True, name=name)
        self.m_tensors[name] = t
        self.m_moment1[name] = np.zeros_like(t.data)
        self.m_moment2[name] = np.zeros_like(t.data)
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self.m_tensors[name]

    def __contains__(self, name: object) -> bool:
        return name in self.m_tensors

    def __len__(self) -> int:
        return len(self.m_tensors)

    def names(self) -> List[str]:
        return list(self.m_tensors)

    def items(self) -> Iterator[Tuple[str, Tensor]]:
        return iter(self.m_tensors.items())

    @property
    def step(self) -> int:
        return self.m_step

    @property
    def num_parameters(self) -> int:
        return sum(t.size for t in self.m_tensors.values())

    # ------------------------------------------------------------------
    # gradients
    # ------------------------------------------------------------------
    def zero_grad(self) -> None:
        for t in self.m_tensors.values():
            t.grad = None

    @contextlib.contextmanager
    def frozen(self) -> Iterator["ParamSet"]:
        """Temporarily stop gradient accumulation into these parameters.

        Computations inside the block still flow gradient *through* the
        parameters to other inputs; only the parameters themselves are treated
        as constants.
        """
        previous = {n: t.requires_grad for n, t in self.m_tensors.items()}
        for t in self.m_tensors.values():
            t.requires_grad = False
        try:
            yield self
        finally:
            for n, t in self.m_tensors.items():
                t.requires_grad = previous[n]

    def has_nonzero_grad(self, prefix: str = "") -> bool:
        """Whether any parameter whose name starts with ``prefix`` has a nonzero gradient."""
        return any(
            t.grad is not None and bool(np.any(t.grad != 0))
            for n, t in self.m_tensors.items()
            if n.startswith(prefix)
        )

    # ------------------------------------------------------------------
    # state
    # ------------------------------------------------------------------
    def snapshot(self) -> Dict[str, FloatArray]:
        """Copy of every parameter array, keyed by name."""
        return {n: t.data.copy() for n, t in self.m_tensors.items()}

    def optimizer_state(self) -> Tuple[int, Dict[str, FloatArray], Dict[str, FloatArray]]:
        return (
            self.m_step,
            {n: m.copy() for n, m in self.m_moment1.items()},
            {n: v.copy() for n, v in self.m_moment2.items()},
        )

    def load_state(
        self,
        values: Dict[str, FloatArray],
        *,
        step: int = 0,
        moment1: Optional[Dict[str, FloatArray]] = None,
        moment2: Optional[Dict[str, FloatArray]] = None,
    ) -> None:
        """Overwrite parameters (and optionally Adam state) in place.

        Raises
        ------
        ContractError
            If names or shapes differ from this collection.
        """
        if set(values) != set(self.m_tensors):
            missing = sorted(set(self.m_tensors) - set(values))
            extra = sorted(set(values) - set(self.m_tensors))
            raise ContractError(f"parameter names differ (missing={missing}, unexpected={extra})")
        for name, t in self.m_tensors.items():
            arr = np.asarray(values[name], dtype=np.float64)
            if arr.shape != t.shape:
                raise ContractError(f"parameter {name}: shape {arr.shape} != {t.shape}")
        for name, t in self.m_tensors.items():
            t.data[...] = values[name]
            t.grad = None
            self.m_moment1[name] = (
                np.array(moment1[name], dtype=np.float64) if moment1 else np.zeros_like(t.data)
            )
            self.m_moment2[name] = (
                np.array(moment2[name], dtype=np.float64) if moment2 else np.zeros_like(t.data)
            )
        self.m_step = int(step)


def adam_step(
    params: ParamSet,
    lr: float = 2e-4,
    beta1: float = 0.5,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """Apply one bias-corrected Adam update in place, then clear gradients.

    Parameters
    ----------
    params : ParamSet
        Parameters whose ``grad`` fields are populated.
    lr, beta1, beta2, eps : float
        Learning rate, moment decay rates and denominator epsilon.

    Raises
    ------
    ContractError
        If any parameter has no gradient.
    """
    missing = [n for n, t in params.items() if t.grad is None]
    if missing:
        raise ContractError(f"adam_step: missing gradients for {', '.join(missing)}")
    params.m_step += 1
    step = params.m_step
    c1 = 1.0 - beta1**step
    c2 = 1.0 - beta2**step
    for name, t in params.items():
        g = t.grad
        assert g is not None
        m = params.m_moment1[name]
        v = params.m_moment2[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        update = lr * (m / c1) / (np.sqrt(v / c2) + eps)
        np.subtract(t.data, update, out=t.data)
    params.zero_grad()
    logger.debug("adam step %d applied to %d tensors", step, len(params))
