"""
Dense float64 tensors and the reverse-mode gradient tape.

A :class:`Tensor` wraps a NumPy array. Differentiable operations are
:class:`Function` subclasses; when a :class:`GradTape` is active, every
operation whose inputs require gradients is recorded on it, and
:meth:`GradTape.backward` replays the recorded backward rules in reverse order.
Operations executed without an active tape are plain array arithmetic and
produce tensors that do not require gradients.
"""

from __future__ import annotations

import contextvars
from typing import Any, ClassVar, List, Optional, Tuple

import attrs
import numpy as np
from numpy.typing import ArrayLike, NDArray

from fusion_gan.errors import ContractError, DimensionError

FloatArray = NDArray[np.float64]

_ACTIVE_TAPE: contextvars.ContextVar[Optional["GradTape"]] = contextvars.ContextVar(
    "fusion_gan_active_tape", default=None
)


class Tensor:
    """N-dimensional float64 array participating in a gradient graph.

    Parameters
    ----------
    data : array_like
        Values; copied and converted to ``float64``.
    requires_grad : bool, default=False
        Whether gradients should be accumulated into :attr:`grad`.
    name : str | None, optional
        Optional label (parameter name) used in diagnostics.

    Notes
    -----
    Shapes never change after construction. Images use the
    ``(channels, height, width)`` layout.
    """

    __slots__ = ("_data", "requires_grad", "grad", "name", "_is_leaf")

    def __init__(
        self, data: ArrayLike, *, requires_grad: bool = False, name: Optional[str] = None
    ) -> None:
        arr = np.array(data, dtype=np.float64)
        if any(d <= 0 for d in arr.shape):
            raise DimensionError(f"tensor dimensions must be positive, got {arr.shape}")
        self._data: FloatArray = arr
        self.requires_grad = requires_grad
        self.grad: Optional[FloatArray] = None
        self.name = name
        self._is_leaf = True

    @classmethod
    def _wrap(cls, data: FloatArray, *, requires_grad: bool, leaf: bool) -> "Tensor":
        inst = cls.__new__(cls)
        inst._data = data
        inst.requires_grad = requires_grad
        inst.grad = None
        inst.name = None
        inst._is_leaf = leaf
        return inst

    @property
    def data(self) -> FloatArray:
        return self._data

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self._data.shape)

    @property
    def size(self) -> int:
        return int(self._data.size)

    @property
    def is_leaf(self) -> bool:
        return self._is_leaf

    def item(self) -> float:
        """Return the value of a single-element tensor as a Python float."""
        if self._data.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self._data.reshape(-1)[0])

    def numpy(self) -> FloatArray:
        """Return a copy of the underlying array."""
        return self._data.copy()

    def accumulate_grad(self, grad: FloatArray) -> None:
        """Add ``grad`` into :attr:`grad` (initialising it on first use)."""
        g = np.asarray(grad, dtype=np.float64).reshape(self._data.shape)
        if self.grad is None:
            self.grad = g.copy()
        else:
            self.grad += g

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"


class Function:
    """Base class for differentiable operations.

    Subclasses implement :meth:`forward` on raw arrays (saving whatever the
    backward rule needs on ``self``) and :meth:`backward`, which maps the
    gradient of the output to one gradient per input (``None`` for inputs
    that receive none).
    """

    name: ClassVar[str] = "function"

    def forward(self, *arrays: FloatArray, **kwargs: Any) -> FloatArray:  # pragma: no cover - interface
        raise NotImplementedError

    def backward(self, grad: FloatArray) -> Tuple[Optional[FloatArray], ...]:  # pragma: no cover - interface
        raise NotImplementedError

    @classmethod
    def apply(cls, *tensors: Tensor, **kwargs: Any) -> Tensor:
        """Run the forward pass and record it on the active tape when needed."""
        fn = cls()
        out_data = fn.forward(*(t.data for t in tensors), **kwargs)
        tape = _ACTIVE_TAPE.get()
        requires_grad = tape is not None and any(t.requires_grad for t in tensors)
        out = Tensor._wrap(np.asarray(out_data, dtype=np.float64), requires_grad=requires_grad, leaf=False)
        if requires_grad and tape is not None:
            tape.record(fn, tensors, out)
        return out


@attrs.frozen
class TapeRecord:
    """One recorded operation.

    ``needs_grad`` snapshots each input's ``requires_grad`` at record time, so
    freezing a parameter set only for the forward pass is honoured by backward.
    """

    fn: Function
    inputs: Tuple[Tensor, ...]
    output: Tensor
    needs_grad: Tuple[bool, ...]


class GradTape:
    """Ordered record of differentiable operations.

    Use as a context manager; while active, operations are recorded on it.

    Examples
    --------
    >>> w = Tensor([2.0], requires_grad=True)
    >>> with GradTape() as tape:
    ...     loss = mean_sq(w, 0.0)
    ...     tape.backward(loss)
    >>> w.grad
    array([4.])
    """

    def __init__(self) -> None:
        self.m_records: List[TapeRecord] = []
        self._tokens: List[contextvars.Token[Optional[GradTape]]] = []

    def __enter__(self) -> "GradTape":
        self._tokens.append(_ACTIVE_TAPE.set(self))
        return self

    def __exit__(self, *exc: object) -> None:
        _ACTIVE_TAPE.reset(self._tokens.pop())

    def __len__(self) -> int:
        return len(self.m_records)

    def record(self, fn: Function, inputs: Tuple[Tensor, ...], output: Tensor) -> None:
        self.m_records.append(
            TapeRecord(
                fn=fn,
                inputs=tuple(inputs),
                output=output,
                needs_grad=tuple(t.requires_grad for t in inputs),
            )
        )

    def clear(self) -> None:
        self.m_records.clear()

    def backward(self, loss: Tensor, *, retain: bool = False) -> None:
        """Populate ``grad`` of every reachable leaf that requires gradients.

        Parameters
        ----------
        loss : Tensor
            Single-element tensor produced under this tape.
        retain : bool, default=False
            Keep the recorded operations (for a second backward pass);
            otherwise the tape is cleared afterwards.

        Raises
        ------
        ContractError
            If ``loss`` is not a scalar or was not produced under a tape.
        """
        if loss.size != 1:
            raise ContractError(f"backward expects a scalar loss, got shape {loss.shape}")
        if not loss.requires_grad:
            raise ContractError("loss does not require grad; compute it under an active GradTape")
        seed = np.ones_like(loss.data)
        if loss.is_leaf:
            loss.accumulate_grad(seed)
            return
        pending: dict[int, FloatArray] = {id(loss): seed}
        for rec in reversed(self.m_records):
            g = pending.pop(id(rec.output), None)
            if g is None:
                continue
            in_grads = rec.fn.backward(g)
            for t, needed, gi in zip(rec.inputs, rec.needs_grad, in_grads):
                if gi is None or not needed:
                    continue
                if t.is_leaf:
                    t.accumulate_grad(gi)
                else:
                    key = id(t)
                    pending[key] = pending[key] + gi if key in pending else gi
        if not retain:
            self.clear()


def active_tape() -> Optional[GradTape]:
    """Return the innermost active tape, or ``None``."""
    return _ACTIVE_TAPE.get()


def backward(loss: Tensor, *, retain: bool = False) -> None:
    """Run :meth:`GradTape.backward` on the active tape.

    Raises
    ------
    ContractError
        If no tape is active or ``loss`` is not a scalar.
    """
    tape = _ACTIVE_TAPE.get()
    if tape is None:
        raise ContractError("backward() needs an active GradTape")
    tape.backward(loss, retain=retain)


def detach(t: Tensor) -> Tensor:
    """Return a constant view of ``t`` that never receives gradients."""
    return Tensor._wrap(t.data, requires_grad=False, leaf=True)
