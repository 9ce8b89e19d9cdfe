"""
Exception hierarchy shared by all fusion-gan subpackages.

Library code raises these; the CLI maps them to stable exit codes.
"""

from __future__ import annotations

from typing import Optional


class FusionGanError(Exception):
    """Base exception for fusion-gan errors."""


class DimensionError(FusionGanError):
    """Raised when tensor shapes are incompatible.

    Parameters
    ----------
    message : str
        Human-readable description.
    axis : str | None, optional
        Name of the offending axis (e.g. ``"channels"``, ``"height"``).
    """

    def __init__(self, message: str, *, axis: Optional[str] = None) -> None:
        super().__init__(message)
        self.axis = axis


class ContractError(FusionGanError):
    """Raised when a caller violates an operation's precondition."""


class ConfigError(FusionGanError):
    """Raised for invalid configuration values or files."""


class DataError(FusionGanError):
    """Raised for unreadable or inconsistent datasets.

    Parameters
    ----------
    message : str
        Human-readable description.
    path : str | None, optional
        File or directory involved, when there is one.
    """

    def __init__(self, message: str, *, path: Optional[str] = None) -> None:
        super().__init__(message)
        self.path = path


class SpecError(FusionGanError):
    """Raised when an identity or shape spec cannot be rendered."""


class CheckpointError(FusionGanError):
    """Raised when a checkpoint cannot be written or loaded."""


class NonFiniteLossError(FusionGanError):
    """Raised when a training loss becomes NaN or infinite.

    Parameters
    ----------
    term : str
        Loss term that went non-finite (e.g. ``"identity_d"``).
    iteration : int
        Training iteration at which it happened.
    value : float
        The offending value.
    """

    def __init__(self, term: str, iteration: int, value: float) -> None:
        super().__init__(f"non-finite loss {term}={value} at iteration {iteration}")
        self.term = term
        self.iteration = iteration
        self.value = value
