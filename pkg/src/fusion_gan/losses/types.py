"""
Typed loss configuration.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class LossWeights(BaseModel):
    """Weights of the composite objective.

    Attributes
    ----------
    alpha : float
        Weight on the two cross-identity shape terms relative to the
        same-identity term.
    beta : float
        Weight on shape losses relative to the identity loss.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(1.0, ge=0.0)
    beta: float = Field(10.0, ge=0.0)
