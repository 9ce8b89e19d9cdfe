"""
Typed records for evaluation.
"""

from __future__ import annotations

from typing import List, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fusion_gan.data import Landmark


class LandmarkPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    x: float = 0.0
    y: float = 0.0
    present: bool = True


class LandmarkSet(BaseModel):
    """K landmarks of one image at resolution ``res``.

    Present points must lie inside ``[0, res]``; absent points carry no
    meaningful coordinates.
    """

    model_config = ConfigDict(frozen=True)

    points: List[LandmarkPoint]
    res: int = Field(gt=0)

    @model_validator(mode="after")
    def _within_bounds(self) -> "LandmarkSet":
        for p in self.points:
            if p.present and not (0.0 <= p.x <= self.res and 0.0 <= p.y <= self.res):
                raise ValueError(f"landmark {p.name} at ({p.x:.2f}, {p.y:.2f}) outside the {self.res}px image")
        return self

    @classmethod
    def from_landmarks(cls, landmarks: Sequence[Landmark], res: int) -> "LandmarkSet":
        return cls(points=[LandmarkPoint(name=p.name, x=p.x, y=p.y) for p in landmarks], res=res)

    @classmethod
    def absent(cls, k: int, res: int) -> "LandmarkSet":
        return cls(points=[LandmarkPoint(name=f"p{i}", present=False) for i in range(k)], res=res)

    @property
    def num_present(self) -> int:
        return sum(p.present for p in self.points)


class EvalMetrics(BaseModel):
    """Metrics JSON written next to the report grid."""

    oracle_l1_gen: float
    oracle_l1_copy_x: float
    oracle_l1_copy_y: float
    mean_oks: float
    identity_score: float
    iteration: int = 0


class ReportPaths(BaseModel):
    grid_png: str
    metrics_json: str
