"""
The five arms of the loss-term ablation grid.

Each arm is a set of switches over the shape terms and Min-Patch; the identity
loss trains in every arm.
"""

from __future__ import annotations

from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict

from fusion_gan.errors import ContractError


class AblationArm(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    description: str
    s1: bool
    s2: bool
    min_patch: bool


ABLATION_ARMS: List[AblationArm] = [
    AblationArm(name="identity-only", description="L_I alone", s1=False, s2=False, min_patch=False),
    AblationArm(name="identity+s2", description="L_I + L_S2a + L_S2b", s1=False, s2=True, min_patch=False),
    AblationArm(name="identity+s1", description="L_I + L_S1", s1=True, s2=False, min_patch=False),
    AblationArm(
        name="identity+s1+s2", description="L_I + L_S1 + L_S2a + L_S2b", s1=True, s2=True, min_patch=False
    ),
    AblationArm(name="full+min-patch", description="all losses with Min-Patch", s1=True, s2=True, min_patch=True),
]


def get_arm(name: str) -> AblationArm:
    for arm in ABLATION_ARMS:
        if arm.name == name:
            return arm
    raise ContractError(f"unknown ablation arm {name!r}; choose one of {', '.join(a.name for a in ABLATION_ARMS)}")


def arm_overrides(arm: AblationArm) -> Dict[str, Any]:
    """Config overrides for :func:`load_train_config`."""
    return {
        "min_patch": arm.min_patch,
        "loss_toggles": {"s1": arm.s1, "s2a": arm.s2, "s2b": arm.s2},
    }


def arm_cli_flags(arm: AblationArm) -> List[str]:
    """``fusion-gan-cli train`` flags selecting this arm."""
    flags = ["--min-patch" if arm.min_patch else "--no-min-patch"]
    if not arm.s1:
        flags.append("--no-s1")
    if not arm.s2:
        flags.extend(["--no-s2a", "--no-s2b"])
    return flags
