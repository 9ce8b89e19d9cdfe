"""
Typed records for the synthetic multi-set dataset.

Identity is a rendering style (palette and background texture); shape is a
glyph's geometry. Specs are pydantic models so they serialise straight into
``specs.json``; image-holding records are attrs classes.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

import attrs
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fusion_gan.engine import FloatArray
from fusion_gan.errors import SpecError

Texture = Literal["solid", "horizontal-stripes", "checker"]
Glyph = Literal["triangle", "square", "bar"]
RGB = Tuple[float, float, float]

TEXTURES: Tuple[Texture, ...] = ("solid", "horizontal-stripes", "checker")
GLYPHS: Tuple[Glyph, ...] = ("triangle", "square", "bar")
SUPPORTED_RES: Tuple[int, ...] = (16, 32, 64)

LEGIBILITY = 0.3
TEXTURE_SHADE = 0.75
CENTER_RANGE = (0.15, 0.85)
SCALE_RANGE = (0.25, 0.45)
NUM_LANDMARKS = 4


def quantize(v: np.ndarray | float) -> np.ndarray:
    """Snap values onto the 8-bit grid: ``round(v * 255) / 255``."""
    return np.round(np.asarray(v, dtype=np.float64) * 255.0) / 255.0


class IdentitySpec(BaseModel):
    """Set-level rendering style.

    Attributes
    ----------
    id : int
        Set label.
    fg, bg : tuple of float
        Foreground (glyph) and background RGB colors in [0, 1].
    texture : {"solid", "horizontal-stripes", "checker"}
        Background pattern; textured cells use ``bg * 0.75`` (on the 8-bit grid).
    period : int
        Full texture cycle in pixels.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: int
    fg: RGB
    bg: RGB
    texture: Texture = "solid"
    period: int = Field(8, ge=2)

    @property
    def shade(self) -> RGB:
        s = quantize(np.asarray(self.bg) * TEXTURE_SHADE)
        return (float(s[0]), float(s[1]), float(s[2]))

    def check(self) -> "IdentitySpec":
        """Validate color ranges and legibility, returning ``self``.

        Raises
        ------
        SpecError
            If a color leaves [0, 1] or foreground and background differ by
            less than 0.3 in every channel.
        """
        fg = np.asarray(self.fg)
        bg = np.asarray(self.bg)
        if np.any(fg < 0) or np.any(fg > 1) or np.any(bg < 0) or np.any(bg > 1):
            raise SpecError(f"identity {self.id}: colors must lie in [0, 1]")
        if np.max(np.abs(fg - bg)) < LEGIBILITY:
            raise SpecError(
                f"identity {self.id}: foreground {self.fg} and background {self.bg} "
                f"differ by less than {LEGIBILITY} in every channel"
            )
        return self


class Landmark(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    x: float
    y: float


class ShapeSpec(BaseModel):
    """Instance-level glyph geometry.

    ``cx``/``cy`` are normalised to the canvas; ``scale`` is a fraction of the
    image width (square side, triangle side or bar length). ``landmarks`` are
    pixel coordinates at resolution ``res``, in canonical order.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    glyph: Glyph
    cx: float
    cy: float
    rotation: float
    scale: float
    res: int
    landmarks: List[Landmark] = Field(default_factory=list)

    def check(self) -> "ShapeSpec":
        lo, hi = CENTER_RANGE
        if not (lo <= self.cx <= hi and lo <= self.cy <= hi):
            raise SpecError(f"glyph center ({self.cx}, {self.cy}) outside [{lo}, {hi}]^2")
        s_lo, s_hi = SCALE_RANGE
        if not s_lo <= self.scale <= s_hi:
            raise SpecError(f"glyph scale {self.scale} outside [{s_lo}, {s_hi}]")
        return self


@attrs.define
class IdentitySet:
    """Images sharing one identity.

    ``identity`` and ``shapes`` are ``None`` for directories without
    ``specs.json``; such sets carry no oracle.
    """

    label: str
    images: List[FloatArray]
    identity: Optional[IdentitySpec] = None
    shapes: List[Optional[ShapeSpec]] = attrs.field(factory=list)
    files: List[str] = attrs.field(factory=list)

    def __len__(self) -> int:
        return len(self.images)

    @property
    def res(self) -> int:
        return int(self.images[0].shape[1]) if self.images else 0

    def shape_of(self, idx: int) -> Optional[ShapeSpec]:
        return self.shapes[idx] if idx < len(self.shapes) else None


@attrs.define
class FusionSample:
    """One training or evaluation pair.

    ``oracle`` is the rendering of (x's identity, y's shape) and
    ``oracle_landmarks`` are y's landmarks; both are ``None`` without specs.
    ``x_hat`` is another image of x's set, used as the real pair partner.
    """

    x: FloatArray
    y: FloatArray
    x_set: int
    y_set: int
    x_hat: Optional[FloatArray] = None
    x_identity: Optional[IdentitySpec] = None
    y_identity: Optional[IdentitySpec] = None
    x_shape: Optional[ShapeSpec] = None
    y_shape: Optional[ShapeSpec] = None
    oracle: Optional[FloatArray] = None
    oracle_landmarks: Optional[List[Landmark]] = None

    @property
    def same_identity(self) -> bool:
        return self.x_set == self.y_set
