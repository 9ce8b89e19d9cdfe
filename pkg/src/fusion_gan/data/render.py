"""
Deterministic glyph rasterisation and landmark geometry.

Coordinates are continuous pixel units: pixel ``(row i, col j)`` covers
``[j, j+1) x [i, i+1)`` with x to the right and y downwards. Glyph coverage is
estimated with 4x4 supersampling per pixel, blended over the identity's
background field and snapped to the 8-bit grid, so a PNG round trip is exact.
"""

from __future__ import annotations

import math
from typing import List, Sequence, Tuple

import numpy as np

from fusion_gan.engine import FloatArray, Tensor
from fusion_gan.errors import SpecError

from .types import (
    SUPPORTED_RES,
    Glyph,
    IdentitySpec,
    Landmark,
    ShapeSpec,
    quantize,
)

SUPERSAMPLE = 4
ANGLE_MARGIN = math.radians(12.0)
BAR_ASPECT = 4.0


def _rotate(local: FloatArray, theta: float) -> FloatArray:
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T


def glyph_center(shape: ShapeSpec | Tuple[float, float], res: int) -> FloatArray:
    if isinstance(shape, ShapeSpec):
        return np.array([shape.cx * res, shape.cy * res])
    return np.array([shape[0] * res, shape[1] * res])


def glyph_polygon(glyph: Glyph, cx: float, cy: float, rotation: float, scale: float, res: int) -> FloatArray:
    """Vertices ``(N, 2)`` of the glyph outline in pixel coordinates.

    ``scale * res`` is the square side, the equilateral triangle side or the
    bar length; bars are a quarter as thick as they are long.
    """
    s = scale * res
    if glyph == "square":
        h = s / 2.0
        local = np.array([[h, h], [-h, h], [-h, -h], [h, -h]])
    elif glyph == "triangle":
        r = s / math.sqrt(3.0)
        ang = np.arange(3) * (2.0 * math.pi / 3.0)
        local = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
    elif glyph == "bar":
        hl, ht = s / 2.0, s / (2.0 * BAR_ASPECT)
        local = np.array([[hl, ht], [-hl, ht], [-hl, -ht], [hl, -ht]])
    else:
        raise SpecError(f"unknown glyph {glyph!r}")
    return _rotate(local, rotation) + np.array([cx * res, cy * res])


def polar_angle(points: FloatArray, center: FloatArray) -> FloatArray:
    """Angle in ``[0, 2*pi)`` of each point about ``center``, origin along +x."""
    d = np.asarray(points) - center
    return np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * math.pi)


def canonical_order(points: FloatArray, center: FloatArray) -> np.ndarray:
    """Indices sorting ``points`` by ascending polar angle about ``center``."""
    return np.argsort(polar_angle(points, center), kind="stable")


def angles_clear_of_origin(points: FloatArray, center: FloatArray, margin: float = ANGLE_MARGIN) -> bool:
    """Whether no point lies within ``margin`` radians of the angle origin."""
    a = polar_angle(points, center)
    return bool(np.all(np.minimum(a, 2.0 * math.pi - a) >= margin))


def _ordering_points(glyph: Glyph, poly: FloatArray, center: FloatArray) -> Tuple[FloatArray, List[str]]:
    """Boundary points whose angular order defines the landmark order, with role names."""
    if glyph == "bar":
        axis = (poly[0] - poly[1]) / 2.0
        across = (poly[0] - poly[3]) / 2.0
        pts = np.stack([center + axis, center - axis, center + across, center - across])
        return pts, ["end", "end", "edge", "edge"]
    role = "vertex" if glyph == "triangle" else "corner"
    return poly, [role] * len(poly)


def landmarks_from_geometry(glyph: Glyph, poly: FloatArray, center: FloatArray) -> List[Landmark]:
    """Canonically ordered K=4 landmarks for a glyph outline.

    Triangle: 3 vertices + centroid. Square: the first 3 corners + centroid.
    Bar: 2 endpoints + 2 mid-edge points. Boundary points are ordered by polar
    angle; the centroid, when present, comes last.
    """
    pts, roles = _ordering_points(glyph, poly, center)
    order = canonical_order(pts, center)
    keep = order if glyph == "bar" else order[:3]
    counts: dict[str, int] = {}
    out: List[Landmark] = []
    for i in keep:
        role = roles[i]
        n = counts.get(role, 0)
        counts[role] = n + 1
        out.append(Landmark(name=f"{role}_{n}", x=float(pts[i, 0]), y=float(pts[i, 1])))
    if glyph != "bar":
        out.append(Landmark(name="centroid", x=float(center[0]), y=float(center[1])))
    return out


def make_shape_spec(glyph: Glyph, cx: float, cy: float, rotation: float, scale: float, res: int) -> ShapeSpec:
    """Build a :class:`ShapeSpec` with its landmarks computed at ``res``."""
    poly = glyph_polygon(glyph, cx, cy, rotation, scale, res)
    center = np.array([cx * res, cy * res])
    return ShapeSpec(
        glyph=glyph,
        cx=cx,
        cy=cy,
        rotation=rotation,
        scale=scale,
        res=res,
        landmarks=landmarks_from_geometry(glyph, poly, center),
    )


def shape_polygon(shape: ShapeSpec, res: int) -> FloatArray:
    return glyph_polygon(shape.glyph, shape.cx, shape.cy, shape.rotation, shape.scale, res)


def shape_is_renderable(shape: ShapeSpec, res: int) -> bool:
    """Inside the canvas with every ordering point clear of the angle origin."""
    poly = shape_polygon(shape, res)
    if np.any(poly < 0.0) or np.any(poly > res):
        return False
    center = glyph_center(shape, res)
    pts, _ = _ordering_points(shape.glyph, poly, center)
    return angles_clear_of_origin(pts, center)


def polygon_coverage(poly: FloatArray, res: int, ss: int = SUPERSAMPLE) -> FloatArray:
    """Fraction of each pixel inside the convex polygon, from ``ss x ss`` samples."""
    offs = (np.arange(res * ss) + 0.5) / ss
    px, py = np.meshgrid(offs, offs)
    a = poly
    b = np.roll(poly, -1, axis=0)
    signed_area = np.sum(a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1])
    orient = 1.0 if signed_area >= 0 else -1.0
    inside = np.ones_like(px, dtype=bool)
    for (ax, ay), (bx, by) in zip(a, b):
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        inside &= orient * cross >= 0.0
    return inside.reshape(res, ss, res, ss).mean(axis=(1, 3))


def background_field(identity: IdentitySpec, res: int) -> FloatArray:
    """``(3, res, res)`` background: base color with textured cells in the shade color."""
    half = max(identity.period // 2, 1)
    rows = np.arange(res)[:, None] // half
    cols = np.arange(res)[None, :] // half
    if identity.texture == "solid":
        shaded = np.zeros((res, res), dtype=bool)
    elif identity.texture == "horizontal-stripes":
        shaded = np.broadcast_to(rows % 2 == 1, (res, res))
    else:
        shaded = (rows + cols) % 2 == 1
    bg = np.asarray(identity.bg, dtype=np.float64)[:, None, None]
    shade = np.asarray(identity.shade, dtype=np.float64)[:, None, None]
    return np.where(shaded[None, :, :], shade, bg)


def _check_res(res: int) -> None:
    if res not in SUPPORTED_RES:
        raise SpecError(f"resolution {res} not supported; choose one of {SUPPORTED_RES}")


def render_array(identity: IdentitySpec, shape: ShapeSpec, res: int) -> FloatArray:
    """Array form of :func:`render`."""
    _check_res(res)
    identity.check()
    shape.check()
    poly = shape_polygon(shape, res)
    if np.any(poly < 0.0) or np.any(poly > res):
        raise SpecError(
            f"{shape.glyph} at ({shape.cx:.3f}, {shape.cy:.3f}) scale {shape.scale:.3f} "
            f"extends outside the {res}x{res} canvas"
        )
    cov = polygon_coverage(poly, res)[None, :, :]
    fg = np.asarray(identity.fg, dtype=np.float64)[:, None, None]
    img = background_field(identity, res) * (1.0 - cov) + fg * cov
    return quantize(img)


def render(identity: IdentitySpec, shape: ShapeSpec, res: int) -> Tensor:
    """Rasterise ``shape`` in the style of ``identity``.

    Parameters
    ----------
    identity : IdentitySpec
        Palette and background texture.
    shape : ShapeSpec
        Glyph geometry.
    res : int
        Output side; one of 16, 32, 64.

    Returns
    -------
    Tensor
        ``(3, res, res)`` image in [0, 1] on the 8-bit grid.

    Raises
    ------
    SpecError
        If the glyph leaves the canvas, the resolution is unsupported or a
        spec is invalid.
    """
    return Tensor(render_array(identity, shape, res))


def landmark_array(landmarks: Sequence[Landmark]) -> FloatArray:
    return np.array([[p.x, p.y] for p in landmarks], dtype=np.float64)
