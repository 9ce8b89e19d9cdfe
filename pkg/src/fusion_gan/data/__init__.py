"""
Synthetic identity/shape dataset with renderable ground-truth fusion images.
"""

from .generate import generate_sets, sample_identities, sample_shape
from .io import dataset_hash, git_blob_hash, load_image_dirs, save_sets, write_json
from .render import (
    background_field,
    canonical_order,
    glyph_polygon,
    landmark_array,
    landmarks_from_geometry,
    make_shape_spec,
    polar_angle,
    polygon_coverage,
    render,
    render_array,
    shape_is_renderable,
)
from .sample import make_holdout_samples, sample_pair
from .types import (
    GLYPHS,
    NUM_LANDMARKS,
    SUPPORTED_RES,
    TEXTURES,
    FusionSample,
    IdentitySet,
    IdentitySpec,
    Landmark,
    ShapeSpec,
    quantize,
)

__all__ = [
    "GLYPHS",
    "TEXTURES",
    "SUPPORTED_RES",
    "NUM_LANDMARKS",
    "IdentitySpec",
    "ShapeSpec",
    "Landmark",
    "IdentitySet",
    "FusionSample",
    "quantize",
    "render",
    "render_array",
    "background_field",
    "glyph_polygon",
    "polygon_coverage",
    "polar_angle",
    "canonical_order",
    "landmarks_from_geometry",
    "landmark_array",
    "make_shape_spec",
    "shape_is_renderable",
    "generate_sets",
    "sample_identities",
    "sample_shape",
    "sample_pair",
    "make_holdout_samples",
    "save_sets",
    "load_image_dirs",
    "dataset_hash",
    "git_blob_hash",
    "write_json",
]
