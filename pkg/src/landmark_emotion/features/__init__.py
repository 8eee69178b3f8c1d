"""Feature extraction: geometry, filter banks, aligned crops, texture."""

from .extract import (
    axis_distances,
    bif_features,
    bif_spec,
    point_distances,
    point_texture,
    point_texture_sizes,
    point_texture_spec,
)
from .gabor import (
    Band,
    FilterBank,
    GaborBankConfig,
    build_gabor_bank,
    correlate_clamp,
    gabor_kernel_pair,
    gabor_magnitude,
)
from .image import (
    CROP_SIZE,
    GrayImage,
    SimilarityTransform,
    align_face,
    aspect_correct,
    aspect_correct_points,
    bilinear_sample,
    fit_similarity,
    read_pgm,
    warp_similarity,
    write_pgm,
)
from .spec import FeatureBlock, FeatureSpec, FeatureVector, concat_features, merge_specs, pair_enumeration

__all__ = [
    "Band",
    "CROP_SIZE",
    "FeatureBlock",
    "FeatureSpec",
    "FeatureVector",
    "FilterBank",
    "GaborBankConfig",
    "GrayImage",
    "SimilarityTransform",
    "align_face",
    "aspect_correct",
    "aspect_correct_points",
    "axis_distances",
    "bif_features",
    "bif_spec",
    "bilinear_sample",
    "build_gabor_bank",
    "concat_features",
    "correlate_clamp",
    "fit_similarity",
    "gabor_kernel_pair",
    "gabor_magnitude",
    "merge_specs",
    "pair_enumeration",
    "point_distances",
    "point_texture",
    "point_texture_sizes",
    "point_texture_spec",
    "read_pgm",
    "warp_similarity",
    "write_pgm",
]
