"""The four feature extractors: pairwise distances, axis offsets from the
mean shape, pooled filter-bank texture over the aligned crop, and per-landmark
filter responses.

All extractors are pure functions of their inputs; repeated calls on the same
arguments return bit-identical vectors.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist

from ..errors import DimensionMismatchError
from ..shapes import LandmarkSet, MeanShape, NormalizedShape
from .gabor import FilterBank, GaborBankConfig, build_gabor_bank, gabor_magnitude
from .image import GrayImage
from .spec import FeatureBlock, FeatureSpec, FeatureVector

POINT_TEXTURE_BASE_SIZE = 7
POINT_TEXTURE_SIZE_STEP = 4


def point_distances(shape: NormalizedShape, spec: FeatureSpec) -> FeatureVector:
    """Euclidean distances between all unordered landmark pairs (i < j)."""
    offset, block = spec.block_offset("distances")
    if offset != 0 or len(spec.blocks) != 1:
        raise DimensionMismatchError("point_distances expects a pure distance spec")
    expected_pairs = shape.point_count * (shape.point_count - 1) // 2
    if block.dimension != expected_pairs:
        raise DimensionMismatchError(
            f"spec enumerates {block.dimension} pairs but shape has "
            f"{shape.point_count} points ({expected_pairs} pairs)"
        )
    # pdist enumerates pairs in the same lexicographic (i < j) order as pair_index
    return FeatureVector(values=pdist(shape.points), spec=spec)


def axis_distances(shape: NormalizedShape, mean: MeanShape) -> FeatureVector:
    """Interleaved (x, y) offsets of each landmark from its mean location.

    The shape must be up-righted before calling; offsets from the training
    mean are meaningless across rotations.
    """
    if shape.point_count != mean.point_count:
        raise DimensionMismatchError(
            f"shape has {shape.point_count} points, mean shape {mean.point_count}"
        )
    values = (shape.points - mean.points).ravel()
    return FeatureVector(values=values, spec=FeatureSpec.axis(shape.point_count))


def bif_spec(bank: FilterBank) -> FeatureSpec:
    """Feature layout produced by ``bif_features`` for this bank."""
    cells = bank.cells_per_band()
    dimension = 2 * bank.orientations * sum(cells)
    params = (
        ("orientations", bank.orientations),
        ("bands", tuple(b.sizes for b in bank.bands)),
        ("pooling", tuple((b.cell, b.step) for b in bank.bands)),
        ("image_size", bank.image_size),
    )
    return FeatureSpec(blocks=(FeatureBlock("bif", dimension, params=params),))


def _pool_windows(response: np.ndarray, cell: int, step: int) -> tuple[np.ndarray, np.ndarray]:
    """MAX and population STDDEV over the full cells of an overlapping grid."""
    size = response.shape[0]
    starts = range(0, size - cell + 1, step)
    maxes = []
    stds = []
    for y0 in starts:
        for x0 in starts:
            window = response[y0 : y0 + cell, x0 : x0 + cell]
            maxes.append(window.max())
            stds.append(window.std())
    return np.array(maxes), np.array(stds)


def bif_features(image: GrayImage, bank: FilterBank) -> FeatureVector:
    """Pooled texture descriptor over the aligned crop.

    Per (band, orientation): filter with every size in the band, take the
    pixel-wise maximum of the quadrature magnitudes across sizes, then pool
    each grid cell with MAX and STDDEV.  Output order is (band, orientation,
    cell, {MAX, STDDEV}).
    """
    n = bank.image_size
    if image.height != n or image.width != n:
        raise DimensionMismatchError(
            f"bank expects a {n}x{n} crop, got {image.width}x{image.height}"
        )
    chunks = []
    for band in bank.bands:
        for oi in range(bank.orientations):
            responses = [
                gabor_magnitude(image.pixels, *bank.kernels[(sz, oi)]) for sz in band.sizes
            ]
            pooled_sizes = np.maximum.reduce(responses)
            maxes, stds = _pool_windows(pooled_sizes, band.cell, band.step)
            chunks.append(np.column_stack([maxes, stds]).ravel())
    return FeatureVector(values=np.concatenate(chunks), spec=bif_spec(bank))


def point_texture_sizes(scales: int) -> tuple[int, ...]:
    """Odd kernel sizes used for the per-landmark responses (7, 11, 15, ...)."""
    return tuple(POINT_TEXTURE_BASE_SIZE + POINT_TEXTURE_SIZE_STEP * k for k in range(scales))


def point_texture_spec(point_count: int, scales: int, orientations: int) -> FeatureSpec:
    block = FeatureBlock(
        "point_texture",
        point_count * scales * orientations,
        params=(
            ("point_count", point_count),
            ("sizes", point_texture_sizes(scales)),
            ("orientations", orientations),
        ),
    )
    return FeatureSpec(blocks=(block,))


def _texture_bank(scales: int, orientations: int) -> FilterBank:
    sizes = point_texture_sizes(scales)
    config = GaborBankConfig(
        orientations=orientations,
        sizes=sizes,
        bands=tuple((sz,) for sz in sizes),
        pooling=tuple((1, 1) for _ in sizes),
        image_size=1,
    )
    return build_gabor_bank(config)


_TEXTURE_BANK_CACHE: dict[tuple[int, int], FilterBank] = {}


def point_texture(
    image: GrayImage,
    landmarks: LandmarkSet,
    scales: int = 8,
    orientations: int = 12,
) -> FeatureVector:
    """Quadrature filter magnitudes centered on each landmark pixel.

    Landmarks are rounded to the nearest pixel and clamped into the image;
    patches reaching past the border repeat the nearest border pixel.
    Output order is (point, scale, orientation).
    """
    if scales < 1 or orientations < 1:
        raise DimensionMismatchError("scales and orientations must be positive")
    key = (scales, orientations)
    bank = _TEXTURE_BANK_CACHE.get(key)
    if bank is None:
        bank = _TEXTURE_BANK_CACHE[key] = _texture_bank(scales, orientations)
    sizes = point_texture_sizes(scales)

    h, w = image.pixels.shape
    max_half = sizes[-1] // 2
    padded = np.pad(image.pixels, max_half, mode="edge")
    xs = np.clip(np.rint(landmarks.points[:, 0]).astype(np.intp), 0, w - 1) + max_half
    ys = np.clip(np.rint(landmarks.points[:, 1]).astype(np.intp), 0, h - 1) + max_half

    values = np.empty((landmarks.point_count, scales, orientations))
    for si, sz in enumerate(sizes):
        half = sz // 2
        patches = np.stack(
            [
                padded[ys[p] - half : ys[p] + half + 1, xs[p] - half : xs[p] + half + 1]
                for p in range(landmarks.point_count)
            ]
        )
        for oi in range(orientations):
            even, odd = bank.kernels[(sz, oi)]
            re = np.tensordot(patches, even, axes=([1, 2], [0, 1]))
            im = np.tensordot(patches, odd, axes=([1, 2], [0, 1]))
            values[:, si, oi] = np.hypot(re, im)
    spec = point_texture_spec(landmarks.point_count, scales, orientations)
    return FeatureVector(values=values.ravel(), spec=spec)
