"""Feature vector layout: blocks, pair enumeration, digests, concatenation.

A FeatureSpec records which extractor produced each coordinate of a feature
vector.  Distance blocks carry the lexicographic enumeration of all C(n, 2)
unordered landmark pairs so a coordinate can be mapped back to its pair.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError


def pair_enumeration(point_count: int) -> np.ndarray:
    """All unordered landmark pairs (i, j), i < j, in lexicographic order."""
    if point_count < 2:
        raise DimensionMismatchError("pair enumeration needs at least 2 points")
    i, j = np.triu_indices(point_count, k=1)
    pairs = np.column_stack([i, j]).astype(np.int64)
    pairs.flags.writeable = False
    return pairs


@dataclass(frozen=True)
class FeatureBlock:
    """One extractor's contiguous slice of a feature vector."""

    extractor: str
    dimension: int
    # extractor-specific layout parameters, e.g. point_count or bank geometry
    params: tuple[tuple[str, object], ...] = ()

    def describe(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.extractor} dim={self.dimension}" + (f" {params}" if params else "")


@dataclass(frozen=True)
class FeatureSpec:
    """Ordered feature blocks plus the landmark-pair index for distance blocks."""

    blocks: tuple[FeatureBlock, ...]
    pair_index: np.ndarray | None = None  # (C(n,2), 2) pairs for the distance block

    def __post_init__(self):
        if not self.blocks:
            raise DimensionMismatchError("a FeatureSpec needs at least one block")

    @property
    def total_dimension(self) -> int:
        return sum(b.dimension for b in self.blocks)

    def block_offset(self, extractor: str) -> tuple[int, FeatureBlock]:
        """Start offset and block for the first block of the given extractor."""
        offset = 0
        for b in self.blocks:
            if b.extractor == extractor:
                return offset, b
            offset += b.dimension
        raise KeyError(f"no {extractor!r} block in this spec")

    def has_block(self, extractor: str) -> bool:
        return any(b.extractor == extractor for b in self.blocks)

    def to_text(self) -> str:
        """Canonical structured-text serialization (also the digest input)."""
        lines = [f"feature-spec v1 total={self.total_dimension}"]
        for b in self.blocks:
            lines.append("block " + b.describe())
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    @staticmethod
    def distances(point_count: int) -> "FeatureSpec":
        pairs = pair_enumeration(point_count)
        block = FeatureBlock(
            "distances", len(pairs), params=(("point_count", point_count),)
        )
        return FeatureSpec(blocks=(block,), pair_index=pairs)

    @staticmethod
    def axis(point_count: int) -> "FeatureSpec":
        block = FeatureBlock(
            "axis", 2 * point_count, params=(("point_count", point_count),)
        )
        return FeatureSpec(blocks=(block,))


@dataclass(frozen=True)
class FeatureVector:
    """A flat numeric vector tied to the spec that defines its layout."""

    values: np.ndarray
    spec: FeatureSpec = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise DimensionMismatchError(f"feature values must be 1-D, got shape {vals.shape}")
        if vals.shape[0] != self.spec.total_dimension:
            raise DimensionMismatchError(
                f"vector has {vals.shape[0]} values but spec declares {self.spec.total_dimension}"
            )
        if not np.all(np.isfinite(vals)):
            raise DimensionMismatchError("feature values must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def dimension(self) -> int:
        return self.values.shape[0]


def merge_specs(specs: Sequence[FeatureSpec]) -> FeatureSpec:
    """Concatenate block lists; the pair index of the first distance block wins."""
    blocks: list[FeatureBlock] = []
    pair_index = None
    for s in specs:
        blocks.extend(s.blocks)
        if pair_index is None and s.pair_index is not None:
            pair_index = s.pair_index
    return FeatureSpec(blocks=tuple(blocks), pair_index=pair_index)


def concat_features(parts: Sequence[FeatureVector]) -> FeatureVector:
    """Concatenate feature vectors into one vector with a merged spec."""
    if not parts:
        raise DimensionMismatchError("cannot concatenate zero feature vectors")
    if len(parts) == 1:
        return parts[0]
    spec = merge_specs([p.spec for p in parts])
    values = np.concatenate([p.values for p in parts])
    return FeatureVector(values=values, spec=spec)
