"""Labeled feature datasets over the fixed 7-emotion class order."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError
from ..features.spec import FeatureSpec, FeatureVector

# Fixed class order used everywhere: confusion-matrix axes, tie-breaking,
# reports.  Index into this tuple is the integer label.
CLASSES = ("Angry", "Disgust", "Fear", "Happy", "Neutral", "Sad", "Surprise")
CLASS_INDEX = {name: idx for idx, name in enumerate(CLASSES)}
UNLABELED = -1


def label_index(label: str) -> int:
    try:
        return CLASS_INDEX[label]
    except KeyError:
        raise DimensionMismatchError(f"unknown class label {label!r}; expected one of {CLASSES}") from None


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix, integer labels, and the spec all rows share.

    ``y`` entries are indices into CLASSES, or UNLABELED (-1) for samples
    awaiting prediction.  ``ids`` keeps manifest sample identifiers so split
    hygiene stays auditable.
    """

    X: np.ndarray
    y: np.ndarray
    spec: FeatureSpec = field(repr=False)
    ids: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise DimensionMismatchError(f"X must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DimensionMismatchError(f"y shape {y.shape} does not match {X.shape[0]} rows")
        if X.shape[1] != self.spec.total_dimension:
            raise DimensionMismatchError(
                f"X has {X.shape[1]} columns but spec declares {self.spec.total_dimension}"
            )
        bad = (y != UNLABELED) & ((y < 0) | (y >= len(CLASSES)))
        if np.any(bad):
            raise DimensionMismatchError(f"labels out of range: {np.unique(y[bad])}")
        if self.ids and len(self.ids) != X.shape[0]:
            raise DimensionMismatchError("ids length does not match row count")
        X = X.copy()
        X.flags.writeable = False
        y = y.copy()
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "ids", tuple(self.ids))

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def dimension(self) -> int:
        return self.X.shape[1]

    def classes_present(self) -> tuple[int, ...]:
        return tuple(sorted(int(c) for c in np.unique(self.y) if c != UNLABELED))

    def require_labeled(self) -> None:
        if np.any(self.y == UNLABELED):
            raise DimensionMismatchError("dataset contains unlabeled samples")

    @staticmethod
    def from_vectors(
        samples: Sequence[tuple[FeatureVector, str | int]],
        ids: Sequence[str] = (),
    ) -> "LabeledDataset":
        if not samples:
            raise DimensionMismatchError("cannot build a dataset from zero samples")
        spec = samples[0][0].spec
        for fv, _ in samples:
            if fv.spec.total_dimension != spec.total_dimension or fv.spec.digest() != spec.digest():
                raise DimensionMismatchError("all samples must share one FeatureSpec")
        X = np.stack([fv.values for fv in (fv for fv, _ in samples)])
        y = np.array(
            [label_index(lbl) if isinstance(lbl, str) else int(lbl) for _, lbl in samples],
            dtype=np.int64,
        )
        return LabeledDataset(X=X, y=y, spec=spec, ids=tuple(ids))
