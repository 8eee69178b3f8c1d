"""Dataset ingestion and the end-to-end feature pipeline.

A manifest CSV (`id,pts_path,image_path,label,split`) names every sample.
An empty pts_path marks a sample whose landmarks are ABSENT (the face
detector failed); those are carried separately so prediction can apply the
Neutral fallback.  Features are extracted per split; anything fit on data
(the mean shape, the SVM scaler) uses the training split only.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError
from .features.extract import (
    axis_distances,
    bif_features,
    bif_spec,
    point_distances,
    point_texture,
    point_texture_spec,
)
from .features.gabor import FilterBank, GaborBankConfig, build_gabor_bank
from .features.image import GrayImage, align_face, aspect_correct, aspect_correct_points, read_pgm
from .features.spec import FeatureSpec, FeatureVector, concat_features, merge_specs
from .learners.dataset import CLASSES, UNLABELED, LabeledDataset, label_index
from .learners.gb import GBModel, gb_predict_batch
from .learners.svm import SVMModel, svm_predict_batch
from .shapes import LandmarkSet, MeanShape, NormalizedShape, mean_shape, normalize_size, parse_pts, upright

SPLITS = ("train", "validate", "test")
FEATURE_FAMILIES = ("distances", "axis", "bif", "point_texture")
POINT_COUNT = 68


@dataclass(frozen=True)
class ManifestEntry:
    sample_id: str
    pts_path: str  # empty string = landmarks ABSENT
    image_path: str  # empty string = no image
    label: str  # empty string = UNLABELED
    split: str

    @property
    def absent(self) -> bool:
        return self.pts_path == ""


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.sample_id in seen:
                raise FormatError(f"duplicate sample id {e.sample_id!r} in manifest")
            seen.add(e.sample_id)
            if e.split not in SPLITS:
                raise FormatError(f"entry {e.sample_id!r} has unknown split {e.split!r}")
            if e.label and e.label not in CLASSES:
                raise FormatError(f"entry {e.sample_id!r} has unknown label {e.label!r}")

    def for_split(self, split: str) -> tuple[ManifestEntry, ...]:
        if split not in SPLITS:
            raise ConfigError(f"unknown split {split!r}")
        return tuple(e for e in self.entries if e.split == split)


MANIFEST_HEADER = ["id", "pts_path", "image_path", "label", "split"]


def read_manifest(path: str | Path) -> DatasetManifest:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != MANIFEST_HEADER:
        raise FormatError(f"manifest must start with header {','.join(MANIFEST_HEADER)!r}")
    entries = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 5:
            raise FormatError(f"manifest line {line_no} has {len(row)} fields, expected 5")
        entries.append(ManifestEntry(*(f.strip() for f in row)))
    return DatasetManifest(entries=tuple(entries))


def write_manifest(manifest: DatasetManifest) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for e in manifest.entries:
        writer.writerow([e.sample_id, e.pts_path, e.image_path, e.label, e.split])
    return out.getvalue()


@dataclass(frozen=True)
class PipelineConfig:
    """Feature selection, model choice, and hyperparameters for a run."""

    manifest: str = ""
    features: tuple[str, ...] = ("distances",)
    model: str = "svm"
    # gradient boosting
    shrinkage: float = 0.1
    max_trees: int = 100
    # SVM: fixed (C, gamma) when given, otherwise grid search
    svm_c: float | None = None
    svm_gamma: float | None = None
    svm_c_grid: tuple[float, ...] = tuple(2.0**e for e in range(-5, 16, 2))
    svm_gamma_grid: tuple[float, ...] = tuple(2.0**e for e in range(-15, 4, 2))
    # texture extraction
    texture_scales: int = 8
    texture_orientations: int = 12
    # ingestion
    aspect_factor: float = 1.0
    neutral_fallback: bool = True
    merge_validation: bool = False
    eval_split: str = "test"
    seed: int = 0

    def __post_init__(self):
        if not self.features:
            raise ConfigError("select at least one feature family")
        for f in self.features:
            if f not in FEATURE_FAMILIES:
                raise ConfigError(f"unknown feature family {f!r}; choose from {FEATURE_FAMILIES}")
        if self.model not in ("gb", "svm"):
            raise ConfigError(f"model must be 'gb' or 'svm', got {self.model!r}")
        if self.eval_split not in SPLITS:
            raise ConfigError(f"eval_split must be one of {SPLITS}")
        if not self.aspect_factor > 0:
            raise ConfigError("aspect_factor must be positive")

    def needs_images(self) -> bool:
        return "bif" in self.features or "point_texture" in self.features


_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def parse_config(text: str) -> PipelineConfig:
    """Parse the flat key-value config format (`key = value`, '#' comments)."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no} is not 'key = value': {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"duplicate config key {key!r}")
        values[key] = val

    def pop_bool(key: str, default: bool) -> bool:
        if key not in values:
            return default
        raw = values.pop(key).lower()
        if raw not in _BOOL_VALUES:
            raise ConfigError(f"config key {key!r} must be true/false, got {raw!r}")
        return _BOOL_VALUES[raw]

    def pop_float_tuple(key: str, default: tuple[float, ...]) -> tuple[float, ...]:
        if key not in values:
            return default
        return tuple(float(v) for v in values.pop(key).split(",") if v.strip())

    kwargs: dict = {}
    if "manifest" in values:
        kwargs["manifest"] = values.pop("manifest")
    if "features" in values:
        kwargs["features"] = tuple(f.strip() for f in values.pop("features").split(",") if f.strip())
    if "model" in values:
        kwargs["model"] = values.pop("model")
    for key, cast in (
        ("shrinkage", float),
        ("max_trees", int),
        ("svm_c", float),
        ("svm_gamma", float),
        ("texture_scales", int),
        ("texture_orientations", int),
        ("aspect_factor", float),
        ("seed", int),
    ):
        if key in values:
            try:
                kwargs[key] = cast(values.pop(key))
            except ValueError as exc:
                raise ConfigError(f"config key {key!r} has a non-numeric value") from exc
    kwargs["svm_c_grid"] = pop_float_tuple("svm_c_grid", PipelineConfig.svm_c_grid)
    kwargs["svm_gamma_grid"] = pop_float_tuple("svm_gamma_grid", PipelineConfig.svm_gamma_grid)
    kwargs["neutral_fallback"] = pop_bool("neutral_fallback", True)
    kwargs["merge_validation"] = pop_bool("merge_validation", False)
    if "eval_split" in values:
        kwargs["eval_split"] = values.pop("eval_split")
    if values:
        raise ConfigError(f"unknown config keys: {sorted(values)}")
    return PipelineConfig(**kwargs)


def build_feature_spec(config: PipelineConfig) -> FeatureSpec:
    """The merged FeatureSpec the configured pipeline produces, data-free.

    Families always concatenate in the fixed order distances, axis, bif,
    point_texture regardless of how the config lists them.
    """
    specs = []
    if "distances" in config.features:
        specs.append(FeatureSpec.distances(POINT_COUNT))
    if "axis" in config.features:
        specs.append(FeatureSpec.axis(POINT_COUNT))
    if "bif" in config.features:
        specs.append(bif_spec(build_gabor_bank(GaborBankConfig())))
    if "point_texture" in config.features:
        specs.append(point_texture_spec(POINT_COUNT, config.texture_scales, config.texture_orientations))
    return merge_specs(specs)


@dataclass(frozen=True)
class LoadResult:
    datasets: dict  # split -> LabeledDataset | None
    absent: dict  # split -> tuple of sample ids with no landmarks
    errors: tuple[tuple[str, str], ...]  # (sample id, message) for unreadable entries
    mean: MeanShape | None
    spec: FeatureSpec


@dataclass(frozen=True)
class _ParsedEntry:
    entry: ManifestEntry
    landmarks: LandmarkSet
    uprighted: NormalizedShape
    image: GrayImage | None


def _ingest_entry(entry: ManifestEntry, base: Path, config: PipelineConfig) -> _ParsedEntry:
    pts_path = base / entry.pts_path
    landmarks = parse_pts(pts_path.read_text(encoding="utf-8"))
    image = None
    points = landmarks.points
    if config.needs_images():
        if not entry.image_path:
            raise ConfigError(
                f"feature set {config.features} needs images but entry {entry.sample_id!r} has no image path"
            )
        image = read_pgm((base / entry.image_path).read_bytes())
        if config.aspect_factor != 1.0:
            points = aspect_correct_points(points, image.width, config.aspect_factor)
            image = aspect_correct(image, config.aspect_factor)
            landmarks = LandmarkSet(points)
    elif config.aspect_factor != 1.0:
        # no image to stay aligned with; plain horizontal rescale of the shape
        points = points.copy()
        points[:, 0] *= config.aspect_factor
        landmarks = LandmarkSet(points)
    uprighted = upright(normalize_size(landmarks))
    return _ParsedEntry(entry=entry, landmarks=landmarks, uprighted=uprighted, image=image)


def _extract_features(
    parsed: _ParsedEntry,
    config: PipelineConfig,
    mean: MeanShape | None,
    bank: FilterBank | None,
) -> FeatureVector:
    parts = []
    if "distances" in config.features:
        parts.append(point_distances(parsed.uprighted, FeatureSpec.distances(POINT_COUNT)))
    if "axis" in config.features:
        assert mean is not None
        parts.append(axis_distances(parsed.uprighted, mean))
    if "bif" in config.features:
        assert bank is not None and parsed.image is not None
        crop = align_face(parsed.image, parsed.landmarks)
        parts.append(bif_features(crop, bank))
    if "point_texture" in config.features:
        assert parsed.image is not None
        parts.append(
            point_texture(
                parsed.image,
                parsed.landmarks,
                scales=config.texture_scales,
                orientations=config.texture_orientations,
            )
        )
    return concat_features(parts)


def load_dataset(manifest_path: str | Path, config: PipelineConfig) -> LoadResult:
    """Parse landmark files, run the shape pipeline, extract configured features.

    Per-entry failures (unreadable or malformed files) are collected, not
    fatal; duplicate ids and manifest-level problems raise immediately.
    """
    manifest_path = Path(manifest_path)
    manifest = read_manifest(manifest_path)
    base = manifest_path.parent
    spec = build_feature_spec(config)
    bank = build_gabor_bank(GaborBankConfig()) if "bif" in config.features else None

    parsed: dict[str, list[_ParsedEntry]] = {s: [] for s in SPLITS}
    absent: dict[str, list[str]] = {s: [] for s in SPLITS}
    errors: list[tuple[str, str]] = []
    for entry in manifest.entries:
        if entry.absent:
            absent[entry.split].append(entry.sample_id)
            continue
        try:
            parsed[entry.split].append(_ingest_entry(entry, base, config))
        except ConfigError:
            raise
        except Exception as exc:  # per-entry failure: record and continue
            errors.append((entry.sample_id, str(exc)))

    mean = None
    if "axis" in config.features:
        train_shapes = [p.uprighted for p in parsed["train"]]
        if not train_shapes:
            raise ConfigError("axis features need at least one training shape for the mean")
        mean = mean_shape(train_shapes)

    datasets: dict[str, LabeledDataset | None] = {}
    for split in SPLITS:
        items = parsed[split]
        if not items:
            datasets[split] = None
            continue
        X = np.stack([_extract_features(p, config, mean, bank).values for p in items])
        y = np.array(
            [label_index(p.entry.label) if p.entry.label else UNLABELED for p in items],
            dtype=np.int64,
        )
        ids = tuple(p.entry.sample_id for p in items)
        datasets[split] = LabeledDataset(X=X, y=y, spec=spec, ids=ids)

    return LoadResult(
        datasets=datasets,
        absent={s: tuple(v) for s, v in absent.items()},
        errors=tuple(errors),
        mean=mean,
        spec=spec,
    )


def model_predict_indices(model: GBModel | SVMModel, X: np.ndarray) -> np.ndarray:
    """Global class indices for raw (unscaled) feature rows."""
    if isinstance(model, SVMModel):
        scaled = model.scaler.transform(X) if model.scaler is not None else X
        return svm_predict_batch(model, scaled)
    if isinstance(model, GBModel):
        return gb_predict_batch(model, X)
    raise ConfigError(f"cannot predict with object of type {type(model).__name__}")


def predict_with_fallback(
    model: GBModel | SVMModel,
    dataset: LabeledDataset | None,
    absent_ids: tuple[str, ...] = (),
    neutral_fallback: bool = True,
) -> dict[str, str]:
    """Labels for every sample; absent-landmark samples get 'Neutral'.

    With the fallback disabled, any absent sample is an error.
    """
    if absent_ids and not neutral_fallback:
        raise ConfigError(
            f"{len(absent_ids)} samples have no landmarks and the Neutral fallback is disabled"
        )
    out: dict[str, str] = {}
    if dataset is not None and len(dataset) > 0:
        indices = model_predict_indices(model, dataset.X)
        ids = dataset.ids if dataset.ids else tuple(str(i) for i in range(len(dataset)))
        for sid, idx in zip(ids, indices):
            out[sid] = CLASSES[int(idx)]
    for sid in absent_ids:
        out[sid] = "Neutral"
    return out


def write_feature_matrix(dataset: LabeledDataset) -> str:
    """Tab-separated dump: label (or '?') then full-precision feature values."""
    lines = []
    for i in range(len(dataset)):
        label = CLASSES[dataset.y[i]] if dataset.y[i] != UNLABELED else "?"
        values = "\t".join(repr(float(v)) for v in dataset.X[i])
        lines.append(f"{label}\t{values}")
    return "\n".join(lines) + "\n"
