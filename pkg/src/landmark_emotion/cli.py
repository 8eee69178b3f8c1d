"""Batch command-line interface: train, evaluate, predict, influence, synth, gridsearch.

Every command takes ``--config``, ``--model``, ``--out`` and ``--seed``;
commands that do not need one simply ignore it.  Fatal errors print a
diagnostic to stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, LandmarkEmotionError
from .evaluation import accuracy_line, confusion, influence_report, per_class_text
from .learners.dataset import LabeledDataset
from .learners.gb import GBModel, gb_train, gb_truncate
from .learners.persist import load_model, save_model
from .learners.svm import fit_scaler, grid_search, svm_train
from .pipeline import (
    LoadResult,
    PipelineConfig,
    build_feature_spec,
    load_dataset,
    parse_config,
    predict_with_fallback,
    read_manifest,
    write_feature_matrix,
)
from .synth import synth_dataset

import numpy as np


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="pipeline config file (flat key = value text)")
    sub.add_argument("--model", help="model file path (output for train, input otherwise)")
    sub.add_argument("--out", help="output path (reports, predictions, synth directory)")
    sub.add_argument("--seed", type=int, help="override the config random seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landmark-emotion",
        description="Landmark-based emotion recognition: feature extraction, training, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("train", "fit a model per the config and write a model file"),
        ("evaluate", "load a model, predict a split, print confusion matrix and accuracy"),
        ("predict", "emit one 'id<TAB>label' line per sample of the evaluation split"),
        ("influence", "print the ranked landmark-pair influence report of a GB model"),
        ("synth", "generate a seeded synthetic landmark dataset"),
        ("gridsearch", "print the full hyperparameter search curve"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "synth":
            p.add_argument("--per-class", type=int, default=10, help="samples per class (default 10)")
        if name == "train":
            p.add_argument("--dump-features", help="also write the training feature matrix here")
        if name == "influence":
            p.add_argument("--top", type=int, default=20, help="number of pairs to report")
    return parser


def _load_config(args) -> PipelineConfig:
    if not args.config:
        raise ConfigError("this command needs --config")
    config = parse_config(Path(args.config).read_text(encoding="utf-8"))
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    return config


def _load_data(config: PipelineConfig) -> LoadResult:
    if not config.manifest:
        raise ConfigError("config must name a manifest (key 'manifest')")
    return load_dataset(config.manifest, config)


def _require_split(result: LoadResult, split: str) -> LabeledDataset:
    ds = result.datasets.get(split)
    if ds is None:
        raise ConfigError(f"the manifest has no usable samples in the {split!r} split")
    return ds


def _train_model(config: PipelineConfig, result: LoadResult):
    train = _require_split(result, "train")
    val = _require_split(result, "validate")
    train.require_labeled()
    val.require_labeled()
    notes = []
    if config.model == "gb":
        model = gb_train(train, val, shrinkage=config.shrinkage, max_trees=config.max_trees)
        notes.append(f"gb trees per class: {model.tree_count} (of {config.max_trees})")
        if config.merge_validation:
            merged = _merge(train, val, result)
            refit = gb_train(merged, val, shrinkage=config.shrinkage, max_trees=model.tree_count)
            model = gb_truncate(refit, model.tree_count)
            notes.append("refit on train+validate at the selected tree count")
    else:
        if config.svm_c is not None and config.svm_gamma is not None:
            C, gamma = config.svm_c, config.svm_gamma
            notes.append(f"svm fixed C={C:g} gamma={gamma:g}")
        else:
            search = grid_search(train, val, config.svm_c_grid, config.svm_gamma_grid)
            C, gamma = search.C, search.gamma
            notes.append(
                f"svm grid search: C={C:g} gamma={gamma:g} "
                f"validation accuracy {100 * search.best_accuracy:.1f}%"
            )
        fit_on = _merge(train, val, result) if config.merge_validation else train
        if config.merge_validation:
            notes.append("final fit on train+validate")
        scaler = fit_scaler(fit_on)
        scaled = LabeledDataset(X=scaler.transform(fit_on.X), y=fit_on.y, spec=fit_on.spec, ids=fit_on.ids)
        model = svm_train(scaled, C, gamma, scaler=scaler)
    model = replace(model, spec_digest=result.spec.digest())
    return model, notes


def _merge(train: LabeledDataset, val: LabeledDataset, result: LoadResult) -> LabeledDataset:
    X = np.vstack([train.X, val.X])
    y = np.concatenate([train.y, val.y])
    ids = tuple(train.ids) + tuple(val.ids)
    return LabeledDataset(X=X, y=y, spec=result.spec, ids=ids)


def _cmd_train(args) -> int:
    if not args.model:
        raise ConfigError("train needs --model (output path for the model file)")
    config = _load_config(args)
    result = _load_data(config)
    _report_load(result)
    model, notes = _train_model(config, result)
    Path(args.model).write_text(save_model(model), encoding="utf-8")
    for note in notes:
        print(note)
    print(f"model written to {args.model}")
    if getattr(args, "dump_features", None):
        train = _require_split(result, "train")
        Path(args.dump_features).write_text(write_feature_matrix(train), encoding="utf-8")
        Path(args.dump_features + ".spec.txt").write_text(result.spec.to_text(), encoding="utf-8")
        print(f"feature matrix written to {args.dump_features}")
    return 0


def _report_load(result: LoadResult) -> None:
    for sid, message in result.errors:
        print(f"warning: skipped sample {sid}: {message}", file=sys.stderr)


def _load_model_checked(args, config: PipelineConfig):
    if not args.model:
        raise ConfigError("this command needs --model (path of a trained model file)")
    expected = build_feature_spec(config).digest()
    return load_model(Path(args.model).read_text(encoding="utf-8"), expected_spec_digest=expected)


def _predictions_for_split(config: PipelineConfig, result: LoadResult, model) -> dict[str, str]:
    split = config.eval_split
    dataset = result.datasets.get(split)
    absent = result.absent.get(split, ())
    if dataset is None and not absent:
        raise ConfigError(f"the manifest has no usable samples in the {split!r} split")
    return predict_with_fallback(model, dataset, absent, neutral_fallback=config.neutral_fallback)


def _cmd_evaluate(args) -> int:
    config = _load_config(args)
    model = _load_model_checked(args, config)
    result = _load_data(config)
    _report_load(result)
    labels = _predictions_for_split(config, result, model)

    manifest = read_manifest(config.manifest)
    truth = []
    predicted = []
    for entry in manifest.for_split(config.eval_split):
        if entry.sample_id not in labels:
            continue  # skipped by a per-entry load error
        if not entry.label:
            raise ConfigError(f"cannot evaluate: sample {entry.sample_id!r} is unlabeled")
        truth.append(entry.label)
        predicted.append(labels[entry.sample_id])
    cm = confusion(predicted, truth)
    report = cm.to_text() + accuracy_line(cm, config.eval_split) + "\n" + per_class_text(cm) + "\n"
    print(report, end="")
    if args.out:
        Path(args.out).write_text(report + "\n" + cm.to_machine_text(), encoding="utf-8")
    return 0


def _cmd_predict(args) -> int:
    config = _load_config(args)
    model = _load_model_checked(args, config)
    result = _load_data(config)
    _report_load(result)
    labels = _predictions_for_split(config, result, model)
    manifest = read_manifest(config.manifest)
    lines = [
        f"{entry.sample_id}\t{labels[entry.sample_id]}"
        for entry in manifest.for_split(config.eval_split)
        if entry.sample_id in labels
    ]
    text = "\n".join(lines) + ("\n" if lines else "")
    print(text, end="")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def _cmd_influence(args) -> int:
    config = _load_config(args)
    model = _load_model_checked(args, config)
    if not isinstance(model, GBModel):
        raise ConfigError("influence analysis needs a gradient-boosting model")
    spec = build_feature_spec(config)
    report = influence_report(model, spec, top_k=args.top)
    text = report.to_text()
    print(text, end="")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def _cmd_synth(args) -> int:
    out_dir = args.out or "synth_data"
    seed = args.seed
    per_class = args.per_class
    if args.config:
        config = parse_config(Path(args.config).read_text(encoding="utf-8"))
        if seed is None:
            seed = config.seed
    if seed is None:
        seed = 0
    manifest_path = synth_dataset(out_dir, seed=seed, per_class_count=per_class)
    print(f"synthetic dataset written: {manifest_path} ({per_class} per class, seed {seed})")
    return 0


def _cmd_gridsearch(args) -> int:
    config = _load_config(args)
    result = _load_data(config)
    _report_load(result)
    train = _require_split(result, "train")
    val = _require_split(result, "validate")
    if config.model == "svm":
        search = grid_search(train, val, config.svm_c_grid, config.svm_gamma_grid)
        text = search.curve_text()
    else:
        model = gb_train(train, val, shrinkage=config.shrinkage, max_trees=config.max_trees)
        lines = ["trees validation_accuracy"]
        for i, acc in enumerate(model.val_accuracy, start=1):
            lines.append(f"{i} {100 * acc:.1f}")
        lines.append(f"best tree count: {model.tree_count}")
        text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "predict": _cmd_predict,
    "influence": _cmd_influence,
    "synth": _cmd_synth,
    "gridsearch": _cmd_gridsearch,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except LandmarkEmotionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
