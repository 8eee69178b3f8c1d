"""Versioned structured-text persistence for trained models.

The format is line-oriented UTF-8.  Floats are written with ``repr`` so a
round trip is bit-exact and output is byte-identical for equal models.  A
model file records the digest of the FeatureSpec it was trained on; loading
against a different spec digest is an error.
"""
from __future__ import annotations

import numpy as np

from ..errors import FormatError
from .dataset import CLASSES
from .gb import GBModel, Tree
from .svm import BinaryMachine, Scaler, SVMModel

FORMAT_HEADER = "landmark-emotion-model v1"


def _fmt_floats(values) -> str:
    return " ".join(repr(float(v)) for v in np.asarray(values).ravel())


def _parse_floats(text: str) -> np.ndarray:
    if not text.strip():
        return np.array([], dtype=np.float64)
    return np.array([float(t) for t in text.split()], dtype=np.float64)


def _parse_ints(text: str) -> np.ndarray:
    if not text.strip():
        return np.array([], dtype=np.int64)
    return np.array([int(t) for t in text.split()], dtype=np.int64)


def save_model(model: GBModel | SVMModel) -> str:
    if isinstance(model, GBModel):
        return _save_gb(model)
    if isinstance(model, SVMModel):
        return _save_svm(model)
    raise FormatError(f"cannot persist object of type {type(model).__name__}")


def _save_gb(model: GBModel) -> str:
    lines = [
        FORMAT_HEADER,
        "kind: gb",
        f"spec_digest: {model.spec_digest}",
        "class_order: " + ",".join(CLASSES),
        "classes: " + ",".join(str(c) for c in model.classes),
        f"dimension: {model.dimension}",
        f"shrinkage: {model.shrinkage!r}",
        f"tree_count: {model.tree_count}",
        "init_scores: " + _fmt_floats(model.init_scores),
    ]
    for k in range(len(model.classes)):
        for t, tree in enumerate(model.trees[k][: model.tree_count]):
            lines.append(f"tree class={model.classes[k]} iter={t} nodes={len(tree.feature)}")
            for i in range(len(tree.feature)):
                if tree.feature[i] < 0:
                    lines.append(f"node {i} leaf value={float(tree.value[i])!r}")
                else:
                    lines.append(
                        f"node {i} split feature={int(tree.feature[i])} "
                        f"threshold={float(tree.threshold[i])!r} gain={float(tree.gain[i])!r} "
                        f"left={int(tree.left[i])} right={int(tree.right[i])}"
                    )
    return "\n".join(lines) + "\n"


def _save_svm(model: SVMModel) -> str:
    lines = [
        FORMAT_HEADER,
        "kind: svm",
        f"spec_digest: {model.spec_digest}",
        "class_order: " + ",".join(CLASSES),
        "classes: " + ",".join(str(c) for c in model.classes),
        f"dimension: {model.dimension}",
        f"C: {model.C!r}",
        f"gamma: {model.gamma!r}",
    ]
    if model.scaler is not None:
        lines.append("scaler_lo: " + _fmt_floats(model.scaler.lo))
        lines.append("scaler_hi: " + _fmt_floats(model.scaler.hi))
    lines.append(f"vectors: {model.vectors.shape[0]} {model.dimension}")
    for row in model.vectors:
        lines.append(_fmt_floats(row))
    for m in model.machines:
        lines.append(f"machine pos={m.pos_class} neg={m.neg_class} bias={m.bias!r} nsv={len(m.coef)}")
        lines.append("sv_indices: " + " ".join(str(int(i)) for i in m.sv_indices))
        lines.append("coef: " + _fmt_floats(m.coef))
    return "\n".join(lines) + "\n"


class _LineReader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise FormatError("unexpected end of model file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def expect_key(self, key: str) -> str:
        line = self.next()
        prefix = key + ":"
        if not line.startswith(prefix):
            raise FormatError(f"expected {key!r} line, got {line!r}")
        return line[len(prefix) :].strip()


def load_model(text: str, expected_spec_digest: str | None = None) -> GBModel | SVMModel:
    """Parse a model file; verify the FeatureSpec digest when one is expected."""
    reader = _LineReader(text)
    if reader.next() != FORMAT_HEADER:
        raise FormatError(f"not a model file (missing {FORMAT_HEADER!r} header)")
    kind = reader.expect_key("kind")
    digest = reader.expect_key("spec_digest")
    if expected_spec_digest is not None and digest != expected_spec_digest:
        raise FormatError(
            f"FeatureSpec digest mismatch: model was trained on {digest or '<empty>'} "
            f"but the current configuration produces {expected_spec_digest}"
        )
    order = reader.expect_key("class_order").split(",")
    if tuple(order) != CLASSES:
        raise FormatError(f"model class order {order} differs from {list(CLASSES)}")
    classes = tuple(int(c) for c in reader.expect_key("classes").split(","))
    dimension = int(reader.expect_key("dimension"))
    if kind == "gb":
        return _load_gb(reader, digest, classes, dimension)
    if kind == "svm":
        return _load_svm(reader, digest, classes, dimension)
    raise FormatError(f"unknown model kind {kind!r}")


def _load_gb(reader: _LineReader, digest: str, classes: tuple[int, ...], dimension: int) -> GBModel:
    shrinkage = float(reader.expect_key("shrinkage"))
    tree_count = int(reader.expect_key("tree_count"))
    init_scores = _parse_floats(reader.expect_key("init_scores"))
    if init_scores.shape != (len(classes),):
        raise FormatError("init_scores length does not match class count")

    trees: dict[int, list[Tree]] = {c: [] for c in classes}
    while reader.peek() is not None:
        header = reader.next()
        parts = header.split()
        if len(parts) != 4 or parts[0] != "tree":
            raise FormatError(f"expected a tree header, got {header!r}")
        fields = dict(p.split("=", 1) for p in parts[1:])
        cls = int(fields["class"])
        n_nodes = int(fields["nodes"])
        feature = np.full(n_nodes, -1, dtype=np.int64)
        threshold = np.zeros(n_nodes)
        value = np.zeros(n_nodes)
        gain = np.zeros(n_nodes)
        left = np.full(n_nodes, -1, dtype=np.int64)
        right = np.full(n_nodes, -1, dtype=np.int64)
        for _ in range(n_nodes):
            node_line = reader.next().split()
            idx = int(node_line[1])
            node_fields = dict(p.split("=", 1) for p in node_line[3:])
            if node_line[2] == "leaf":
                value[idx] = float(node_fields["value"])
            elif node_line[2] == "split":
                feature[idx] = int(node_fields["feature"])
                threshold[idx] = float(node_fields["threshold"])
                gain[idx] = float(node_fields["gain"])
                left[idx] = int(node_fields["left"])
                right[idx] = int(node_fields["right"])
            else:
                raise FormatError(f"unknown node type in {node_line!r}")
        if np.any(feature >= dimension):
            raise FormatError("tree split feature index exceeds model dimension")
        trees[cls].append(
            Tree(feature=feature, threshold=threshold, value=value, gain=gain, left=left, right=right)
        )
    counts = {len(ts) for ts in trees.values()}
    if counts != {tree_count}:
        raise FormatError(f"expected {tree_count} trees per class, found counts {sorted(counts)}")
    return GBModel(
        classes=classes,
        init_scores=init_scores,
        shrinkage=shrinkage,
        tree_count=tree_count,
        trees=tuple(tuple(trees[c]) for c in classes),
        dimension=dimension,
        spec_digest=digest,
    )


def _load_svm(reader: _LineReader, digest: str, classes: tuple[int, ...], dimension: int) -> SVMModel:
    C = float(reader.expect_key("C"))
    gamma = float(reader.expect_key("gamma"))
    scaler = None
    if reader.peek() is not None and reader.peek().startswith("scaler_lo:"):
        lo = _parse_floats(reader.expect_key("scaler_lo"))
        hi = _parse_floats(reader.expect_key("scaler_hi"))
        if lo.shape != (dimension,) or hi.shape != (dimension,):
            raise FormatError("scaler vectors do not match model dimension")
        scaler = Scaler(lo=lo, hi=hi)
    n_vec_line = reader.expect_key("vectors").split()
    n_vec, n_dim = int(n_vec_line[0]), int(n_vec_line[1])
    if n_dim != dimension:
        raise FormatError("support vector width does not match model dimension")
    vectors = np.empty((n_vec, dimension))
    for i in range(n_vec):
        row = _parse_floats(reader.next())
        if row.shape != (dimension,):
            raise FormatError(f"support vector {i} has {row.shape[0]} values, expected {dimension}")
        vectors[i] = row
    machines = []
    while reader.peek() is not None:
        header = reader.next().split()
        if header[0] != "machine":
            raise FormatError(f"expected a machine header, got {' '.join(header)!r}")
        fields = dict(p.split("=", 1) for p in header[1:])
        sv_indices = _parse_ints(reader.expect_key("sv_indices"))
        coef = _parse_floats(reader.expect_key("coef"))
        if len(sv_indices) != int(fields["nsv"]) or len(coef) != int(fields["nsv"]):
            raise FormatError("machine support-vector counts disagree")
        if np.any(sv_indices >= n_vec):
            raise FormatError("machine sv index exceeds vector table")
        machines.append(
            BinaryMachine(
                pos_class=int(fields["pos"]),
                neg_class=int(fields["neg"]),
                sv_indices=sv_indices,
                coef=coef,
                bias=float(fields["bias"]),
            )
        )
    expected = len(classes) * (len(classes) - 1) // 2
    if len(machines) != expected:
        raise FormatError(f"expected {expected} class-pair machines, found {len(machines)}")
    return SVMModel(
        classes=classes,
        vectors=vectors,
        machines=tuple(machines),
        gamma=gamma,
        C=C,
        scaler=scaler,
        spec_digest=digest,
    )
