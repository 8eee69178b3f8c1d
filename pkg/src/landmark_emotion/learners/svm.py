"""RBF-kernel support vector machines trained by sequential minimal optimization.

Binary subproblems solve the standard C-SVC dual

    min  0.5 * a' Q a - e' a    s.t.  0 <= a_i <= C,  y' a = 0,  Q_ij = y_i y_j K_ij

with maximal-violating-pair working-set selection.  Multiclass reduction is
one-vs-one with majority voting.  Everything is deterministic: subproblem
rows are put into a canonical order before solving, and all tie-breaks are
first-index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError
from ..features.spec import FeatureVector
from .dataset import CLASSES, LabeledDataset

DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 1_000_000
_TAU = 1e-12

DEFAULT_C_GRID = tuple(2.0**e for e in range(-5, 16, 2))
DEFAULT_GAMMA_GRID = tuple(2.0**e for e in range(-15, 4, 2))


def rbf_kernel(x: np.ndarray, y: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionMismatchError(f"kernel arguments must be equal-length vectors, got {x.shape} and {y.shape}")
    if not gamma > 0:
        raise DimensionMismatchError(f"gamma must be positive, got {gamma}")
    d = x - y
    return math.exp(-gamma * float(d @ d))


def squared_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped to be non-negative."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    aa = np.sum(A**2, axis=1)[:, None]
    bb = np.sum(B**2, axis=1)[None, :]
    return np.maximum(aa + bb - 2.0 * (A @ B.T), 0.0)


def rbf_kernel_matrix(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * squared_distances(A, B))


@dataclass(frozen=True)
class Scaler:
    """Per-dimension affine map sending training min -> -1 and max -> +1.

    Dimensions that were constant in training map to 0 everywhere.
    """

    lo: np.ndarray
    hi: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        span = self.hi - self.lo
        safe = np.where(span > 0, span, 1.0)
        scaled = 2.0 * (X - self.lo) / safe - 1.0
        return np.where(span > 0, scaled, 0.0)


def fit_scaler(train: LabeledDataset) -> Scaler:
    return Scaler(lo=train.X.min(axis=0), hi=train.X.max(axis=0))


def apply_scaler(scaler: Scaler, x: FeatureVector | np.ndarray) -> FeatureVector | np.ndarray:
    if isinstance(x, FeatureVector):
        return FeatureVector(values=scaler.transform(x.values), spec=x.spec)
    return scaler.transform(np.asarray(x, dtype=np.float64))


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, float, int]:
    """Solve one binary C-SVC dual; returns (alpha, bias, iterations).

    ``K`` is the full kernel matrix, ``y`` a +-1 vector.  The bias is for the
    decision function f(x) = sum_i alpha_i y_i K(x_i, x) + bias.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if K.shape != (n, n):
        raise DimensionMismatchError(f"kernel matrix {K.shape} does not match {n} labels")
    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective at alpha = 0

    neg_yg = np.empty(n)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        np.multiply(-y, grad, out=neg_yg)
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, neg_yg, -np.inf)))
        j = int(np.argmin(np.where(low, neg_yg, np.inf)))
        if neg_yg[i] - neg_yg[j] <= tol:
            iterations -= 1
            break

        quad = max(K[i, i] + K[j, j] - 2.0 * K[i, j], _TAU)
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total

        grad += Q[:, i] * (alpha[i] - old_i) + Q[:, j] * (alpha[j] - old_j)

    bias = _compute_bias(y, alpha, grad, C)
    return alpha, bias, iterations


def _compute_bias(y: np.ndarray, alpha: np.ndarray, grad: np.ndarray, C: float) -> float:
    """Bias from the KKT conditions; average over free vectors when any exist."""
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yg[free].mean())
    else:
        upper = np.where((alpha <= 0) & (y > 0) | (alpha >= C) & (y < 0), yg, np.inf)
        lower = np.where((alpha <= 0) & (y < 0) | (alpha >= C) & (y > 0), yg, -np.inf)
        rho = (float(upper.min()) + float(lower.max())) / 2.0
    return -rho


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """sum(a) - 0.5 a' Q a, the value SMO maximizes."""
    y = np.asarray(y, dtype=np.float64)
    Q = (y[:, None] * y[None, :]) * K
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)


def kkt_violation(K: np.ndarray, y: np.ndarray, alpha: np.ndarray, bias: float, C: float) -> float:
    """Largest violation of the C-SVC KKT conditions at (alpha, bias)."""
    y = np.asarray(y, dtype=np.float64)
    f = K @ (alpha * y) + bias
    margins = y * f
    violation = 0.0
    for a, m in zip(alpha, margins):
        if a <= 1e-9:
            violation = max(violation, 1.0 - m)  # should satisfy m >= 1
        elif a >= C - 1e-9:
            violation = max(violation, m - 1.0)  # should satisfy m <= 1
        else:
            violation = max(violation, abs(m - 1.0))
    violation = max(violation, abs(float(alpha @ y)))
    return float(violation)


@dataclass(frozen=True)
class BinaryMachine:
    """One class-pair classifier: positive decisions vote for ``pos_class``."""

    pos_class: int
    neg_class: int
    sv_indices: np.ndarray  # into SVMModel.vectors
    coef: np.ndarray  # alpha_i * y_i per support vector
    bias: float


@dataclass(frozen=True)
class SVMModel:
    """One-vs-one RBF SVM over the fixed class order."""

    classes: tuple[int, ...]
    vectors: np.ndarray  # shared support-vector table (rows are scaled features)
    machines: tuple[BinaryMachine, ...]
    gamma: float
    C: float
    scaler: Scaler | None
    spec_digest: str = ""
    # original training-row index of each vector; metadata for audits, not persisted
    vector_train_rows: tuple[int, ...] = field(default=(), repr=False)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


def _canonical_order(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row order independent of how the caller shuffled the samples."""
    keys = np.vstack([y[None, :].astype(np.float64), X.T[::-1]])
    return np.lexsort(keys)


def svm_train(
    train: LabeledDataset,
    C: float,
    gamma: float,
    scaler: Scaler | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    _sqdist: np.ndarray | None = None,
) -> SVMModel:
    """Train one-vs-one binary machines on pre-scaled features.

    ``_sqdist`` optionally carries the precomputed train-by-train squared
    distance matrix so a grid search does not recompute it per cell.
    """
    train.require_labeled()
    classes = train.classes_present()
    if len(classes) < 2:
        raise DimensionMismatchError("SVM training needs at least two classes present")
    if not C > 0 or not gamma > 0:
        raise DimensionMismatchError(f"C and gamma must be positive, got C={C}, gamma={gamma}")
    X, y = train.X, train.y
    if _sqdist is None:
        _sqdist = squared_distances(X, X)

    machines = []
    used_rows: list[int] = []
    for ai in range(len(classes)):
        for bi in range(ai + 1, len(classes)):
            pos, neg = classes[ai], classes[bi]
            rows = np.flatnonzero((y == pos) | (y == neg))
            labels = np.where(y[rows] == pos, 1.0, -1.0)
            order = _canonical_order(X[rows], labels)
            rows = rows[order]
            labels = labels[order]
            K = np.exp(-gamma * _sqdist[np.ix_(rows, rows)])
            alpha, bias, _ = smo_solve(K, labels, C, tol=tol, max_iter=max_iter)
            sv = np.flatnonzero(alpha > 1e-12)
            machines.append(
                (pos, neg, rows[sv], (alpha * labels)[sv], bias)
            )
            used_rows.extend(rows[sv].tolist())

    unique_rows = sorted(set(used_rows))
    row_to_vector = {r: i for i, r in enumerate(unique_rows)}
    vectors = X[unique_rows] if unique_rows else np.empty((0, X.shape[1]))
    built = tuple(
        BinaryMachine(
            pos_class=pos,
            neg_class=neg,
            sv_indices=np.array([row_to_vector[r] for r in sv_rows], dtype=np.int64),
            coef=np.asarray(coef, dtype=np.float64),
            bias=float(bias),
        )
        for pos, neg, sv_rows, coef, bias in machines
    )
    return SVMModel(
        classes=classes,
        vectors=vectors,
        machines=built,
        gamma=gamma,
        C=C,
        scaler=scaler,
        vector_train_rows=tuple(unique_rows),
    )


def svm_decision_votes(model: SVMModel, X: np.ndarray) -> np.ndarray:
    """Vote counts per global class for each row of pre-scaled ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.dimension:
        raise DimensionMismatchError(f"expected {model.dimension} features, got {X.shape[1]}")
    K = rbf_kernel_matrix(X, model.vectors, model.gamma) if len(model.vectors) else np.zeros((X.shape[0], 0))
    votes = np.zeros((X.shape[0], len(CLASSES)), dtype=np.int64)
    for m in model.machines:
        dec = K[:, m.sv_indices] @ m.coef + m.bias
        votes[:, m.pos_class] += dec > 0
        votes[:, m.neg_class] += ~(dec > 0)
    return votes


def svm_predict(model: SVMModel, x: FeatureVector | np.ndarray) -> tuple[str, np.ndarray]:
    """Label and per-class vote counts for one pre-scaled sample.

    Vote ties resolve to the class earliest in the fixed order.
    """
    values = x.values if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    votes = svm_decision_votes(model, values[None, :])[0]
    return CLASSES[int(np.argmax(votes))], votes


def svm_predict_batch(model: SVMModel, X: np.ndarray) -> np.ndarray:
    """Predicted class indices for each row of pre-scaled ``X``."""
    return np.argmax(svm_decision_votes(model, X), axis=1)


@dataclass(frozen=True)
class GridSearchResult:
    """Validation accuracies over the (C, gamma) grid and the selected cell."""

    C: float
    gamma: float
    C_grid: tuple[float, ...]
    gamma_grid: tuple[float, ...]
    accuracy: np.ndarray  # shape (len(C_grid), len(gamma_grid))
    best_accuracy: float
    ties: tuple[tuple[float, float], ...]  # all cells attaining the maximum

    def curve_text(self) -> str:
        header = "C\\gamma " + " ".join(f"{g:.3g}" for g in self.gamma_grid)
        lines = [header]
        for i, c in enumerate(self.C_grid):
            cells = " ".join(f"{100 * a:.1f}" for a in self.accuracy[i])
            lines.append(f"{c:.3g} {cells}")
        lines.append(
            f"best C={self.C:.6g} gamma={self.gamma:.6g} "
            f"validation_accuracy={100 * self.best_accuracy:.1f}%"
        )
        return "\n".join(lines) + "\n"


def grid_search(
    train: LabeledDataset,
    val: LabeledDataset,
    C_grid: Sequence[float] = DEFAULT_C_GRID,
    gamma_grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> GridSearchResult:
    """Train on ``train`` per cell, score on ``val``; ties prefer small C then small gamma."""
    if len(val) == 0:
        raise DimensionMismatchError("grid search needs a non-empty validation set")
    if not C_grid or not gamma_grid:
        raise DimensionMismatchError("grids must be non-empty")
    train.require_labeled()
    val.require_labeled()

    scaler = fit_scaler(train)
    Xtr = scaler.transform(train.X)
    Xval = scaler.transform(val.X)
    train_scaled = LabeledDataset(X=Xtr, y=train.y, spec=train.spec, ids=train.ids)
    tr_sqdist = squared_distances(Xtr, Xtr)
    val_sqdist = squared_distances(Xval, Xtr)

    C_grid = tuple(float(c) for c in C_grid)
    gamma_grid = tuple(float(g) for g in gamma_grid)
    accuracy = np.zeros((len(C_grid), len(gamma_grid)))
    for gi, gamma in enumerate(gamma_grid):
        for ci, C in enumerate(C_grid):
            model = svm_train(
                train_scaled, C, gamma, scaler=scaler, tol=tol, max_iter=max_iter, _sqdist=tr_sqdist
            )
            K_val = np.exp(-gamma * val_sqdist[:, list(model.vector_train_rows)]) if len(
                model.vectors
            ) else np.zeros((len(val), 0))
            votes = np.zeros((len(val), len(CLASSES)), dtype=np.int64)
            for m in model.machines:
                dec = K_val[:, m.sv_indices] @ m.coef + m.bias
                votes[:, m.pos_class] += dec > 0
                votes[:, m.neg_class] += ~(dec > 0)
            pred = np.argmax(votes, axis=1)
            accuracy[ci, gi] = float(np.mean(pred == val.y))

    best_acc = float(accuracy.max())
    ties = tuple(
        (C_grid[ci], gamma_grid[gi])
        for ci in range(len(C_grid))
        for gi in range(len(gamma_grid))
        if accuracy[ci, gi] == best_acc
    )
    best_C, best_gamma = min(ties)
    return GridSearchResult(
        C=best_C,
        gamma=best_gamma,
        C_grid=C_grid,
        gamma_grid=gamma_grid,
        accuracy=accuracy,
        best_accuracy=best_acc,
        ties=ties,
    )
