import math

import numpy as np
import pytest

from qp_oracle import qp_max_enumerate
from landmark_emotion.errors import DimensionMismatchError
from landmark_emotion.features.spec import FeatureBlock, FeatureSpec, FeatureVector
from landmark_emotion.learners.dataset import CLASSES, LabeledDataset
from landmark_emotion.learners.svm import (
    BinaryMachine,
    SVMModel,
    apply_scaler,
    dual_objective,
    fit_scaler,
    grid_search,
    kkt_violation,
    rbf_kernel,
    rbf_kernel_matrix,
    smo_solve,
    svm_predict,
    svm_predict_batch,
    svm_train,
)


def plain_spec(dim):
    return FeatureSpec(blocks=(FeatureBlock("raw", dim),))


def dataset(X, y, ids=()):
    X = np.asarray(X, dtype=float)
    return LabeledDataset(X=X, y=np.asarray(y), spec=plain_spec(X.shape[1]), ids=ids)


# --- kernel -----------------------------------------------------------------


def test_rbf_self_is_one(rng):
    for _ in range(5):
        x = rng.standard_normal(7)
        assert rbf_kernel(x, x, gamma=rng.uniform(0.01, 10)) == 1.0


def test_rbf_hand_value():
    value = rbf_kernel(np.array([0.0, 0.0]), np.array([1.0, 1.0]), gamma=0.5)
    assert value == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert value == pytest.approx(0.36787944117144233, abs=1e-12)


def test_rbf_symmetry(rng):
    for _ in range(10):
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        g = rng.uniform(0.01, 5)
        assert rbf_kernel(x, y, g) == rbf_kernel(y, x, g)


def test_rbf_errors():
    with pytest.raises(DimensionMismatchError):
        rbf_kernel(np.zeros(3), np.zeros(4), 1.0)
    with pytest.raises(DimensionMismatchError):
        rbf_kernel(np.zeros(3), np.zeros(3), 0.0)


def test_rbf_matrix_consistent(rng):
    A = rng.standard_normal((5, 3))
    B = rng.standard_normal((4, 3))
    K = rbf_kernel_matrix(A, B, 0.7)
    for i in range(5):
        for j in range(4):
            assert K[i, j] == pytest.approx(rbf_kernel(A[i], B[j], 0.7), abs=1e-12)


# --- scaler -----------------------------------------------------------------


def test_scaler_endpoints_and_constant(rng):
    X = rng.standard_normal((20, 4)) * 10
    X[:, 2] = 3.14  # constant dimension
    ds = dataset(X, [0] * 10 + [3] * 10)
    scaler = fit_scaler(ds)
    scaled = scaler.transform(X)
    assert np.allclose(scaled.min(axis=0), [-1, -1, 0, -1])
    assert np.allclose(scaled.max(axis=0), [1, 1, 0, 1])
    lows = apply_scaler(scaler, X.min(axis=0))
    assert np.allclose(lows, [-1, -1, 0, -1])
    fv = FeatureVector(values=X[0], spec=plain_spec(4))
    out = apply_scaler(scaler, fv)
    assert isinstance(out, FeatureVector)
    assert np.allclose(out.values, scaled[0])


# --- SMO --------------------------------------------------------------------


def test_smo_separable_toy():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [4.0, 0.0], [4.0, 1.0]])
    y = np.array([1.0, 1.0, -1.0, -1.0])
    K = rbf_kernel_matrix(X, X, 0.5)
    alpha, bias, _ = smo_solve(K, y, C=10.0)
    decisions = K @ (alpha * y) + bias
    assert np.all(np.sign(decisions) == y)
    assert abs(alpha @ y) <= 1e-6
    assert np.all(alpha >= 0) and np.all(alpha <= 10.0)
    assert kkt_violation(K, y, alpha, bias, 10.0) <= 1e-3


def test_smo_xor_rbf():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([1.0, 1.0, -1.0, -1.0])
    K = rbf_kernel_matrix(X, X, 1.0)
    alpha, bias, _ = smo_solve(K, y, C=10.0)
    decisions = K @ (alpha * y) + bias
    assert np.all(np.sign(decisions) == y), "XOR must be separable with an RBF kernel"


def test_smo_matches_enumeration_oracle(rng):
    for trial in range(12):
        n = int(rng.integers(4, 7))
        X = rng.standard_normal((n, 2))
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        if np.all(y == y[0]):
            y[0] = -y[0]
        C = float(rng.choice([0.5, 1.0, 10.0]))
        gamma = float(rng.choice([0.3, 1.0, 2.0]))
        K = rbf_kernel_matrix(X, X, gamma)
        alpha, bias, _ = smo_solve(K, y, C)
        smo_obj = dual_objective(K, y, alpha)
        oracle_obj, _ = qp_max_enumerate(K, y, C)
        assert smo_obj == pytest.approx(oracle_obj, abs=1e-4), f"trial {trial}"
        assert kkt_violation(K, y, alpha, bias, C) <= 1e-3
        assert abs(alpha @ y) <= 1e-6


# --- one-vs-one training ----------------------------------------------------


def separable_three_class(rng, n_per=8):
    centers = {0: (0.0, 0.0), 3: (6.0, 0.0), 5: (0.0, 6.0)}
    X, y = [], []
    for cls, center in centers.items():
        X.append(rng.normal(0, 0.3, size=(n_per, 2)) + center)
        y.extend([cls] * n_per)
    return dataset(np.vstack(X), y)


def test_svm_train_predicts_training_set(rng):
    train = separable_three_class(rng)
    scaler = fit_scaler(train)
    scaled = LabeledDataset(X=scaler.transform(train.X), y=train.y, spec=train.spec)
    model = svm_train(scaled, C=10.0, gamma=1.0, scaler=scaler)
    assert len(model.machines) == 3  # C(3, 2) class pairs
    pred = svm_predict_batch(model, scaled.X)
    assert np.array_equal(pred, train.y)
    label, votes = svm_predict(model, scaled.X[0])
    assert label == CLASSES[train.y[0]]
    assert votes.sum() == len(model.machines)  # one vote per machine


def test_svm_model_invariants(rng):
    train = separable_three_class(rng)
    scaler = fit_scaler(train)
    scaled = LabeledDataset(X=scaler.transform(train.X), y=train.y, spec=train.spec)
    C = 5.0
    model = svm_train(scaled, C=C, gamma=0.5, scaler=scaler)
    for machine in model.machines:
        # coef = alpha * y, so 0 <= |coef| <= C and the machine's coefs sum to ~0
        assert np.all(np.abs(machine.coef) <= C + 1e-9)
        assert abs(machine.coef.sum()) <= 1e-6
        assert len(machine.coef) == len(machine.sv_indices)


def test_svm_single_class_rejected(rng):
    ds = dataset(rng.standard_normal((6, 2)), [4] * 6)
    with pytest.raises(DimensionMismatchError):
        svm_train(ds, C=1.0, gamma=1.0)


def test_svm_sample_order_invariance(rng):
    train = separable_three_class(rng)
    perm = rng.permutation(len(train))
    shuffled = LabeledDataset(X=train.X[perm], y=train.y[perm], spec=train.spec)
    scaler = fit_scaler(train)
    a = svm_train(
        LabeledDataset(X=scaler.transform(train.X), y=train.y, spec=train.spec),
        C=2.0, gamma=1.5, scaler=scaler,
    )
    b = svm_train(
        LabeledDataset(X=scaler.transform(shuffled.X), y=shuffled.y, spec=train.spec),
        C=2.0, gamma=1.5, scaler=scaler,
    )
    probe = scaler.transform(rng.standard_normal((40, 2)) * 3)
    assert np.array_equal(svm_predict_batch(a, probe), svm_predict_batch(b, probe))


def test_vote_tie_breaks_to_earliest_class():
    # three constant-decision machines produce a three-way 1-1-1 vote tie
    # between Angry, Happy and Neutral; the fixed order picks Angry
    dim = 2
    machines = (
        BinaryMachine(0, 3, np.array([], dtype=np.int64), np.array([]), bias=-1.0),  # Happy
        BinaryMachine(0, 4, np.array([], dtype=np.int64), np.array([]), bias=+1.0),  # Angry
        BinaryMachine(3, 4, np.array([], dtype=np.int64), np.array([]), bias=-1.0),  # Neutral
    )
    model = SVMModel(
        classes=(0, 3, 4),
        vectors=np.empty((0, dim)),
        machines=machines,
        gamma=1.0,
        C=1.0,
        scaler=None,
    )
    label, votes = svm_predict(model, np.zeros(dim))
    assert votes[0] == votes[3] == votes[4] == 1
    assert label == "Angry"


# --- grid search ------------------------------------------------------------


def test_grid_search_single_cell(rng):
    train = separable_three_class(rng)
    result = grid_search(train, train, C_grid=[2.0], gamma_grid=[0.25])
    assert (result.C, result.gamma) == (2.0, 0.25)
    assert result.accuracy.shape == (1, 1)


def test_grid_search_separable_hits_100(rng):
    train = separable_three_class(rng)
    result = grid_search(train, train, C_grid=[0.1, 10.0], gamma_grid=[0.01, 1.0])
    assert result.best_accuracy == 1.0
    assert result.accuracy.max() == 1.0
    assert "best" in result.curve_text()


def test_grid_search_tie_break_smaller_c_then_gamma(rng):
    train = separable_three_class(rng)
    result = grid_search(train, train, C_grid=[10.0, 1.0], gamma_grid=[1.0, 0.1])
    ties = result.ties
    assert (result.C, result.gamma) == min(ties)


def test_grid_search_exhaustive_oracle(rng):
    # 7-class gaussian blobs; selected cell must match an exhaustive re-run
    centers = np.array([(0, 0), (4, 0), (0, 4), (4, 4), (8, 0), (0, 8), (8, 8)], dtype=float)
    Xs, ys = [], []
    for cls in range(7):
        Xs.append(rng.normal(0, 0.9, size=(12, 2)) + centers[cls])
        ys.extend([cls] * 12)
    X = np.vstack(Xs)
    y = np.array(ys)
    order = rng.permutation(len(y))
    train = dataset(X[order][:56], y[order][:56])
    val = dataset(X[order][56:], y[order][56:])
    C_grid = [0.5, 8.0]
    gamma_grid = [0.05, 0.8]
    result = grid_search(train, val, C_grid, gamma_grid)

    # independent re-run of every cell through the public training API
    scaler = fit_scaler(train)
    scaled_train = LabeledDataset(X=scaler.transform(train.X), y=train.y, spec=train.spec)
    best = -1.0
    for C in C_grid:
        for gamma in gamma_grid:
            model = svm_train(scaled_train, C, gamma, scaler=scaler)
            acc = float(np.mean(svm_predict_batch(model, scaler.transform(val.X)) == val.y))
            best = max(best, acc)
    assert result.best_accuracy == pytest.approx(best, abs=1e-12)


def test_grid_search_empty_validation(rng):
    train = separable_three_class(rng)
    empty = LabeledDataset(X=np.empty((0, 2)), y=np.empty(0, dtype=int), spec=train.spec)
    with pytest.raises(DimensionMismatchError):
        grid_search(train, empty)
