"""Classifiers: one-vs-one RBF SVM via SMO, and multiclass gradient boosting."""

from .dataset import CLASSES, CLASS_INDEX, UNLABELED, LabeledDataset, label_index
from .gb import (
    GBModel,
    Tree,
    gb_influence,
    gb_predict,
    gb_predict_batch,
    gb_predict_proba,
    gb_scores,
    gb_staged_scores,
    gb_train,
    gb_truncate,
)
from .persist import load_model, save_model
from .svm import (
    DEFAULT_C_GRID,
    DEFAULT_GAMMA_GRID,
    BinaryMachine,
    GridSearchResult,
    Scaler,
    SVMModel,
    apply_scaler,
    dual_objective,
    fit_scaler,
    grid_search,
    kkt_violation,
    rbf_kernel,
    rbf_kernel_matrix,
    smo_solve,
    svm_decision_votes,
    svm_predict,
    svm_predict_batch,
    svm_train,
)

__all__ = [
    "BinaryMachine",
    "CLASSES",
    "CLASS_INDEX",
    "DEFAULT_C_GRID",
    "DEFAULT_GAMMA_GRID",
    "GBModel",
    "GridSearchResult",
    "LabeledDataset",
    "SVMModel",
    "Scaler",
    "Tree",
    "UNLABELED",
    "apply_scaler",
    "dual_objective",
    "fit_scaler",
    "gb_influence",
    "gb_predict",
    "gb_predict_batch",
    "gb_predict_proba",
    "gb_scores",
    "gb_staged_scores",
    "gb_train",
    "gb_truncate",
    "grid_search",
    "kkt_violation",
    "label_index",
    "load_model",
    "rbf_kernel",
    "rbf_kernel_matrix",
    "save_model",
    "smo_solve",
    "svm_decision_votes",
    "svm_predict",
    "svm_predict_batch",
    "svm_train",
]
