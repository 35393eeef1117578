"""
Classify Component

Binary review classifiers over TF-IDF rows and the cross-validation used to tune them.
"""

from .base import CLASS_NAMES, Classifier, label_array, load_classifier
from .logistic import (
    LrClassifier,
    LrModel,
    format_lr,
    load_lr_model,
    lr_fit,
    lr_objective_gradient,
    lr_predict,
    parse_lr,
    signed_labels,
    train_lr,
)
from .model_selection import (
    CvPlan,
    GridCell,
    GridSearchResult,
    evaluate_error,
    grid_search,
    parse_grid,
    repeated_stratified_kfold,
)
from .naive_bayes import (
    MnbClassifier,
    MnbModel,
    format_mnb,
    load_mnb_model,
    mnb_fit,
    mnb_predict,
    parse_mnb,
    train_mnb,
)

__all__ = [
    "CLASS_NAMES",
    "Classifier",
    "CvPlan",
    "GridCell",
    "GridSearchResult",
    "LrClassifier",
    "LrModel",
    "MnbClassifier",
    "MnbModel",
    "evaluate_error",
    "format_lr",
    "format_mnb",
    "grid_search",
    "label_array",
    "load_classifier",
    "load_lr_model",
    "load_mnb_model",
    "lr_fit",
    "lr_objective_gradient",
    "lr_predict",
    "mnb_fit",
    "mnb_predict",
    "parse_grid",
    "parse_lr",
    "parse_mnb",
    "repeated_stratified_kfold",
    "signed_labels",
    "train_lr",
    "train_mnb",
]
