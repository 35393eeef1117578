"""
Multinomial Naive Bayes with additive smoothing over (possibly fractional) feature values.

Model file layout:

    #mnb v1 alpha=1 n_features=3
    prior	<log P(negative)>	<log P(positive)>
    0	<log θ(0|negative)>	<log θ(0|positive)>
    ...
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from tokbench.components.registry import component_defaults, register_classifier
from tokbench.utils import (
    ModelFormatError,
    ValidationError,
    decode_utf8,
    format_float,
    logger,
    safe_read_bytes,
    safe_write_text,
)

from .base import check_columns, check_training_data, parse_header

MODEL_HEADER = "#mnb v1"


@dataclass(frozen=True)
class MnbModel:
    # rows indexed by class: 0 = negative, 1 = positive
    class_log_prior: np.ndarray
    feature_log_prob: np.ndarray
    alpha: float

    @property
    def n_features(self) -> int:
        return int(self.feature_log_prob.shape[1])


def mnb_fit(X: sparse.spmatrix, y: np.ndarray, alpha: float = 1.0) -> MnbModel:
    """
    Fit class priors and smoothed per-class feature likelihoods.

    Raises:
        ValidationError: If alpha <= 0, shapes disagree, or only one class is present
    """
    if not alpha > 0.0:
        raise ValidationError(f"alpha must be > 0, got {alpha}")
    X = sparse.csr_matrix(X)
    y = np.asarray(y)
    check_training_data(X, y)

    n_features = X.shape[1]
    priors = np.empty(2)
    log_theta = np.empty((2, n_features))
    for c in (0, 1):
        rows = X[y == c]
        priors[c] = rows.shape[0] / X.shape[0]
        feature_count = np.asarray(rows.sum(axis=0), dtype=np.float64).ravel()
        smoothed = feature_count + alpha
        log_theta[c] = np.log(smoothed) - np.log(feature_count.sum() + alpha * n_features)

    logger.debug(f"Fitted MNB on {X.shape[0]} rows, {n_features} features (alpha={alpha})")
    return MnbModel(np.log(priors), log_theta, float(alpha))


def mnb_scores(model: MnbModel, X: sparse.spmatrix) -> np.ndarray:
    """Joint log-likelihood per row and class, shape (n, 2)."""
    check_columns(X, model.n_features)
    return np.asarray(X @ model.feature_log_prob.T) + model.class_log_prior


def mnb_predict(model: MnbModel, X: sparse.spmatrix) -> Tuple[np.ndarray, np.ndarray]:
    """
    Predict labels and class posteriors.

    Returns:
        Tuple of (labels with 0 = negative / 1 = positive, posteriors of shape (n, 2))

    Raises:
        ValidationError: If X has the wrong number of columns
    """
    scores = mnb_scores(model, X)
    posteriors = np.exp(scores - logsumexp(scores, axis=1, keepdims=True))
    return np.argmax(scores, axis=1).astype(np.int64), posteriors


def format_mnb(model: MnbModel) -> str:
    lines = [f"{MODEL_HEADER} alpha={format_float(model.alpha)} n_features={model.n_features}"]
    lines.append("prior\t" + "\t".join(format_float(float(v)) for v in model.class_log_prior))
    for column in range(model.n_features):
        neg, pos = model.feature_log_prob[:, column]
        lines.append(f"{column}\t{format_float(float(neg))}\t{format_float(float(pos))}")
    return "\n".join(lines) + "\n"


def parse_mnb(data: bytes) -> MnbModel:
    """
    Parse a serialized MNB model.

    Raises:
        ModelFormatError: If the file is malformed
    """
    lines = [line for line in decode_utf8(data).split("\n") if line]
    if not lines:
        raise ModelFormatError("Empty MNB model file")
    settings = parse_header(lines[0], MODEL_HEADER)
    try:
        alpha = float(settings["alpha"])
        n_features = int(settings["n_features"])
        rows = [line.split("\t") for line in lines[1:]]
        if len(rows) != n_features + 1 or rows[0][0] != "prior":
            raise ModelFormatError(f"Expected a prior row and {n_features} feature rows")
        prior = np.array([float(v) for v in rows[0][1:]])
        log_theta = np.array([[float(v) for v in row[1:]] for row in rows[1:]]).T
    except (KeyError, ValueError) as e:
        raise ModelFormatError(f"Malformed MNB model: {e}") from None
    if prior.shape != (2,) or (n_features and log_theta.shape != (2, n_features)):
        raise ModelFormatError("MNB parameter rows must hold two values each")
    return MnbModel(prior, log_theta.reshape(2, n_features), alpha)


class MnbClassifier:
    name = "mnb"

    def __init__(self, model: MnbModel):
        self.model = model

    def predict(self, X: sparse.spmatrix) -> np.ndarray:
        return mnb_predict(self.model, X)[0]

    def save(self, path: str | Path) -> Path:
        return safe_write_text(path, format_mnb(self.model))


def load_mnb_model(path: str | Path) -> MnbModel:
    return parse_mnb(safe_read_bytes(path))


@register_classifier("mnb")
def train_mnb(
    X: sparse.spmatrix, y: np.ndarray, alpha: Optional[float] = None, **_: object
) -> MnbClassifier:
    """Fit an MNB classifier; ``alpha`` defaults to the component config."""
    if alpha is None:
        alpha = float(component_defaults("classify")["alpha"])
    return MnbClassifier(mnb_fit(X, y, alpha))
