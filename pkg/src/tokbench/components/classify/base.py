"""
Shared plumbing for binary review classifiers.

Labels are integer arrays with 0 = negative and 1 = positive.
"""

from pathlib import Path
from typing import Iterable, Protocol

import numpy as np
from scipy import sparse

from tokbench.components.corpus import Sentiment
from tokbench.utils import ModelFormatError, ValidationError, decode_utf8, safe_read_bytes

CLASS_NAMES = ("negative", "positive")


class Classifier(Protocol):
    name: str

    def predict(self, X: sparse.spmatrix) -> np.ndarray: ...

    def save(self, path: str | Path) -> Path: ...


def label_array(labels: Iterable[Sentiment | int]) -> np.ndarray:
    """Convert Sentiment values (or 0/1 ints) to an int array."""
    values = [label.value if isinstance(label, Sentiment) else int(label) for label in labels]
    y = np.array(values, dtype=np.int64)
    if y.size and not np.isin(y, (0, 1)).all():
        raise ValidationError("Labels must be 0 (negative) or 1 (positive)")
    return y


def check_training_data(X: sparse.spmatrix, y: np.ndarray) -> None:
    if X.shape[0] != y.shape[0]:
        raise ValidationError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
    if np.unique(y).size < 2:
        raise ValidationError("Training labels must contain both classes")


def check_columns(X: sparse.spmatrix, n_features: int) -> None:
    if X.shape[1] != n_features:
        raise ValidationError(f"X has {X.shape[1]} columns, model expects {n_features}")


def parse_header(line: str, expected: str) -> dict[str, str]:
    """Split ``#kind v1 key=value ...`` into its settings."""
    if not line.startswith(expected):
        raise ModelFormatError(f"Missing '{expected}' header")
    settings: dict[str, str] = {}
    for token in line[len(expected) :].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise ModelFormatError(f"Malformed header field: {token!r}")
        settings[key] = value
    return settings


def load_classifier(path: str | Path) -> Classifier:
    """Load whichever classifier a model file holds, dispatching on its header."""
    data = safe_read_bytes(path)
    head = decode_utf8(data).split("\n", 1)[0]
    if head.startswith("#mnb"):
        from .naive_bayes import MnbClassifier, parse_mnb

        return MnbClassifier(parse_mnb(data))
    if head.startswith("#lr"):
        from .logistic import LrClassifier, parse_lr

        return LrClassifier(parse_lr(data))
    raise ModelFormatError(f"Unrecognized classifier header: {head[:40]!r}")
