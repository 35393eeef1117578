"""
L2-regularized binary logistic regression fitted with L-BFGS.

The objective is ``J(w, b) = 0.5 * ||w||^2 + C * sum_i log(1 + exp(-y_i (w . x_i + b)))`` with
labels in {-1, +1}; the bias is not regularized.

Model file layout:

    #lr v1 C=10 n_features=3 converged=1 n_iter=12 grad_norm=3.2e-07
    bias	<b>
    0	<w_0>
    ...
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import minimize
from scipy.special import expit, log_expit

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

MODEL_HEADER = "#lr v1"
HISTORY_SIZE = 10


@dataclass(frozen=True)
class LrModel:
    weights: np.ndarray
    bias: float
    C: float
    converged: bool = True
    n_iter: int = 0
    grad_norm: float = 0.0
    objective_trace: Tuple[float, ...] = field(default=(), compare=False)

    @property
    def n_features(self) -> int:
        return int(self.weights.shape[0])


def signed_labels(y: np.ndarray) -> np.ndarray:
    """Map 0/1 labels to -1/+1."""
    return np.where(np.asarray(y) == 1, 1.0, -1.0)


def lr_objective_gradient(
    weights: np.ndarray, bias: float, X: sparse.spmatrix, y: np.ndarray, C: float
) -> Tuple[float, np.ndarray]:
    """
    Objective and analytic gradient.

    Args:
        weights: Feature weights, shape (V,)
        bias: Intercept
        X: Feature matrix, shape (n, V)
        y: Labels in {-1, +1}
        C: Weight of the data term

    Returns:
        Tuple of (objective, gradient of shape (V + 1,) with the bias derivative last)
    """
    margins = y * (X @ weights + bias)
    objective = 0.5 * float(weights @ weights) - C * float(np.sum(log_expit(margins)))
    residual = -y * expit(-margins)
    grad_w = weights + C * np.asarray(X.T @ residual).ravel()
    grad_b = C * float(residual.sum())
    return objective, np.append(grad_w, grad_b)


def lr_fit(
    X: sparse.spmatrix,
    y: np.ndarray,
    C: float = 10.0,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> LrModel:
    """
    Minimize the objective from w = 0, b = 0 with L-BFGS (history 10).

    Stops when the projected gradient's max-norm drops to ``tol``, after ``max_iter``
    iterations, or when the line search can make no further progress. ``converged`` is True
    exactly when the gradient max-norm at the returned point is at most ``tol``.

    Raises:
        ValidationError: If C <= 0, shapes disagree, or only one class is present
    """
    if not C > 0.0:
        raise ValidationError(f"C must be > 0, got {C}")
    X = sparse.csr_matrix(X)
    y = np.asarray(y)
    check_training_data(X, y)
    signs = signed_labels(y)
    n_features = X.shape[1]

    def fun(theta: np.ndarray) -> Tuple[float, np.ndarray]:
        return lr_objective_gradient(theta[:-1], theta[-1], X, signs, C)

    x0 = np.zeros(n_features + 1)
    trace: List[float] = [fun(x0)[0]]

    def record(intermediate_result: Any) -> None:
        trace.append(float(intermediate_result.fun))

    result = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={
            "maxcor": HISTORY_SIZE,
            "maxiter": max_iter,
            "gtol": tol,
            "ftol": 0.0,
            "maxls": 50,
        },
    )

    _, grad = fun(result.x)
    grad_norm = float(np.max(np.abs(grad)))
    converged = grad_norm <= tol
    if not converged:
        logger.warning(
            f"LR did not converge after {result.nit} iterations (C={C}): gradient max-norm "
            f"{grad_norm:.3g} > tol {tol:g} ({result.message})"
        )
    logger.debug(f"LR fit: C={C}, {result.nit} iterations, objective {result.fun:.6f}")
    return LrModel(
        weights=result.x[:-1].copy(),
        bias=float(result.x[-1]),
        C=float(C),
        converged=converged,
        n_iter=int(result.nit),
        grad_norm=grad_norm,
        objective_trace=tuple(trace),
    )


def lr_decision(model: LrModel, X: sparse.spmatrix) -> np.ndarray:
    check_columns(X, model.n_features)
    return np.asarray(X @ model.weights).ravel() + model.bias


def lr_predict(model: LrModel, X: sparse.spmatrix) -> Tuple[np.ndarray, np.ndarray]:
    """
    Predict labels (1 iff p >= 0.5) and positive-class probabilities.

    Raises:
        ValidationError: If X has the wrong number of columns
    """
    probabilities = expit(lr_decision(model, X))
    return (probabilities >= 0.5).astype(np.int64), probabilities


def format_lr(model: LrModel) -> str:
    header = (
        f"{MODEL_HEADER} C={format_float(model.C)} n_features={model.n_features} "
        f"converged={int(model.converged)} n_iter={model.n_iter} "
        f"grad_norm={format_float(model.grad_norm)}"
    )
    lines = [header, f"bias\t{format_float(model.bias)}"]
    lines.extend(f"{i}\t{format_float(float(w))}" for i, w in enumerate(model.weights))
    return "\n".join(lines) + "\n"


def parse_lr(data: bytes) -> LrModel:
    """
    Parse a serialized LR model.

    Raises:
        ModelFormatError: If the file is malformed
    """
    lines = [line for line in decode_utf8(data).split("\n") if line]
    if not lines:
        raise ModelFormatError("Empty LR model file")
    settings = parse_header(lines[0], MODEL_HEADER)
    try:
        n_features = int(settings["n_features"])
        rows = [line.split("\t") for line in lines[1:]]
        if len(rows) != n_features + 1 or rows[0][0] != "bias":
            raise ModelFormatError(f"Expected a bias row and {n_features} weight rows")
        for expected, row in enumerate(rows[1:]):
            if len(row) != 2 or int(row[0]) != expected:
                raise ModelFormatError(f"Weight row {expected} is malformed")
        return LrModel(
            weights=np.array([float(row[1]) for row in rows[1:]], dtype=np.float64),
            bias=float(rows[0][1]),
            C=float(settings["C"]),
            converged=settings.get("converged", "1") == "1",
            n_iter=int(settings.get("n_iter", "0")),
            grad_norm=float(settings.get("grad_norm", "0")),
        )
    except (KeyError, ValueError, IndexError) as e:
        raise ModelFormatError(f"Malformed LR model: {e}") from None


class LrClassifier:
    name = "lr"

    def __init__(self, model: LrModel):
        self.model = model

    def predict(self, X: sparse.spmatrix) -> np.ndarray:
        return lr_predict(self.model, X)[0]

    def save(self, path: str | Path) -> Path:
        return safe_write_text(path, format_lr(self.model))


def load_lr_model(path: str | Path) -> LrModel:
    return parse_lr(safe_read_bytes(path))


@register_classifier("lr")
def train_lr(
    X: sparse.spmatrix,
    y: np.ndarray,
    C: Optional[float] = None,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    **_: object,
) -> LrClassifier:
    """Fit an LR classifier; unset hyperparameters come from the component config."""
    defaults = component_defaults("classify")
    return LrClassifier(
        lr_fit(
            X,
            y,
            C=float(C if C is not None else defaults["C"]),
            tol=float(tol if tol is not None else defaults["tol"]),
            max_iter=int(max_iter if max_iter is not None else defaults["max_iter"]),
        )
    )
