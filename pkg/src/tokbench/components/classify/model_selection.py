"""
Repeated stratified k-fold cross-validation and grid search for logistic regression.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np
from scipy import sparse

from tokbench.utils import ConfigError, ValidationError, logger

from .logistic import LrModel, lr_fit, lr_predict

Params = Dict[str, float]


def evaluate_error(predicted: Sequence[Any], gold: Sequence[Any]) -> float:
    """
    Percentage of positions where ``predicted`` differs from ``gold``.

    Raises:
        ValidationError: If the sequences are empty or differ in length
    """
    p = np.asarray(predicted)
    g = np.asarray(gold)
    if p.shape[0] != g.shape[0]:
        raise ValidationError(f"Length mismatch: {p.shape[0]} predictions, {g.shape[0]} labels")
    if g.shape[0] == 0:
        raise ValidationError("Cannot compute an error rate over zero items")
    return 100.0 * int(np.count_nonzero(p != g)) / g.shape[0]


@dataclass(frozen=True)
class CvPlan:
    k: int
    repeats: int
    seed: int
    # folds[repeat][fold] -> sorted validation row indices
    folds: Tuple[Tuple[np.ndarray, ...], ...]
    n_samples: int

    def splits(self) -> Iterator[Tuple[int, int, np.ndarray, np.ndarray]]:
        """Yield (repeat, fold, train_indices, validation_indices)."""
        everything = np.arange(self.n_samples)
        for r, repeat in enumerate(self.folds):
            for f, validation in enumerate(repeat):
                yield r, f, np.setdiff1d(everything, validation, assume_unique=True), validation

    def __len__(self) -> int:
        return self.k * self.repeats


def repeated_stratified_kfold(
    y: Sequence[Any], k: int, repeats: int, seed: int, allow_small_classes: bool = False
) -> CvPlan:
    """
    Stratified fold assignment, repeated with fresh shuffles.

    Per repeat, each class is shuffled with a PCG64 generator seeded by ``seed`` and dealt
    round-robin to folds. The dealing position carries over between classes so fold sizes stay
    balanced as well.

    Args:
        y: Class label per row
        k: Number of folds
        repeats: Number of reshuffled repetitions
        seed: PCG64 seed
        allow_small_classes: Deal a class with fewer than k members to fewer folds (with a
            warning) instead of failing

    Raises:
        ValidationError: If k < 2, repeats < 1, or a class has fewer than k members and
            ``allow_small_classes`` is False
    """
    if k < 2:
        raise ValidationError(f"k must be >= 2, got {k}")
    if repeats < 1:
        raise ValidationError(f"repeats must be >= 1, got {repeats}")
    labels = np.asarray(y)
    classes, counts = np.unique(labels, return_counts=True)
    for cls, count in zip(classes.tolist(), counts.tolist()):
        if count >= k:
            continue
        if not allow_small_classes:
            raise ValidationError(f"Class {cls} has {count} members, fewer than k={k}")
        logger.warning(f"Class {cls} has {count} members; some folds will not contain it")

    rng = np.random.Generator(np.random.PCG64(seed))
    plan = []
    for _ in range(repeats):
        buckets: List[List[int]] = [[] for _ in range(k)]
        offset = 0
        for cls in classes:
            members = rng.permutation(np.flatnonzero(labels == cls))
            for j, index in enumerate(members.tolist()):
                buckets[(offset + j) % k].append(index)
            offset = (offset + members.shape[0]) % k
        plan.append(tuple(np.array(sorted(b), dtype=np.int64) for b in buckets))

    return CvPlan(k, repeats, seed, tuple(plan), int(labels.shape[0]))


def parse_grid(text: str) -> List[Params]:
    """
    Parse ``"C=0.01,0.1,1"`` into ``[{"C": 0.01}, {"C": 0.1}, {"C": 1.0}]``.

    Raises:
        ConfigError: If the grid names anything but C or has no values
    """
    key, sep, raw_values = text.partition("=")
    if not sep or key.strip() != "C":
        raise ConfigError(f"Grid must look like 'C=v1,v2,...', got {text!r}")
    try:
        values = [float(v) for v in raw_values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"Grid values must be numbers: {raw_values!r}") from None
    if not values or any(v <= 0 for v in values):
        raise ConfigError("Grid needs at least one positive C")
    return [{"C": v} for v in values]


@dataclass(frozen=True)
class GridCell:
    params: Params
    fold_errors: Tuple[float, ...]

    @property
    def mean_error(self) -> float:
        return math.fsum(self.fold_errors) / len(self.fold_errors)


@dataclass(frozen=True)
class GridSearchResult:
    cells: Tuple[GridCell, ...]
    best: GridCell
    model: LrModel

    @property
    def best_params(self) -> Params:
        return self.best.params

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cells": [
                {"params": c.params, "mean_error": c.mean_error, "fold_errors": list(c.fold_errors)}
                for c in self.cells
            ],
            "best_params": self.best.params,
            "best_mean_error": self.best.mean_error,
        }


def grid_search(
    X: sparse.spmatrix,
    y: np.ndarray,
    grid: Sequence[Params],
    plan: CvPlan,
    jobs: int = 1,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> GridSearchResult:
    """
    Cross-validate LR for every grid point, pick the lowest mean error, and refit on all rows.

    Equal mean errors go to the smaller C. Fold jobs run on a thread pool; results are collected
    in submission order so the outcome does not depend on ``jobs``.

    Raises:
        ValidationError: If the grid is empty or the plan does not match X
    """
    if not grid:
        raise ValidationError("Grid must contain at least one combination")
    X = sparse.csr_matrix(X)
    y = np.asarray(y)
    if plan.n_samples != X.shape[0]:
        raise ValidationError(f"CV plan covers {plan.n_samples} rows, X has {X.shape[0]}")

    splits = list(plan.splits())

    def run_fold(params: Params, train_idx: np.ndarray, valid_idx: np.ndarray) -> float:
        model = lr_fit(X[train_idx], y[train_idx], C=params["C"], tol=tol, max_iter=max_iter)
        return evaluate_error(lr_predict(model, X[valid_idx])[0], y[valid_idx])

    logger.info(f"Grid search: {len(grid)} combinations x {len(splits)} folds, {jobs} jobs")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = [
            [executor.submit(run_fold, params, train, valid) for _, _, train, valid in splits]
            for params in grid
        ]
        cells = tuple(
            GridCell(dict(params), tuple(f.result() for f in row))
            for params, row in zip(grid, futures)
        )

    for cell in cells:
        logger.info(f"  C={cell.params['C']:g}: mean error {cell.mean_error:.2f}%")
    best = min(cells, key=lambda cell: (cell.mean_error, cell.params["C"]))
    logger.info(f"Best C={best.params['C']:g} ({best.mean_error:.2f}%), refitting on all rows")
    model = lr_fit(X, y, C=best.params["C"], tol=tol, max_iter=max_iter)
    return GridSearchResult(cells, best, model)
