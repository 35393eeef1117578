"""
Classification tool handlers.
"""

import json
from typing import List

from tokbench.components.registry import tool_handler
from tokbench.utils import TokbenchError, logger

from .base import CLASS_NAMES
from .model_selection import repeated_stratified_kfold


@tool_handler
def classify_texts(model_dir: str, texts: List[str]) -> str:
    """
    Label review texts with a model directory written by ``tokbench fit``.

    Args:
        model_dir: Directory holding manifest.json and the model TSVs
        texts: Review bodies

    Returns:
        JSON string with one "negative"/"positive" label per text
    """
    # imported lazily: the harness depends on this component
    from tokbench.components.harness.pipeline import load_model_dir
    from tokbench.components.vectorize import tokenize_all, transform

    try:
        _, tokenizer, tfidf, classifier = load_model_dir(model_dir)
        predicted = classifier.predict(transform(tfidf, tokenize_all(tokenizer, texts)))
        return json.dumps({"labels": [CLASS_NAMES[int(p)] for p in predicted]})
    except TokbenchError as e:
        logger.error(f"classify_texts failed: {e}")
        return json.dumps({"error": str(e)})


@tool_handler
def cv_folds(labels: List[int], k: int = 5, repeats: int = 1, seed: int = 42) -> str:
    """
    Stratified fold assignment for 0/1 labels.

    Returns:
        JSON string with validation indices per repeat and fold
    """
    try:
        plan = repeated_stratified_kfold(labels, k, repeats, seed)
        folds = [[fold.tolist() for fold in repeat] for repeat in plan.folds]
        return json.dumps({"k": k, "repeats": repeats, "folds": folds})
    except TokbenchError as e:
        logger.error(f"cv_folds failed: {e}")
        return json.dumps({"error": str(e)})
