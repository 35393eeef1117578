"""
TF-IDF tool handlers.
"""

import json
from typing import List

from tokbench.components.registry import tool_handler
from tokbench.utils import TokbenchError, logger

from .tfidf import fit_transform


@tool_handler
def tfidf_vectorize(documents: List[List[str]]) -> str:
    """
    Fit TF-IDF on pre-tokenized documents and return their normalized rows.

    Args:
        documents: One token list per document

    Returns:
        JSON string with the vocabulary (token -> column), idf weights and sparse rows
    """
    try:
        model, matrix = fit_transform(documents)
        tokens = model.vocabulary.tokens()
        rows = []
        for r in range(matrix.shape[0]):
            start, end = matrix.indptr[r], matrix.indptr[r + 1]
            rows.append(
                {tokens[c]: v for c, v in zip(matrix.indices[start:end], matrix.data[start:end])}
            )
        return json.dumps(
            {
                "vocabulary": model.vocabulary.index,
                "idf": dict(zip(tokens, model.idf.tolist())),
                "rows": rows,
            },
            indent=2,
            ensure_ascii=False,
        )
    except TokbenchError as e:
        logger.error(f"tfidf_vectorize failed: {e}")
        return json.dumps({"error": str(e)})
