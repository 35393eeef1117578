"""
Lattice segmentation tool handlers.
"""

import json
from typing import Optional

from tokbench.components.registry import tool_handler
from tokbench.utils import TokbenchError, logger

from .dictionary import load_dictionary
from .segmenter import segment_min_cost


@tool_handler
def segment_text(text: str, dictionary_path: Optional[str] = None) -> str:
    """
    Minimum-cost dictionary segmentation of a text.

    Args:
        text: Unsegmented input
        dictionary_path: Dictionary TSV (defaults to the bundled demo dictionary)

    Returns:
        JSON string with tokens (surface, span, source) and the total cost
    """
    try:
        segmentation = segment_min_cost(text, load_dictionary(dictionary_path))
        tokens = [
            {"surface": t.surface, "span": list(t.span), "source": t.source.value}
            for t in segmentation.tokens
        ]
        return json.dumps(
            {"tokens": tokens, "total_cost": segmentation.total_cost},
            indent=2,
            ensure_ascii=False,
        )
    except TokbenchError as e:
        logger.error(f"segment_text failed: {e}")
        return json.dumps({"error": str(e)})


@tool_handler
def dictionary_lookup(text: str, start: int = 0, dictionary_path: Optional[str] = None) -> str:
    """
    All dictionary entries that begin at ``start`` in ``text``.

    Returns:
        JSON string listing matching surfaces and costs, shortest first
    """
    try:
        dictionary = load_dictionary(dictionary_path)
        matches = [
            {"surface": e.surface, "cost": e.cost}
            for e in dictionary.common_prefix_search(text, start)
        ]
        return json.dumps({"matches": matches}, ensure_ascii=False)
    except TokbenchError as e:
        logger.error(f"dictionary_lookup failed: {e}")
        return json.dumps({"error": str(e)})
