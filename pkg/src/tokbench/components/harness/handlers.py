"""
Experiment tool handlers.

Provides tools for:
- Running the full pipeline
- Previewing tokenizer output side by side
"""

import json
from typing import Any, Dict, Optional

from tokbench.components.corpus import read_review_csv
from tokbench.components.registry import get_tokenizer_factory, tool_handler
from tokbench.utils import TokbenchError, logger

from .bench import compare_tokenizers
from .pipeline import run_pipeline
from .settings import load_pipeline_config


@tool_handler
def run_experiment(
    config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> str:
    """
    Run sample -> tokenize -> vectorize -> fit -> evaluate (-> tune).

    Args:
        config_path: Optional key=value config file
        overrides: Config keys overriding the file, e.g. {"train": "...", "tokenizer": "lattice"}

    Returns:
        JSON string with the list of reports
    """
    try:
        config = load_pipeline_config(config_path, overrides)
        reports = run_pipeline(config)
        return json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False)
    except TokbenchError as e:
        logger.error(f"run_experiment failed: {e}")
        return json.dumps({"error": str(e)})


@tool_handler
def compare_tokenization(
    input_path: str,
    subword_model: str,
    dictionary_path: Optional[str] = None,
    n: int = 5,
    seed: int = 42,
) -> str:
    """
    Show how the lattice and subword tokenizers split ``n`` random reviews.

    Returns:
        JSON string with each chosen review and its token lists
    """
    try:
        tokenizers = {
            "lattice": get_tokenizer_factory("lattice")(model_path=dictionary_path),
            "subword": get_tokenizer_factory("subword")(model_path=subword_model),
        }
        preview = compare_tokenizers(read_review_csv(input_path), tokenizers, n, seed)
        return json.dumps(preview, indent=2, ensure_ascii=False)
    except TokbenchError as e:
        logger.error(f"compare_tokenization failed: {e}")
        return json.dumps({"error": str(e)})
