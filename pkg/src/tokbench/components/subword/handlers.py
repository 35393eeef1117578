"""
Subword tool handlers.

Provides tools for:
- Training a unigram model on a review CSV
- Encoding text into pieces
- Decoding pieces back to text
"""

import json
from typing import List, Optional

from tokbench.components.corpus import read_review_csv
from tokbench.components.registry import tool_handler
from tokbench.utils import TokbenchError, logger

from .model import META_SYMBOL, decode, encode, load_subword_model, save_subword_model
from .trainer import TrainerConfig, train


@tool_handler
def train_subword_model(
    input_path: str,
    output_path: str,
    vocab_size: int = 2000,
    max_piece_len: Optional[int] = None,
) -> str:
    """
    Train a unigram LM vocabulary on the review bodies of a CSV.

    Args:
        input_path: Review CSV
        output_path: Where to write the model TSV
        vocab_size: Target vocabulary size
        max_piece_len: Longest piece in characters (component default if omitted)

    Returns:
        JSON string with the final vocabulary size
    """
    try:
        config = TrainerConfig.from_options(
            {"vocab_size": vocab_size, "max_piece_len": max_piece_len}
        )
        vocab = train(read_review_csv(input_path).bodies, config)
        save_subword_model(vocab, output_path)
        return json.dumps({"pieces": len(vocab), "output_path": output_path})
    except TokbenchError as e:
        logger.error(f"train_subword_model failed: {e}")
        return json.dumps({"error": str(e)})


@tool_handler
def subword_encode(text: str, model_path: str) -> str:
    """
    Encode text into its most probable piece sequence.

    Args:
        text: Raw text
        model_path: Unigram model TSV

    Returns:
        JSON string with the pieces
    """
    try:
        vocab = load_subword_model(model_path)
        return json.dumps({"pieces": encode(text, vocab)}, ensure_ascii=False)
    except TokbenchError as e:
        logger.error(f"subword_encode failed: {e}")
        return json.dumps({"error": str(e)})


@tool_handler
def subword_decode(pieces: List[str], meta_symbol: str = META_SYMBOL) -> str:
    """
    Join pieces back into text, turning meta symbols into spaces.

    Returns:
        JSON string with the decoded text
    """
    return json.dumps({"text": decode(pieces, meta_symbol)}, ensure_ascii=False)
