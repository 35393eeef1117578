"""
Subword Component

Unigram language-model tokenizer: EM training over seeded substrings, likelihood-based pruning,
Viterbi encoding and lossless decoding through the whitespace meta symbol.
"""

from .model import (
    META_SYMBOL,
    SubwordTokenizer,
    SubwordVocab,
    decode,
    encode,
    format_vocab,
    load_subword_model,
    normalize,
    parse_vocab,
    save_subword_model,
    viterbi_segment,
)
from .trainer import (
    CorpusLattice,
    TrainerConfig,
    em_iteration,
    expected_counts,
    prepare_corpus,
    prune,
    seed_vocab,
    train,
)

__all__ = [
    "CorpusLattice",
    "META_SYMBOL",
    "SubwordTokenizer",
    "SubwordVocab",
    "TrainerConfig",
    "decode",
    "em_iteration",
    "encode",
    "expected_counts",
    "format_vocab",
    "load_subword_model",
    "normalize",
    "parse_vocab",
    "prepare_corpus",
    "prune",
    "save_subword_model",
    "seed_vocab",
    "train",
    "viterbi_segment",
]
