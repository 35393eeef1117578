"""
Lattice Component

Dictionary-driven word segmentation: common-prefix trie lookup, lattice construction and
minimum-cost Viterbi decoding.
"""

from .dictionary import (
    DEMO_DICTIONARY_PATH,
    DictionaryEntry,
    LexDictionary,
    load_dictionary,
    parse_dictionary,
)
from .segmenter import (
    Lattice,
    LatticeTokenizer,
    Node,
    Segmentation,
    Token,
    TokenSource,
    build_lattice,
    segment_min_cost,
    tokenize,
)

__all__ = [
    "DEMO_DICTIONARY_PATH",
    "DictionaryEntry",
    "Lattice",
    "LatticeTokenizer",
    "LexDictionary",
    "Node",
    "Segmentation",
    "Token",
    "TokenSource",
    "build_lattice",
    "load_dictionary",
    "parse_dictionary",
    "segment_min_cost",
    "tokenize",
]
