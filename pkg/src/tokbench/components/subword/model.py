"""
Unigram language-model subword vocabulary: normalization, Viterbi encoding, decoding and the
TSV model format.

Model file layout:

    #unigram v1 meta=▁ vocab_size=2000 max_piece_len=8 ...
    ▁	-3.1415926535897931
    です	-4.0000000000000000

Rows are sorted by descending log-probability, ties by piece string.
"""

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple

from tokbench.components.registry import register_tokenizer
from tokbench.utils import (
    ConfigError,
    ModelFormatError,
    UnencodableCharacterError,
    decode_utf8,
    format_float,
    logger,
    safe_read_bytes,
    safe_write_text,
)

META_SYMBOL = "▁"
MODEL_HEADER = "#unigram v1"
# Score offset below the rarest piece for characters outside the vocabulary
UNKNOWN_PENALTY = 10.0

_WHITESPACE = re.compile(r"\s+")


def normalize(text: str, meta_symbol: str = META_SYMBOL) -> str:
    """Replace each whitespace run by ``meta_symbol`` and prefix one if ``text`` is non-empty."""
    if not text:
        return ""
    return meta_symbol + _WHITESPACE.sub(meta_symbol, text)


def decode(pieces: List[str], meta_symbol: str = META_SYMBOL) -> str:
    """Concatenate pieces, turn meta symbols back into spaces and drop one leading space."""
    text = "".join(pieces).replace(meta_symbol, " ")
    return text[1:] if text.startswith(" ") else text


@dataclass(frozen=True)
class SubwordVocab:
    pieces: Dict[str, float]
    meta_symbol: str = META_SYMBOL
    vocab_size: int = 0
    trainer_settings: Dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        longest = max((len(p) for p in self.pieces), default=0)
        object.__setattr__(self, "max_piece_len", longest)

    max_piece_len: int = field(init=False, default=0, compare=False)

    def __len__(self) -> int:
        return len(self.pieces)

    def __contains__(self, piece: object) -> bool:
        return piece in self.pieces

    def log_prob(self, piece: str) -> float:
        return self.pieces[piece]

    def total_probability(self) -> float:
        return math.fsum(math.exp(lp) for lp in self.pieces.values())

    def replace_pieces(self, pieces: Dict[str, float]) -> "SubwordVocab":
        return SubwordVocab(pieces, self.meta_symbol, self.vocab_size, self.trainer_settings)

    def sorted_items(self) -> List[Tuple[str, float]]:
        return sorted(self.pieces.items(), key=lambda item: (-item[1], item[0]))


class Encoding(NamedTuple):
    pieces: List[str]
    score: float


def _span_lengths(back: List[int], position: int) -> List[int]:
    lengths = []
    while position > 0:
        prev = back[position]
        lengths.append(position - prev)
        position = prev
    lengths.reverse()
    return lengths


def viterbi_segment(
    text: str,
    vocab: SubwordVocab,
    allow_unknown: bool = False,
    exclude: Optional[str] = None,
) -> Encoding:
    """
    Maximum log-probability segmentation of an already-normalized string.

    Ties are broken by fewer pieces, then by the longest-first span sequence.

    Args:
        text: Normalized text
        vocab: Piece log-probabilities
        allow_unknown: Score characters outside the vocabulary as single pieces instead of raising
        exclude: A piece that may not cover the whole of ``text`` (used when pruning)

    Raises:
        UnencodableCharacterError: If a character has no piece and ``allow_unknown`` is False
    """
    n = len(text)
    if n == 0:
        return Encoding([], 0.0)

    pieces = vocab.pieces
    max_len = vocab.max_piece_len
    unknown_score = (min(pieces.values(), default=0.0)) - UNKNOWN_PENALTY
    score = [-math.inf] * (n + 1)
    count = [0] * (n + 1)
    back = [-1] * (n + 1)
    score[0] = 0.0

    for i in range(n):
        if score[i] == -math.inf:
            continue
        for j in range(i + 1, min(n, i + max_len) + 1):
            piece = text[i:j]
            lp = pieces.get(piece)
            if lp is None or (exclude is not None and i == 0 and j == n and piece == exclude):
                continue
            _relax(score, count, back, i, j, score[i] + lp)
        if text[i] not in pieces:
            if not allow_unknown:
                raise UnencodableCharacterError(text[i], i)
            _relax(score, count, back, i, i + 1, score[i] + unknown_score)

    if score[n] == -math.inf:
        # only reachable when ``exclude`` removes the sole covering piece
        return Encoding([], -math.inf)

    result = []
    position = n
    while position > 0:
        prev = back[position]
        result.append(text[prev:position])
        position = prev
    result.reverse()
    return Encoding(result, score[n])


def _relax(
    score: List[float], count: List[int], back: List[int], i: int, j: int, candidate: float
) -> None:
    if candidate > score[j]:
        better = True
    elif candidate < score[j]:
        better = False
    elif count[i] + 1 != count[j]:
        better = count[i] + 1 < count[j]
    else:
        # same score, same piece count: compare span lengths left to right, longer first
        better = False
        new = _span_lengths(back, i) + [j - i]
        old = _span_lengths(back, j)
        for a, b in zip(new, old):
            if a != b:
                better = a > b
                break
    if better:
        score[j] = candidate
        count[j] = count[i] + 1
        back[j] = i


def encode(
    text: str, vocab: SubwordVocab, normalized: bool = False, allow_unknown: bool = False
) -> List[str]:
    """
    Encode raw text into the Viterbi-best piece sequence.

    Args:
        text: Input text
        vocab: Trained vocabulary
        normalized: Skip whitespace normalization (text is already normalized)
        allow_unknown: Emit out-of-vocabulary characters as single pieces

    Raises:
        UnencodableCharacterError: On a character missing from the vocabulary
    """
    source = text if normalized else normalize(text, vocab.meta_symbol)
    return viterbi_segment(source, vocab, allow_unknown=allow_unknown).pieces


def format_vocab(vocab: SubwordVocab) -> str:
    header = [MODEL_HEADER, f"meta={vocab.meta_symbol}", f"vocab_size={vocab.vocab_size}"]
    header.extend(f"{key}={value}" for key, value in vocab.trainer_settings.items())
    lines = [" ".join(header)]
    lines.extend(f"{piece}\t{format_float(lp)}" for piece, lp in vocab.sorted_items())
    return "\n".join(lines) + "\n"


def parse_vocab(data: bytes) -> SubwordVocab:
    """
    Parse a serialized unigram model.

    Raises:
        ModelFormatError: If the header or a row is malformed
    """
    lines = decode_utf8(data).split("\n")
    if not lines or not lines[0].startswith(MODEL_HEADER):
        raise ModelFormatError(f"Missing '{MODEL_HEADER}' header")

    settings: Dict[str, str] = {}
    for token in lines[0][len(MODEL_HEADER) :].split(" "):
        if not token:
            continue
        key, sep, value = token.partition("=")
        if not sep:
            raise ModelFormatError(f"Malformed header field: {token!r}")
        settings[key] = value

    meta = settings.pop("meta", META_SYMBOL)
    try:
        vocab_size = int(settings.pop("vocab_size", "0"))
    except ValueError:
        raise ModelFormatError("vocab_size is not an integer") from None

    pieces: Dict[str, float] = {}
    for line_number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        piece, sep, raw = line.rpartition("\t")
        if not sep or not piece:
            raise ModelFormatError(f"Line {line_number}: expected 'piece<TAB>log_prob'")
        try:
            pieces[piece] = float(raw)
        except ValueError:
            raise ModelFormatError(f"Line {line_number}: bad log_prob {raw!r}") from None

    return SubwordVocab(pieces, meta, vocab_size, settings)


def save_subword_model(vocab: SubwordVocab, path: str | Path) -> Path:
    return safe_write_text(path, format_vocab(vocab))


def load_subword_model(path: str | Path) -> SubwordVocab:
    vocab = parse_vocab(safe_read_bytes(path))
    logger.info(f"Loaded subword model {path}: {len(vocab)} pieces")
    return vocab


class SubwordTokenizer:
    """Unigram LM tokenizer; unseen characters become single pieces."""

    name = "subword"

    def __init__(self, vocab: SubwordVocab):
        self.vocab = vocab

    def tokenize(self, text: str) -> List[str]:
        return encode(text, self.vocab, allow_unknown=True)

    def save(self, path: str | Path) -> Path:
        return save_subword_model(self.vocab, path)


@register_tokenizer("subword")
def build_subword_tokenizer(
    model_path: Optional[str] = None, train_texts: Optional[List[str]] = None, **options: object
) -> SubwordTokenizer:
    """
    Subword tokenizer from a model file, or trained on ``train_texts`` when no file is given.
    """
    if model_path is not None:
        return SubwordTokenizer(load_subword_model(model_path))
    if not train_texts:
        raise ConfigError("subword tokenizer needs a model file or training texts")

    from .trainer import TrainerConfig, train

    config = TrainerConfig.from_options(options)
    return SubwordTokenizer(train(train_texts, config))
