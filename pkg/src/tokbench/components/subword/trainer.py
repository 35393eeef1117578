"""
EM trainer for the unigram LM subword vocabulary.

Training: normalize -> seed substrings -> repeat (EM sub-iterations, prune) until the vocabulary
fits ``vocab_size``; the EM sub-iterations after the last prune are the final round.
"""

import math
from collections import Counter
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from tokbench.components.registry import component_defaults
from tokbench.utils import TrainingError, UnencodableCharacterError, ValidationError, logger

from .model import META_SYMBOL, SubwordVocab, normalize, viterbi_segment

# Floor for the expected count of a single character; keeps every log-prob finite
MIN_CHAR_COUNT = 1e-12


@dataclass(frozen=True)
class TrainerConfig:
    vocab_size: int = 2000
    max_piece_len: int = 8
    seed_size: Optional[int] = None
    shrink_factor: float = 0.75
    em_iters_per_round: int = 2
    max_sentence_len: int = 4096
    min_piece_freq: int = 2
    meta_symbol: str = META_SYMBOL

    def __post_init__(self) -> None:
        if not 0.0 < self.shrink_factor < 1.0:
            raise ValidationError(f"shrink_factor must be in (0, 1), got {self.shrink_factor}")
        if self.vocab_size < 1 or self.max_piece_len < 1 or self.em_iters_per_round < 1:
            raise ValidationError("vocab_size, max_piece_len and em_iters_per_round must be >= 1")
        if self.max_sentence_len < 1:
            raise ValidationError("max_sentence_len must be >= 1")

    @property
    def effective_seed_size(self) -> int:
        return self.seed_size if self.seed_size is not None else 20 * self.vocab_size

    def settings(self) -> Dict[str, str]:
        """Hyperparameters recorded in the serialized model header."""
        return {
            "max_piece_len": str(self.max_piece_len),
            "seed_size": str(self.effective_seed_size),
            "shrink_factor": repr(self.shrink_factor),
            "em_iters_per_round": str(self.em_iters_per_round),
            "max_sentence_len": str(self.max_sentence_len),
            "min_piece_freq": str(self.min_piece_freq),
        }

    @classmethod
    def from_options(cls, options: Mapping[str, Any]) -> "TrainerConfig":
        """Component defaults from config.yaml, overridden by non-None ``options``."""
        merged: Dict[str, Any] = dict(component_defaults("subword"))
        merged.update({k: v for k, v in options.items() if v is not None})
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in merged.items() if k in names})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

def _normalize_log_probs(log_weights: Mapping[str, float]) -> Dict[str, float]:
    # -inf weights are dropped; the rest are shifted so their probabilities sum to one
    finite = {p: lw for p, lw in log_weights.items() if lw > -math.inf}
    log_total = float(logsumexp(list(finite.values())))
    return {piece: lw - log_total for piece, lw in finite.items()}


def _normalize_counts(counts: Mapping[str, float]) -> Dict[str, float]:
    return _normalize_log_probs({p: math.log(c) for p, c in counts.items() if c > 0.0})


def _check_encodable(sentence: str, vocab: SubwordVocab) -> None:
    for offset, char in enumerate(sentence):
        if char not in vocab.pieces:
            raise UnencodableCharacterError(char, offset)


def prepare_corpus(texts: List[str], config: TrainerConfig) -> List[str]:
    """Normalize texts, drop empties, and split sentences longer than ``max_sentence_len``."""
    corpus = []
    limit = config.max_sentence_len
    for text in texts:
        sentence = normalize(text, config.meta_symbol)
        for start in range(0, len(sentence), limit):
            corpus.append(sentence[start : start + limit])
    return corpus


def seed_vocab(corpus: List[str], config: TrainerConfig) -> SubwordVocab:
    """
    Initial candidate pieces with log-probabilities proportional to raw frequency.

    Candidates are every single character plus substrings of length 2..max_piece_len seen at
    least ``min_piece_freq`` times. Multi-character candidates are ranked by frequency x length
    and the best are kept up to ``seed_size`` pieces in total. A meta symbol may only open a piece.

    Raises:
        TrainingError: If the corpus is empty
    """
    if not corpus or not any(corpus):
        raise TrainingError("Cannot seed a vocabulary from an empty corpus")

    meta = config.meta_symbol
    counts: Counter[str] = Counter()
    for sentence in corpus:
        n = len(sentence)
        for i in range(n):
            for j in range(i + 1, min(n, i + config.max_piece_len) + 1):
                if j - i > 1 and sentence[j - 1] == meta:
                    break
                counts[sentence[i:j]] += 1

    singles = {p: c for p, c in counts.items() if len(p) == 1}
    multi = [(p, c) for p, c in counts.items() if len(p) > 1 and c >= config.min_piece_freq]
    multi.sort(key=lambda item: (-item[1] * len(item[0]), item[0]))
    room = max(0, config.effective_seed_size - len(singles))

    chosen: Dict[str, float] = dict(sorted(singles.items()))
    chosen.update(multi[:room])
    logger.info(
        f"Seeded {len(chosen)} pieces ({len(singles)} characters) from {len(corpus)} sentences"
    )
    return SubwordVocab(_normalize_counts(chosen), meta, config.vocab_size, config.settings())


@dataclass(frozen=True)
class _Bucket:
    lengths: np.ndarray
    # ids[b, j, k]: id of the piece of length k + 1 ending at character j of sentence b, or -1
    ids: np.ndarray


class CorpusLattice:
    """
    Every occurrence of a candidate piece in a fixed corpus, as padded id arrays.

    Built once per training run and reused by every E-step: pruning only removes pieces, so a
    lattice over the seed pieces stays valid for every later vocabulary. Sentences are sorted by
    length and grouped into buckets of at most ``max_cells`` character positions, so that the
    forward-backward recursions run over whole buckets at a time.
    """

    def __init__(self, corpus: List[str], pieces: Iterable[str], max_cells: int = 200_000):
        self.pieces: List[str] = sorted(pieces)
        self.index: Dict[str, int] = {p: i for i, p in enumerate(self.pieces)}
        self.max_piece_len = max((len(p) for p in self.pieces), default=1)

        sentences = [s for s in corpus if s]
        order = sorted(range(len(sentences)), key=lambda i: len(sentences[i]))
        self.buckets: List[_Bucket] = []
        batch: List[str] = []
        for i in order:
            if batch and (len(batch) + 1) * len(sentences[i]) > max_cells:
                self.buckets.append(self._encode(batch))
                batch = []
            batch.append(sentences[i])
        if batch:
            self.buckets.append(self._encode(batch))
        logger.debug(
            f"Corpus lattice: {len(sentences)} sentences in {len(self.buckets)} buckets, "
            f"{len(self.pieces)} candidate pieces"
        )

    def _encode(self, sentences: List[str]) -> _Bucket:
        width = self.max_piece_len
        ids = np.full((len(sentences), len(sentences[-1]), width), -1, dtype=np.int64)
        index = self.index
        for b, sentence in enumerate(sentences):
            for j in range(len(sentence)):
                for k in range(min(width, j + 1)):
                    piece_id = index.get(sentence[j - k : j + 1])
                    if piece_id is not None:
                        ids[b, j, k] = piece_id
        return _Bucket(np.array([len(s) for s in sentences]), ids)

    def log_probs(self, vocab: SubwordVocab) -> np.ndarray:
        """Log-probabilities indexed by piece id, with a trailing -inf slot for id -1."""
        if not vocab.pieces.keys() <= self.index.keys():
            raise ValidationError("Vocabulary holds pieces that are not in the corpus lattice")
        pieces = vocab.pieces
        values = [pieces.get(p, -math.inf) for p in self.pieces]
        return np.array(values + [-math.inf])


def _bucket_posteriors(bucket: _Bucket, lp: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Add the bucket's expected piece counts to ``counts``; return per-sentence log Z."""
    ids, lengths = bucket.ids, bucket.lengths
    size, width = ids.shape[1], ids.shape[2]
    edge = lp[ids]
    rows = np.arange(ids.shape[0])

    alpha = np.full((ids.shape[0], size + 1), -np.inf)
    alpha[:, 0] = 0.0
    for j in range(size):
        k = np.arange(min(width, j + 1))
        alpha[:, j + 1] = logsumexp(alpha[:, j - k] + edge[:, j, k], axis=1)

    beta = np.full((ids.shape[0], size + 1), -np.inf)
    beta[lengths == size, size] = 0.0
    for i in range(size - 1, -1, -1):
        k = np.arange(min(width, size - i))
        total = logsumexp(edge[:, i + k, k] + beta[:, i + k + 1], axis=1)
        beta[:, i] = np.where(lengths == i, 0.0, total)

    log_z = alpha[rows, lengths]
    starts = np.arange(size)[:, None] - np.arange(width)[None, :]
    before = np.where(starts >= 0, alpha[:, np.clip(starts, 0, None)], -np.inf)
    posterior = np.exp(before + edge + beta[:, 1:, None] - log_z[:, None, None])
    present = ids >= 0
    counts += np.bincount(ids[present], weights=posterior[present], minlength=counts.shape[0])
    return log_z


def expected_counts(
    corpus: List[str], vocab: SubwordVocab, lattice: Optional[CorpusLattice] = None
) -> Tuple[Dict[str, float], float]:
    """
    E-step: expected piece counts by forward-backward, and the corpus log marginal likelihood.

    Args:
        corpus: Normalized sentences
        vocab: Current piece log-probabilities
        lattice: Occurrence index of ``corpus`` over a superset of ``vocab``'s pieces
            (built on the fly when omitted)

    Raises:
        UnencodableCharacterError: If a corpus character is not a piece
    """
    for sentence in corpus:
        _check_encodable(sentence, vocab)
    if lattice is None:
        lattice = CorpusLattice(corpus, vocab.pieces)

    lp = lattice.log_probs(vocab)
    totals = np.zeros(len(lattice.pieces))
    log_likelihood = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for bucket in lattice.buckets:
            log_likelihood += math.fsum(_bucket_posteriors(bucket, lp, totals).tolist())

    counts = {piece: float(totals[lattice.index[piece]]) for piece in vocab.pieces}
    return counts, log_likelihood


def _m_step(counts: Mapping[str, float], vocab: SubwordVocab) -> SubwordVocab:
    kept: Dict[str, float] = {}
    for piece, count in counts.items():
        if len(piece) == 1:
            kept[piece] = max(count, MIN_CHAR_COUNT)
        elif count > 0.0:
            kept[piece] = count
    return vocab.replace_pieces(_normalize_counts(kept))


def em_iteration(
    corpus: List[str], vocab: SubwordVocab, lattice: Optional[CorpusLattice] = None
) -> Tuple[SubwordVocab, float]:
    """
    One EM step over the (normalized) corpus.

    Returns:
        Tuple of (re-estimated vocabulary, log-likelihood under the input vocabulary)

    Raises:
        UnencodableCharacterError: If a corpus character is not a piece
    """
    counts, log_likelihood = expected_counts(corpus, vocab, lattice)
    return _m_step(counts, vocab), log_likelihood


def prune(
    vocab: SubwordVocab,
    corpus: List[str],
    shrink_factor: float = 0.75,
    min_size: int = 0,
    lattice: Optional[CorpusLattice] = None,
) -> SubwordVocab:
    """
    Remove the multi-character pieces whose removal costs the least likelihood.

    ``ceil((1 - shrink_factor) * |vocab|)`` pieces are removed, never taking the vocabulary below
    ``min_size`` and never removing a single character. A piece's loss is its expected count times
    the gap between its log-probability and the best segmentation of its string without it.
    Surviving log-probabilities are renormalized in log space.
    """
    if not 0.0 < shrink_factor < 1.0:
        raise ValidationError(f"shrink_factor must be in (0, 1), got {shrink_factor}")

    candidates = [p for p in vocab.pieces if len(p) > 1]
    n_remove = min(
        math.ceil((1.0 - shrink_factor) * len(vocab)),
        len(candidates),
        max(0, len(vocab) - min_size),
    )
    if n_remove <= 0:
        return vocab

    counts, _ = expected_counts(corpus, vocab, lattice)
    losses = []
    for piece in candidates:
        alternative = viterbi_segment(piece, vocab, exclude=piece).score
        loss = counts.get(piece, 0.0) * (vocab.pieces[piece] - alternative)
        losses.append((loss, piece))
    losses.sort()

    removed = {piece for _, piece in losses[:n_remove]}
    remaining = {p: lp for p, lp in vocab.pieces.items() if p not in removed}
    logger.debug(f"Pruned {len(removed)} pieces, {len(remaining)} remain")
    return vocab.replace_pieces(_normalize_log_probs(remaining))


def train(texts: List[str], config: Optional[TrainerConfig] = None) -> SubwordVocab:
    """
    Train a unigram LM vocabulary on raw texts.

    Raises:
        TrainingError: If the corpus is empty or ``vocab_size`` is below the alphabet size
    """
    config = config or TrainerConfig()
    corpus = prepare_corpus(texts, config)
    if not corpus:
        raise TrainingError("Cannot train on an empty corpus")

    alphabet = set().union(*(set(s) for s in corpus))
    if config.vocab_size < len(alphabet):
        raise TrainingError(
            f"vocab_size {config.vocab_size} is smaller than the corpus alphabet ({len(alphabet)})"
        )

    logger.info("=" * 60)
    logger.info(f"Training unigram model: vocab_size={config.vocab_size}, {len(corpus)} sentences")
    vocab = seed_vocab(corpus, config)
    lattice = CorpusLattice(corpus, vocab.pieces)
    round_number = 0
    while True:
        round_number += 1
        for _ in range(config.em_iters_per_round):
            vocab, log_likelihood = em_iteration(corpus, vocab, lattice)
        logger.info(
            f"Round {round_number}: {len(vocab)} pieces, log-likelihood {log_likelihood:.4f}"
        )
        if len(vocab) <= config.vocab_size:
            break
        vocab = prune(vocab, corpus, config.shrink_factor, config.vocab_size, lattice)

    logger.info(f"Training finished after {round_number} rounds: {len(vocab)} pieces")
    logger.info("=" * 60)
    return vocab
