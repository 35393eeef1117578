"""
TF-IDF vectorization over tokenized documents.

Weights use raw term counts, the smoothed idf ``ln((1 + N) / (1 + df)) + 1`` and L2 row
normalization. Columns are assigned in ascending lexicographic token order.

Model file layout:

    #tfidf v1 n_docs=2
    a	0	1	1.4054651081081644
    b	1	2	1
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Protocol, Sequence

import numpy as np
from scipy import sparse

from tokbench.utils import (
    ModelFormatError,
    Stopwatch,
    ValidationError,
    decode_utf8,
    escape_field,
    format_float,
    logger,
    safe_read_bytes,
    safe_write_text,
    unescape_field,
)

MODEL_HEADER = "#tfidf v1"


class Tokenizer(Protocol):
    name: str

    def tokenize(self, text: str) -> List[str]: ...


@dataclass(frozen=True)
class Vocabulary:
    index: Dict[str, int]
    df: Dict[str, int]

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, token: object) -> bool:
        return token in self.index

    def tokens(self) -> List[str]:
        return sorted(self.index, key=self.index.__getitem__)

    @classmethod
    def from_df(cls, df: Dict[str, int]) -> "Vocabulary":
        ordered = sorted(df)
        return cls({token: i for i, token in enumerate(ordered)}, {t: df[t] for t in ordered})


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: Vocabulary
    idf: np.ndarray
    n_docs: int
    config: Dict[str, Any] = field(
        default_factory=lambda: {"smooth_idf": True, "sublinear_tf": False, "norm": "l2"}
    )

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)

    def idf_of(self, token: str) -> float:
        return float(self.idf[self.vocabulary.index[token]])


def smooth_idf(df: np.ndarray, n_docs: int) -> np.ndarray:
    """ln((1 + N) / (1 + df)) + 1, elementwise."""
    return np.log((1.0 + n_docs) / (1.0 + df.astype(np.float64))) + 1.0


def fit(docs: Sequence[Sequence[str]]) -> TfidfModel:
    """
    Learn the vocabulary and idf weights from tokenized documents.

    Raises:
        ValidationError: If ``docs`` is empty
    """
    if len(docs) == 0:
        raise ValidationError("Cannot fit TF-IDF on zero documents")

    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc))

    vocabulary = Vocabulary.from_df(dict(df))
    counts = np.fromiter((vocabulary.df[t] for t in vocabulary.tokens()), np.int64, len(vocabulary))
    model = TfidfModel(vocabulary, smooth_idf(counts, len(docs)), len(docs))
    logger.debug(f"Fitted TF-IDF: {len(docs)} documents, {model.n_features} features")
    return model


def transform(model: TfidfModel, docs: Iterable[Sequence[str]]) -> sparse.csr_matrix:
    """
    Vectorize documents into an L2-normalized CSR matrix of shape (len(docs), V).

    Tokens outside the vocabulary are ignored; a document with none left stays an all-zero row.
    """
    index = model.vocabulary.index
    indptr = [0]
    indices: List[int] = []
    data: List[float] = []

    for doc in docs:
        counts = Counter(index[t] for t in doc if t in index)
        columns = sorted(counts)
        values = np.array([counts[c] for c in columns], dtype=np.float64) * model.idf[columns]
        norm = math.sqrt(math.fsum(values * values))
        if norm > 0.0:
            values /= norm
        indices.extend(columns)
        data.extend(values.tolist())
        indptr.append(len(indices))

    matrix = sparse.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int32), np.array(indptr)),
        shape=(len(indptr) - 1, model.n_features),
    )
    matrix.eliminate_zeros()
    matrix.has_sorted_indices = True
    return matrix


def fit_transform(docs: Sequence[Sequence[str]]) -> tuple[TfidfModel, sparse.csr_matrix]:
    model = fit(docs)
    return model, transform(model, docs)


class TimedVectorization(NamedTuple):
    model: TfidfModel
    matrix: sparse.csr_matrix
    elapsed_seconds: float


def tokenize_all(tokenizer: Tokenizer, texts: Iterable[str]) -> List[List[str]]:
    return [tokenizer.tokenize(text) for text in texts]


def fit_transform_timed(
    tokenizer: Tokenizer, texts: Sequence[str], stopwatch: Optional[Stopwatch] = None
) -> TimedVectorization:
    """
    Tokenize, fit and transform the training texts, timing all three on a monotonic clock.

    Args:
        tokenizer: Object with ``tokenize(text) -> list[str]``
        texts: Training documents (review bodies)
        stopwatch: Optional stopwatch to accumulate into

    Raises:
        ValidationError: If ``texts`` is empty
    """
    if len(texts) == 0:
        raise ValidationError("Cannot vectorize an empty dataset")
    stopwatch = stopwatch or Stopwatch()
    with stopwatch.measure():
        docs = tokenize_all(tokenizer, texts)
        model, matrix = fit_transform(docs)
    logger.info(
        f"Vectorized {len(texts)} documents with {tokenizer.name}: "
        f"{model.n_features} features in {stopwatch.elapsed:.2f}s"
    )
    return TimedVectorization(model, matrix, stopwatch.elapsed)


def format_tfidf(model: TfidfModel) -> str:
    lines = [f"{MODEL_HEADER} n_docs={model.n_docs}"]
    vocabulary = model.vocabulary
    for token in vocabulary.tokens():
        column = vocabulary.index[token]
        lines.append(
            f"{escape_field(token)}\t{column}\t{vocabulary.df[token]}\t"
            f"{format_float(float(model.idf[column]))}"
        )
    return "\n".join(lines) + "\n"


def parse_tfidf(data: bytes) -> TfidfModel:
    """
    Parse a serialized TF-IDF model.

    Raises:
        ModelFormatError: If the header or a row is malformed
    """
    lines = decode_utf8(data).split("\n")
    header = lines[0].split(" ") if lines else []
    if len(header) != 3 or " ".join(header[:2]) != MODEL_HEADER or not header[2].startswith(
        "n_docs="
    ):
        raise ModelFormatError(f"Missing '{MODEL_HEADER} n_docs=<N>' header")
    try:
        n_docs = int(header[2][len("n_docs=") :])
    except ValueError:
        raise ModelFormatError("n_docs is not an integer") from None

    index: Dict[str, int] = {}
    df: Dict[str, int] = {}
    idf: List[float] = []
    for line_number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ModelFormatError(f"Line {line_number}: expected 4 tab-separated fields")
        token = unescape_field(fields[0])
        try:
            column, count, weight = int(fields[1]), int(fields[2]), float(fields[3])
        except ValueError:
            raise ModelFormatError(f"Line {line_number}: bad numeric field") from None
        if column != len(idf):
            raise ModelFormatError(f"Line {line_number}: column {column} out of order")
        index[token] = column
        df[token] = count
        idf.append(weight)

    return TfidfModel(Vocabulary(index, df), np.array(idf, dtype=np.float64), n_docs)


def save_tfidf_model(model: TfidfModel, path: str | Path) -> Path:
    return safe_write_text(path, format_tfidf(model))


def load_tfidf_model(path: str | Path) -> TfidfModel:
    model = parse_tfidf(safe_read_bytes(path))
    logger.info(f"Loaded TF-IDF model {path}: {model.n_features} features")
    return model


def format_matrix(matrix: sparse.csr_matrix) -> str:
    """Debug export: one line per row of space-separated ``col:value`` pairs."""
    lines = []
    for row in range(matrix.shape[0]):
        start, end = matrix.indptr[row], matrix.indptr[row + 1]
        pairs = zip(matrix.indices[start:end].tolist(), matrix.data[start:end].tolist())
        lines.append(" ".join(f"{col}:{value:.9f}" for col, value in pairs))
    return "\n".join(lines) + "\n"
