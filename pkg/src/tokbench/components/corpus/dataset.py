"""
Review corpus: CSV ingestion, re-emission, sampling and summary statistics.

The CSV format has no header and three RFC-4180 fields per row: a raw label (1 = negative,
2 = positive), a review title and the review body. Bodies are kept exactly as written, including
literal two-character ``\\n`` sequences.
"""

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Tuple

import numpy as np

from tokbench.utils import (
    InvalidLabelError,
    MalformedRowError,
    decode_utf8,
    logger,
    safe_read_bytes,
    validate_fraction,
)


class Sentiment(Enum):
    NEGATIVE = 0
    POSITIVE = 1

    @classmethod
    def from_raw(cls, raw: str, row_number: int) -> "Sentiment":
        if raw == "1":
            return cls.NEGATIVE
        if raw == "2":
            return cls.POSITIVE
        raise InvalidLabelError(row_number, raw)

    @property
    def raw(self) -> str:
        return "2" if self is Sentiment.POSITIVE else "1"

    @property
    def sign(self) -> int:
        return 1 if self is Sentiment.POSITIVE else -1


@dataclass(frozen=True)
class ReviewRecord:
    label: Sentiment
    title: str
    body: str


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of review records."""

    records: Tuple[ReviewRecord, ...] = ()
    class_counts: Dict[Sentiment, int] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        counts = Counter(r.label for r in self.records)
        object.__setattr__(self, "class_counts", {s: counts.get(s, 0) for s in Sentiment})

    def __len__(self) -> int:
        return len(self.records)

    @property
    def bodies(self) -> list[str]:
        return [r.body for r in self.records]

    @property
    def labels(self) -> list[Sentiment]:
        return [r.label for r in self.records]

    @classmethod
    def from_records(cls, records: Iterable[ReviewRecord]) -> "Dataset":
        return cls(tuple(records))


@dataclass(frozen=True)
class DatasetStats:
    record_count: int
    class_counts: Dict[str, int]
    mean_body_length: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "record_count": self.record_count,
            "class_counts": dict(self.class_counts),
            "mean_body_length": self.mean_body_length,
        }


def parse_review_csv(data: bytes) -> Dataset:
    """
    Parse review CSV bytes into a Dataset.

    Args:
        data: UTF-8 CSV content without a header row

    Returns:
        Dataset in file order

    Raises:
        CorpusEncodingError: If the bytes are not valid UTF-8
        MalformedRowError: If a row is not valid RFC-4180 or does not have exactly three fields
        InvalidLabelError: If a label is not 1 or 2
    """
    text = decode_utf8(data)
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    records = []
    row_number = 0
    try:
        for row_number, row in enumerate(reader, start=1):
            if len(row) != 3:
                raise MalformedRowError(row_number, len(row))
            raw_label, title, body = row
            records.append(ReviewRecord(Sentiment.from_raw(raw_label, row_number), title, body))
    except csv.Error as e:
        raise MalformedRowError(row_number + 1, reason=str(e)) from e
    logger.debug(f"Parsed {len(records)} review rows")
    return Dataset(tuple(records))


def read_review_csv(path: str | Path) -> Dataset:
    """Read and parse a review CSV file."""
    dataset = parse_review_csv(safe_read_bytes(path))
    logger.info(f"Loaded {len(dataset)} reviews from {path}")
    return dataset


def write_review_csv(dataset: Dataset) -> bytes:
    """Serialize a Dataset back to the review CSV format (all fields quoted)."""
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, quoting=csv.QUOTE_ALL, lineterminator="\n")
    for record in dataset.records:
        writer.writerow([record.label.raw, record.title, record.body])
    return buffer.getvalue().encode("utf-8")


def sample_size(fraction: float, total: int) -> int:
    """floor(fraction * total) computed on the decimal value of ``fraction``."""
    return int(Decimal(repr(fraction)) * total)


def random_sample(data: Dataset, fraction: float, seed: int) -> Dataset:
    """
    Draw floor(fraction * N) records uniformly without replacement.

    Uses numpy's PCG64 generator seeded with ``seed``; retained records keep their file order.

    Raises:
        ValidationError: If fraction is not in (0, 1]
    """
    validate_fraction(fraction)
    n = len(data)
    k = sample_size(fraction, n)
    if k == n:
        return data
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = np.sort(rng.choice(n, size=k, replace=False))
    logger.info(f"Sampled {k} of {n} records (fraction={fraction}, seed={seed})")
    return Dataset(tuple(data.records[i] for i in chosen))


def shuffled_prefix(data: Dataset, size: int, seed: int) -> Dataset:
    """First ``size`` records of a seeded permutation, used by the size sweep."""
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(len(data))[: min(size, len(data))]
    return Dataset(tuple(data.records[i] for i in np.sort(order)))


def dataset_stats(data: Dataset) -> DatasetStats:
    """Record count, per-class counts, and mean body length in characters."""
    n = len(data)
    mean_length = sum(len(r.body) for r in data.records) / n if n else 0.0
    return DatasetStats(
        record_count=n,
        class_counts={s.name.lower(): c for s, c in data.class_counts.items()},
        mean_body_length=mean_length,
    )
