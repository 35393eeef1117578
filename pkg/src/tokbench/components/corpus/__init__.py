"""
Corpus Component

Reads and writes the three-column review CSV format and draws reproducible samples.
"""

from .dataset import (
    Dataset,
    DatasetStats,
    ReviewRecord,
    Sentiment,
    dataset_stats,
    parse_review_csv,
    random_sample,
    read_review_csv,
    shuffled_prefix,
    write_review_csv,
)
from .synthetic import generate_mini_corpus

__all__ = [
    "Dataset",
    "DatasetStats",
    "ReviewRecord",
    "Sentiment",
    "dataset_stats",
    "generate_mini_corpus",
    "parse_review_csv",
    "random_sample",
    "read_review_csv",
    "shuffled_prefix",
    "write_review_csv",
]
