"""
Vectorize Component

Smoothed-idf TF-IDF vectors over tokenizer output, with a timed fit for benchmarking.
"""

from .tfidf import (
    TfidfModel,
    TimedVectorization,
    Vocabulary,
    fit,
    fit_transform,
    fit_transform_timed,
    format_matrix,
    load_tfidf_model,
    parse_tfidf,
    save_tfidf_model,
    smooth_idf,
    tokenize_all,
    transform,
)

__all__ = [
    "TfidfModel",
    "TimedVectorization",
    "Vocabulary",
    "fit",
    "fit_transform",
    "fit_transform_timed",
    "format_matrix",
    "load_tfidf_model",
    "parse_tfidf",
    "save_tfidf_model",
    "smooth_idf",
    "tokenize_all",
    "transform",
]
