"""
Seeded generator for the synthetic mini review corpus.

Reviews are assembled from product/context sentences and a sentiment lexicon in Japanese and
ASCII. A few percent of labels are flipped so the task is not trivially separable.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from tokbench.components.registry import component_defaults
from tokbench.utils import logger

from .dataset import Dataset, ReviewRecord, Sentiment

CONTEXT = (
    "自転車通勤用に購入。",
    "サックスを選びましたが、",
    "パソコン用に注文しました。",
    "妻へのプレゼントです。",
    "毎回利用しています。",
    "色はブラックにしました。",
    "サイズは普通です。",
    "届くまで三日かかりました。",
    "子供用に買いました。",
    "キッチンで使っています。",
    "bought it for work.",
    "ordered the black one.",
)

POSITIVE = (
    "とても良いです。",
    "最高です！",
    "満足しています。",
    "素晴らしい商品です。",
    "大変便利です。",
    "また購入します。",
    "かわいいです(*^。^*)",
    "おすすめです。",
    "早いし安い。",
    "気に入りました。",
    "great quality",
    "love it",
    "works perfectly",
)

NEGATIVE = (
    "最悪です。",
    "がっかりしました。",
    "二度と買いません。",
    "使いにくいです。",
    "すぐ壊れました。",
    "匂いがきつい。",
    "残念です。",
    "返品しました。",
    "不良品でした。",
    "期待外れでした。",
    "broke quickly",
    "waste of money",
    "poor quality",
)

TITLES = {
    Sentiment.POSITIVE: ("良い", "早いし安い", "満足", "最高", "good"),
    Sentiment.NEGATIVE: ("臭い", "残念", "不満", "最悪", "bad"),
}

LABEL_NOISE = 0.02


def _choice(rng: np.random.Generator, options: Sequence[str]) -> str:
    return options[int(rng.integers(len(options)))]


def _review(rng: np.random.Generator, label: Sentiment) -> Tuple[str, str]:
    own, other = (POSITIVE, NEGATIVE) if label is Sentiment.POSITIVE else (NEGATIVE, POSITIVE)
    parts = [_choice(rng, CONTEXT)]
    for _ in range(int(rng.integers(1, 3))):
        parts.append(_choice(rng, own))
    if rng.random() < 0.1:
        parts.insert(1, _choice(rng, other))
    if rng.random() < 0.3:
        # literal backslash-n, as in the scraped source data
        parts.insert(int(rng.integers(1, len(parts) + 1)), "\\n ")
    if rng.random() < 0.5:
        parts.append(_choice(rng, CONTEXT))
    return _choice(rng, TITLES[label]), "".join(parts)


def generate_reviews(n: int, rng: np.random.Generator) -> Dataset:
    records = []
    for _ in range(n):
        label = Sentiment.POSITIVE if rng.random() < 0.5 else Sentiment.NEGATIVE
        title, body = _review(rng, label)
        if rng.random() < LABEL_NOISE:
            label = Sentiment.NEGATIVE if label is Sentiment.POSITIVE else Sentiment.POSITIVE
        records.append(ReviewRecord(label, title, body))
    return Dataset(tuple(records))


def generate_mini_corpus(
    n_train: Optional[int] = None, n_test: Optional[int] = None, seed: Optional[int] = None
) -> Tuple[Dataset, Dataset]:
    """
    Generate the (train, test) mini corpus.

    Omitted arguments fall back to ``mini_train``, ``mini_test`` and ``mini_seed`` from the
    corpus config.yaml defaults.

    Args:
        n_train: Number of training reviews
        n_test: Number of test reviews
        seed: PCG64 seed; identical seeds give identical corpora

    Returns:
        Tuple of (train, test) datasets
    """
    defaults = component_defaults("corpus")
    n_train = defaults["mini_train"] if n_train is None else n_train
    n_test = defaults["mini_test"] if n_test is None else n_test
    seed = defaults["mini_seed"] if seed is None else seed
    logger.debug(f"Generating mini corpus: {n_train} train, {n_test} test, seed {seed}")
    rng = np.random.Generator(np.random.PCG64(seed))
    train = generate_reviews(n_train, rng)
    test = generate_reviews(n_test, rng)
    return train, test
