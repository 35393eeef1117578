"""
Tokenizer comparison and vectorization size sweeps.
"""

import gc
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
import psutil

from tokbench.components.corpus import Dataset, shuffled_prefix
from tokbench.components.vectorize import fit_transform_timed
from tokbench.utils import ValidationError, format_seconds, logger

from .report import display_name, render_csv, render_table

BENCH_COLUMNS = ("Tokenizer", "Size", "Vectorize-s", "RSS-delta-MB", "Features")


@dataclass(frozen=True)
class BenchRow:
    tokenizer: str
    size: int
    elapsed_seconds: float
    rss_delta_bytes: int
    n_features: int

    def row(self) -> List[str]:
        return [
            display_name(self.tokenizer),
            str(self.size),
            format_seconds(self.elapsed_seconds),
            f"{self.rss_delta_bytes / (1024 * 1024):.1f}",
            str(self.n_features),
        ]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def parse_sizes(raw: str) -> List[int]:
    """Parse ``"1000,10000"`` into positive ints."""
    try:
        sizes = [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"Sizes must be integers: {raw!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise ValidationError("Need at least one positive size")
    return sizes


def bench(
    dataset: Dataset, tokenizers: Mapping[str, Any], sizes: Sequence[int], seed: int = 42
) -> List[BenchRow]:
    """
    Time tokenize + fit + transform for each (tokenizer, size).

    Each size takes the first ``size`` records of one seeded shuffle, so smaller sets are subsets
    of larger ones. Sizes above the dataset length are clamped.
    """
    if len(dataset) == 0:
        raise ValidationError("Cannot benchmark on an empty dataset")
    process = psutil.Process()
    rows = []
    for name, tokenizer in tokenizers.items():
        for size in sizes:
            subset = shuffled_prefix(dataset, size, seed)
            gc.collect()
            before = process.memory_info().rss
            timed = fit_transform_timed(tokenizer, subset.bodies)
            delta = max(0, process.memory_info().rss - before)
            rows.append(
                BenchRow(name, len(subset), timed.elapsed_seconds, delta, timed.model.n_features)
            )
            logger.info(f"bench {name} size={len(subset)}: {timed.elapsed_seconds:.2f}s")
    return rows


def emit_bench(rows: Sequence[BenchRow], fmt: str = "text") -> bytes:
    if not rows:
        raise ValidationError("No benchmark rows to emit")
    table = [r.row() for r in rows]
    if fmt == "csv":
        return render_csv(BENCH_COLUMNS, table).encode("utf-8")
    if fmt == "text":
        return render_table(BENCH_COLUMNS, table).encode("utf-8")
    raise ValidationError(f"Unknown format: {fmt}")


def compare_tokenizers(
    dataset: Dataset, tokenizers: Mapping[str, Any], n: int = 5, seed: int = 42
) -> List[Dict[str, Any]]:
    """
    Token lists of ``n`` seeded-random reviews under every tokenizer.

    Returns:
        One ``{"index", "body", "tokens": {name: [...]}}`` entry per chosen review, in file order
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    count = min(n, len(dataset))
    chosen = np.sort(rng.choice(len(dataset), size=count, replace=False))
    preview = []
    for index in chosen.tolist():
        body = dataset.records[index].body
        preview.append(
            {
                "index": index,
                "body": body,
                "tokens": {name: tok.tokenize(body) for name, tok in tokenizers.items()},
            }
        )
    return preview


def format_comparison(preview: Sequence[Dict[str, Any]]) -> str:
    lines = []
    for item in preview:
        lines.append(f"[{item['index']}] {item['body']}")
        for name, tokens in item["tokens"].items():
            lines.append(f"  {display_name(name)}: {' | '.join(tokens)}")
    return "\n".join(lines) + "\n"
