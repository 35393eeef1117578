"""
Corpus tool handlers.

Provides tools for:
- Review CSV statistics
- Seeded sampling of a review CSV
- Writing the synthetic mini corpus
"""

import json
from pathlib import Path
from typing import Optional

from tokbench.components.registry import component_defaults, tool_handler
from tokbench.utils import TokbenchError, logger

from .dataset import dataset_stats, random_sample, read_review_csv, write_review_csv
from .synthetic import generate_mini_corpus


@tool_handler
def corpus_stats(csv_path: str) -> str:
    """
    Summarize a review CSV.

    Args:
        csv_path: Path to a headerless label,title,body CSV

    Returns:
        JSON string with record_count, class_counts and mean_body_length
    """
    try:
        return json.dumps(dataset_stats(read_review_csv(csv_path)).to_dict(), indent=2)
    except TokbenchError as e:
        logger.error(f"corpus_stats failed: {e}")
        return json.dumps({"error": str(e)})


@tool_handler
def sample_reviews(
    input_path: str,
    output_path: str,
    fraction: Optional[float] = None,
    seed: Optional[int] = None,
) -> str:
    """
    Write a seeded uniform sample of a review CSV.

    Args:
        input_path: Source CSV
        output_path: Destination CSV
        fraction: Share of rows to keep, in (0, 1] (default from config.yaml)
        seed: PRNG seed (default from config.yaml)

    Returns:
        JSON string with the input and output row counts
    """
    try:
        defaults = component_defaults("corpus")
        fraction = defaults["fraction"] if fraction is None else fraction
        seed = defaults["seed"] if seed is None else seed
        dataset = read_review_csv(input_path)
        sample = random_sample(dataset, fraction, seed)
        Path(output_path).parent.mkdir(parents=True, exist_ok=True)
        Path(output_path).write_bytes(write_review_csv(sample))
        return json.dumps(
            {"input_rows": len(dataset), "output_rows": len(sample), "output_path": output_path}
        )
    except (TokbenchError, OSError) as e:
        logger.error(f"sample_reviews failed: {e}")
        return json.dumps({"error": str(e)})


@tool_handler
def make_mini_corpus(
    output_dir: str,
    n_train: Optional[int] = None,
    n_test: Optional[int] = None,
    seed: Optional[int] = None,
) -> str:
    """
    Generate the synthetic train/test review corpus as train.csv and test.csv.

    Args:
        output_dir: Directory to write into
        n_train: Training reviews (default from config.yaml)
        n_test: Test reviews (default from config.yaml)
        seed: Generator seed (default from config.yaml)

    Returns:
        JSON string with the written paths
    """
    try:
        train, test = generate_mini_corpus(n_train, n_test, seed)
        directory = Path(output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "train.csv").write_bytes(write_review_csv(train))
        (directory / "test.csv").write_bytes(write_review_csv(test))
        return json.dumps(
            {"train": str(directory / "train.csv"), "test": str(directory / "test.csv")}
        )
    except (TokbenchError, OSError) as e:
        logger.error(f"make_mini_corpus failed: {e}")
        return json.dumps({"error": str(e)})
