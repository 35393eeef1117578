"""
Experiment pipeline: load -> sample -> tokenizer -> vectorize (timed) -> fit -> evaluate -> tune.

Artifacts are written to a staging directory next to ``output_dir`` and moved into place only
after every stage has succeeded, so a failed run leaves no partial outputs behind.
"""

import json
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

import numpy as np
from scipy import sparse

from tokbench.components.classify import (
    Classifier,
    LrClassifier,
    evaluate_error,
    grid_search,
    label_array,
    load_classifier,
    parse_grid,
    repeated_stratified_kfold,
)
from tokbench.components.corpus import Dataset, random_sample, read_review_csv, write_review_csv
from tokbench.components.registry import get_classifier_factory, get_tokenizer_factory
from tokbench.components.vectorize import (
    TfidfModel,
    fit_transform_timed,
    load_tfidf_model,
    save_tfidf_model,
    tokenize_all,
    transform,
)
from tokbench.utils import (
    ModelFormatError,
    PipelineError,
    logger,
    safe_write_text,
    validate_input_path,
)

from .report import EvalReport, write_report_files
from .settings import PipelineConfig

MANIFEST = "manifest.json"
TOKENIZER_FILE = "tokenizer.tsv"
TFIDF_FILE = "tfidf.tsv"
CLASSIFIER_FILE = "classifier.tsv"


@contextmanager
def pipeline_stage(name: str) -> Iterator[None]:
    """Run one stage, wrapping any failure in a PipelineError that names it."""
    logger.info(f"[stage] {name}")
    try:
        yield
    except PipelineError:
        raise
    except Exception as e:
        logger.error(f"Stage '{name}' failed: {e}")
        raise PipelineError(name, e) from e


@dataclass
class TrainedModels:
    tokenizer: Any
    tfidf: TfidfModel
    classifier: Classifier
    matrix: sparse.csr_matrix
    labels: np.ndarray
    elapsed_seconds: float

    def predict(self, dataset: Dataset) -> np.ndarray:
        return self.classifier.predict(vectorize(self.tokenizer, self.tfidf, dataset))


def vectorize(tokenizer: Any, tfidf: TfidfModel, dataset: Dataset) -> sparse.csr_matrix:
    return transform(tfidf, tokenize_all(tokenizer, dataset.bodies))


def build_tokenizer(config: PipelineConfig, train_texts: List[str]) -> Any:
    """Load the configured tokenizer, training a subword model when none is given."""
    factory = get_tokenizer_factory(config.tokenizer)
    if config.tokenizer == "subword":
        return factory(
            model_path=config.subword_model,
            train_texts=train_texts,
            vocab_size=config.vocab_size,
            max_piece_len=config.max_piece_len,
            shrink_factor=config.shrink_factor,
            em_iters_per_round=config.em_iters,
        )
    return factory(model_path=config.tokenizer_model())


def classifier_options(config: PipelineConfig) -> Dict[str, Any]:
    if config.classifier == "mnb":
        return {"alpha": config.alpha}
    return {"C": config.C, "tol": config.tol, "max_iter": config.max_iter}


def sample_dataset(dataset: Dataset, config: PipelineConfig) -> Dataset:
    if config.fraction >= 1.0:
        return dataset
    return random_sample(dataset, config.fraction, config.seed)


def train_models(config: PipelineConfig, train: Dataset) -> TrainedModels:
    """Tokenizer, TF-IDF model and classifier for one training set."""
    with pipeline_stage("tokenizer"):
        tokenizer = build_tokenizer(config, train.bodies)
    with pipeline_stage("vectorize"):
        timed = fit_transform_timed(tokenizer, train.bodies)
    with pipeline_stage("fit"):
        labels = label_array(train.labels)
        factory = get_classifier_factory(config.classifier)
        classifier = factory(timed.matrix, labels, **classifier_options(config))
    return TrainedModels(
        tokenizer, timed.model, classifier, timed.matrix, labels, timed.elapsed_seconds
    )


def write_models(
    models: TrainedModels, directory: Path, config: PipelineConfig, error_train: float
) -> Dict[str, Any]:
    """Serialize the model chain plus a manifest describing it."""
    models.tokenizer.save(directory / TOKENIZER_FILE)
    save_tfidf_model(models.tfidf, directory / TFIDF_FILE)
    models.classifier.save(directory / CLASSIFIER_FILE)
    manifest = {
        "tokenizer": config.tokenizer,
        "classifier": config.classifier,
        "error_train": error_train,
        "vectorize_elapsed_seconds": models.elapsed_seconds,
        "train_count": int(models.labels.shape[0]),
        "n_features": models.tfidf.n_features,
        "params": classifier_options(config),
        "config": config.to_dict(),
    }
    safe_write_text(directory / MANIFEST, json.dumps(manifest, indent=2, ensure_ascii=False))
    return manifest


def publish(staging: Path, output_dir: Path) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    for item in sorted(staging.iterdir()):
        os.replace(item, output_dir / item.name)
    logger.info(f"Wrote outputs to {output_dir}")


@contextmanager
def staging_directory(output_dir: Path) -> Iterator[Path]:
    output_dir.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(prefix=".tokbench-", dir=output_dir.parent) as tmp:
        yield Path(tmp)


def fit_model_dir(config: PipelineConfig) -> Dict[str, Any]:
    """
    Train on ``config.train`` only and write the model directory.

    Returns:
        The manifest written to ``output_dir``

    Raises:
        ConfigError: If the config is invalid (raised before any work)
        PipelineError: If a stage fails
    """
    config.validate(require_test=False)
    output_dir = Path(config.output_dir)
    with staging_directory(output_dir) as staging:
        with pipeline_stage("load"):
            train = sample_dataset(read_review_csv(config.train or ""), config)
        models = train_models(config, train)
        with pipeline_stage("evaluate"):
            error_train = evaluate_error(models.classifier.predict(models.matrix), models.labels)
        with pipeline_stage("write"):
            manifest = write_models(models, staging, config, error_train)
            publish(staging, output_dir)
    return manifest


def load_model_dir(model_dir: str | Path) -> tuple[Dict[str, Any], Any, TfidfModel, Classifier]:
    """
    Rebuild (manifest, tokenizer, tfidf, classifier) from a model directory.

    Raises:
        ConfigError: If the manifest is missing
        ModelFormatError: If the manifest or a model file is malformed
    """
    directory = Path(model_dir)
    manifest_path = validate_input_path(directory / MANIFEST, "manifest")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        tokenizer_name = manifest["tokenizer"]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ModelFormatError(f"Malformed manifest {manifest_path}: {e}") from None
    tokenizer = get_tokenizer_factory(tokenizer_name)(model_path=str(directory / TOKENIZER_FILE))
    tfidf = load_tfidf_model(directory / TFIDF_FILE)
    classifier = load_classifier(directory / CLASSIFIER_FILE)
    return manifest, tokenizer, tfidf, classifier


def evaluate_model_dir(model_dir: str | Path, test_path: str | Path) -> EvalReport:
    """Score a saved model directory on a test CSV."""
    validate_input_path(test_path, "test")
    manifest, tokenizer, tfidf, classifier = load_model_dir(model_dir)
    test = read_review_csv(test_path)
    predicted = classifier.predict(transform(tfidf, tokenize_all(tokenizer, test.bodies)))
    return EvalReport(
        tokenizer=manifest["tokenizer"],
        classifier=manifest["classifier"],
        error_train=float(manifest["error_train"]),
        error_test=evaluate_error(predicted, label_array(test.labels)),
        vectorize_elapsed_seconds=float(manifest["vectorize_elapsed_seconds"]),
        train_count=int(manifest["train_count"]),
        test_count=len(test),
        params=dict(manifest.get("params", {})),
        config=dict(manifest.get("config", {})),
    )


def run_pipeline(config: PipelineConfig) -> List[EvalReport]:
    """
    Run the full experiment and write models and reports to ``config.output_dir``.

    Returns:
        The untuned report, followed by a tuned report when ``config.tune`` is set

    Raises:
        ConfigError: If the config is invalid (raised before any work)
        PipelineError: If a stage fails; nothing is left in ``output_dir`` from this run
    """
    config.validate()
    output_dir = Path(config.output_dir)
    logger.info("=" * 60)
    logger.info(f"Pipeline: tokenizer={config.tokenizer} classifier={config.classifier}")
    logger.info("=" * 60)

    with staging_directory(output_dir) as staging:
        with pipeline_stage("load"):
            train = read_review_csv(config.train or "")
            test = read_review_csv(config.test or "")
        with pipeline_stage("sample"):
            train = sample_dataset(train, config)
            test = sample_dataset(test, config)
            if config.fraction < 1.0:
                (staging / "train_sample.csv").write_bytes(write_review_csv(train))
                (staging / "test_sample.csv").write_bytes(write_review_csv(test))

        models = train_models(config, train)

        with pipeline_stage("evaluate"):
            error_train = evaluate_error(models.classifier.predict(models.matrix), models.labels)
            test_matrix = vectorize(models.tokenizer, models.tfidf, test)
            test_labels = label_array(test.labels)
            error_test = evaluate_error(models.classifier.predict(test_matrix), test_labels)
        reports = [
            EvalReport(
                tokenizer=config.tokenizer,
                classifier=config.classifier,
                error_train=error_train,
                error_test=error_test,
                vectorize_elapsed_seconds=models.elapsed_seconds,
                train_count=len(train),
                test_count=len(test),
                params=classifier_options(config),
                config=config.to_dict(),
            )
        ]
        logger.info(f"Untuned: train error {error_train:.2f}%, test error {error_test:.2f}%")

        tuned: Optional[LrClassifier] = None
        if config.tune:
            with pipeline_stage("tune"):
                plan = repeated_stratified_kfold(
                    models.labels, config.k, config.repeats, config.seed
                )
                result = grid_search(
                    models.matrix,
                    models.labels,
                    parse_grid(config.grid),
                    plan,
                    jobs=config.jobs,
                    tol=config.tol,
                    max_iter=config.max_iter,
                )
                tuned = LrClassifier(result.model)
                reports.append(
                    EvalReport(
                        tokenizer=config.tokenizer,
                        classifier=config.classifier,
                        error_train=evaluate_error(tuned.predict(models.matrix), models.labels),
                        error_test=evaluate_error(tuned.predict(test_matrix), test_labels),
                        vectorize_elapsed_seconds=models.elapsed_seconds,
                        train_count=len(train),
                        test_count=len(test),
                        variant="tuned",
                        params=dict(result.best_params),
                        config=config.to_dict(),
                    )
                )
                safe_write_text(
                    staging / "gridsearch.json", json.dumps(result.to_dict(), indent=2) + "\n"
                )

        with pipeline_stage("write"):
            write_models(models, staging, config, error_train)
            if tuned is not None:
                tuned.save(staging / "classifier_tuned.tsv")
            write_report_files(reports, staging)
            publish(staging, output_dir)

    return reports
