"""
Harness Component

Runs the sample -> tokenize -> vectorize -> fit -> evaluate -> tune flow and renders reports.
"""

from tokbench.components.classify import evaluate_error

from .bench import BenchRow, bench, compare_tokenizers, emit_bench, format_comparison, parse_sizes
from .pipeline import (
    TrainedModels,
    build_tokenizer,
    evaluate_model_dir,
    fit_model_dir,
    load_model_dir,
    pipeline_stage,
    run_pipeline,
    train_models,
)
from .report import EvalReport, emit_report, read_report_file, write_report_files
from .settings import CONFIG_KEYS, PipelineConfig, load_pipeline_config, parse_key_value

__all__ = [
    "BenchRow",
    "CONFIG_KEYS",
    "EvalReport",
    "PipelineConfig",
    "TrainedModels",
    "bench",
    "build_tokenizer",
    "compare_tokenizers",
    "emit_bench",
    "emit_report",
    "evaluate_error",
    "evaluate_model_dir",
    "fit_model_dir",
    "format_comparison",
    "load_model_dir",
    "load_pipeline_config",
    "parse_key_value",
    "parse_sizes",
    "pipeline_stage",
    "read_report_file",
    "run_pipeline",
    "train_models",
    "write_report_files",
]
