"""
tokbench command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 data error, 3 internal error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from tokbench.components.classify import (
    grid_search,
    label_array,
    parse_grid,
    repeated_stratified_kfold,
)
from tokbench.components.corpus import (
    dataset_stats,
    generate_mini_corpus,
    random_sample,
    read_review_csv,
    write_review_csv,
)
from tokbench.components.harness import (
    CONFIG_KEYS,
    PipelineConfig,
    bench,
    build_tokenizer,
    compare_tokenizers,
    emit_bench,
    emit_report,
    evaluate_model_dir,
    fit_model_dir,
    format_comparison,
    load_pipeline_config,
    parse_sizes,
    run_pipeline,
)
from tokbench.components.harness.pipeline import pipeline_stage, sample_dataset
from tokbench.components.registry import component_defaults, get_tokenizer_factory
from tokbench.components.subword import TrainerConfig, save_subword_model, train
from tokbench.components.vectorize import fit_transform_timed
from tokbench.utils import (
    DataError,
    PipelineError,
    TokbenchError,
    ValidationError,
    escape_field,
    format_seconds,
    logger,
    safe_write_text,
    validate_fraction,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the documented exit code."""
    if isinstance(error, PipelineError):
        error = error.cause
    if isinstance(error, ValidationError):
        return EXIT_CONFIG
    if isinstance(error, DataError):
        return EXIT_DATA
    return EXIT_INTERNAL


def _write_output(content: str, output: Optional[str]) -> None:
    if output:
        safe_write_text(output, content)
    else:
        sys.stdout.write(content)


def _config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(args, key, None) for key in CONFIG_KEYS}


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    return load_pipeline_config(args.config, _config_overrides(args))


def add_config_flags(parser: argparse.ArgumentParser) -> None:
    """One flag per PipelineConfig key; unset flags leave the file/default value alone."""
    parser.add_argument("--config", help="key=value config file")
    for key in CONFIG_KEYS:
        flag = f"--{key.replace('_', '-')}"
        if key == "tune":
            parser.add_argument(flag, dest=key, action="store_true", default=None)
        else:
            parser.add_argument(flag, dest=key, default=None, help=f"Override '{key}'")


def cmd_sample(args: argparse.Namespace) -> int:
    defaults = component_defaults("corpus")
    fraction = defaults["fraction"] if args.fraction is None else args.fraction
    seed = defaults["seed"] if args.seed is None else args.seed
    validate_fraction(fraction)
    sample = random_sample(read_review_csv(args.input), fraction, seed)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    Path(args.output).write_bytes(write_review_csv(sample))
    print(f"Wrote {len(sample)} rows to {args.output}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    print(json.dumps(dataset_stats(read_review_csv(args.input)).to_dict(), indent=2))
    return EXIT_OK


def cmd_train_subword(args: argparse.Namespace) -> int:
    config = TrainerConfig.from_options(
        {
            "vocab_size": args.vocab_size,
            "max_piece_len": args.max_piece_len,
            "shrink_factor": args.shrink_factor,
            "em_iters_per_round": args.em_iters,
        }
    )
    vocab = train(read_review_csv(args.input).bodies, config)
    save_subword_model(vocab, args.output)
    print(f"Wrote {len(vocab)} pieces to {args.output}")
    return EXIT_OK


def cmd_tokenize(args: argparse.Namespace) -> int:
    tokenizer = get_tokenizer_factory(args.tokenizer)(model_path=args.model)
    lines = [
        "\t".join(escape_field(token) for token in tokenizer.tokenize(body))
        for body in read_review_csv(args.input).bodies
    ]
    _write_output("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    manifest = fit_model_dir(_resolve_config(args))
    print(f"Vectorize elapsed: {format_seconds(manifest['vectorize_elapsed_seconds'])} s")
    print(f"Train error: {manifest['error_train']:.2f}%")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    report = evaluate_model_dir(args.model_dir, args.test)
    _write_output(emit_report([report], args.format).decode("utf-8"), args.output)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    reports = run_pipeline(_resolve_config(args))
    _write_output(emit_report(reports, args.format).decode("utf-8"), args.output)
    return EXIT_OK


def cmd_gridsearch(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    config.validate(require_test=False)
    with pipeline_stage("load"):
        dataset = sample_dataset(read_review_csv(config.train or ""), config)
    with pipeline_stage("vectorize"):
        tokenizer = build_tokenizer(config, dataset.bodies)
        timed = fit_transform_timed(tokenizer, dataset.bodies)
    with pipeline_stage("tune"):
        labels = label_array(dataset.labels)
        plan = repeated_stratified_kfold(labels, config.k, config.repeats, config.seed)
        result = grid_search(
            timed.matrix,
            labels,
            parse_grid(config.grid),
            plan,
            jobs=config.jobs,
            tol=config.tol,
            max_iter=config.max_iter,
        )
    lines = [f"{'C':>10}  Mean-Error"]
    lines.extend(f"{c.params['C']:>10g}  {c.mean_error:.2f}" for c in result.cells)
    lines.append(f"Best C={result.best_params['C']:g} ({result.best.mean_error:.2f}%)")
    print("\n".join(lines))
    if args.output:
        safe_write_text(args.output, json.dumps(result.to_dict(), indent=2) + "\n")
    return EXIT_OK


def _named_tokenizers(config: PipelineConfig, names: List[str], texts: List[str]) -> Dict[str, Any]:
    tokenizers = {}
    for name in names:
        tokenizers[name] = build_tokenizer(config.updated({"tokenizer": name}), texts)
    return tokenizers


def cmd_bench(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    config.validate(require_test=False)
    dataset = read_review_csv(config.train or "")
    names = [n.strip() for n in args.tokenizers.split(",") if n.strip()]
    tokenizers = _named_tokenizers(config, names, dataset.bodies)
    rows = bench(dataset, tokenizers, parse_sizes(args.sizes), config.seed)
    _write_output(emit_bench(rows, args.format).decode("utf-8"), args.output)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    config.validate(require_test=False)
    dataset = read_review_csv(config.train or "")
    names = [n.strip() for n in args.tokenizers.split(",") if n.strip()]
    tokenizers = _named_tokenizers(config, names, dataset.bodies)
    preview = compare_tokenizers(dataset, tokenizers, args.n, config.seed)
    _write_output(format_comparison(preview), args.output)
    return EXIT_OK


def cmd_make_corpus(args: argparse.Namespace) -> int:
    train_set, test_set = generate_mini_corpus(args.n_train, args.n_test, args.seed)
    directory = Path(args.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "train.csv").write_bytes(write_review_csv(train_set))
    (directory / "test.csv").write_bytes(write_review_csv(test_set))
    print(f"Wrote {len(train_set)} train and {len(test_set)} test reviews to {directory}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from tokbench.server import serve

    serve()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tokbench",
        description="Japanese tokenizer benchmark for TF-IDF review sentiment classification",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="Draw a seeded uniform sample of a review CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("stats", help="Record and class counts of a review CSV")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train-subword", help="Train a unigram LM subword model")
    p.add_argument("--input", required=True)
    p.add_argument("--vocab-size", type=int, default=None)
    p.add_argument("--max-piece-len", type=int, default=None)
    p.add_argument("--shrink-factor", type=float, default=None)
    p.add_argument("--em-iters", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_train_subword)

    p = sub.add_parser("tokenize", help="Tokenize review bodies, one document per line")
    p.add_argument("--tokenizer", required=True, choices=["lattice", "subword"])
    p.add_argument("--model", default=None, help="Dictionary TSV or subword model TSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("fit", help="Train tokenizer, TF-IDF and classifier into a model dir")
    add_config_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="Score a model dir on a test CSV")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="Run the full experiment pipeline")
    add_config_flags(p)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--output", default=None, help="Also write the report table here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gridsearch", help="Tune LR C with repeated stratified k-fold CV")
    add_config_flags(p)
    p.add_argument("--output", default=None, help="Write grid results as JSON")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("bench", help="Time vectorization per tokenizer and training size")
    add_config_flags(p)
    p.add_argument("--tokenizers", default="lattice,subword")
    p.add_argument("--sizes", required=True, help="Comma-separated sizes, e.g. 1000,10000")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="Print token lists of random reviews per tokenizer")
    add_config_flags(p)
    p.add_argument("--tokenizers", default="lattice,subword")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("make-corpus", help="Generate the synthetic mini corpus")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--n-train", type=int, default=None)
    p.add_argument("--n-test", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_make_corpus)

    p = sub.add_parser("serve", help="Run the MCP server on stdio")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.setLevel(logging.DEBUG)

    try:
        code: int = args.func(args)
        return code
    except TokbenchError as e:
        logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        print(f"Internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
