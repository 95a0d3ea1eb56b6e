"""
Command-line entry point for GAMSum.

    python -m src.cli ingest    --corpus docs.jsonl --out-dir data/
    python -m src.cli label     --corpus docs.jsonl --split data/split.json --subset train --out train.tsv
    python -m src.cli train     --model ebm --dataset train.tsv --out ebm.json
    python -m src.cli summarize --corpus docs.jsonl --split data/split.json --model ebm.json --out summaries.jsonl
    python -m src.cli evaluate  --corpus docs.jsonl --split data/split.json --summaries summaries.jsonl --out report.json
    python -m src.cli explain   --model ebm.json --dataset test.tsv --out-dir explain/

Exit codes: 0 success, 1 data or training error, 2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from src.cli.commands import COMMANDS
from src.config.settings import ConfigError, ModelKind, RunConfig, load_settings
from src.errors import GamSumError
from src.monitoring.logging_setup import configure_logging

logger = logging.getLogger("gamsum.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2

SPLIT_PARTS = ("train", "validation", "test", "all")

# argparse destination -> RunConfig.inputs key; each must name an existing file
INPUT_ARGS = ("corpus", "split", "dataset", "val_dataset", "summaries", "config")
OUTPUT_ARGS = ("out", "out_dir", "log", "table")


def _ratios(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"ratios must be comma-separated numbers, got '{text}'") from e
    if len(values) != 3:
        raise argparse.ArgumentTypeError("ratios need exactly three values: train,validation,test")
    return values


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument("--seed", type=int, default=None, help="Root seed (default: run.seed from the config)")
    group.add_argument("--workers", type=int, default=None, help="Parallel jobs; never changes results")
    group.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Log level")
    group.add_argument("--log-json", action="store_true", help="Emit JSON log records")
    group.add_argument("--config", default=None, help="YAML file layered over the defaults")
    group.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE", help="Config override"
    )
    return common


def _corpus_selection(parser: argparse.ArgumentParser, default_subset: str = "all") -> None:
    parser.add_argument("--corpus", required=True, help="Corpus file, one JSON record per line")
    parser.add_argument("--split", default=None, help="Split file written by ingest")
    parser.add_argument(
        "--subset", default=default_subset, choices=SPLIT_PARTS, help="Split part to use (needs --split)"
    )


def build_parser() -> argparse.ArgumentParser:
    """Parser with one sub-parser per subcommand; global options are accepted after the subcommand."""
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="gamsum", description="Interpretable extractive summarization")
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    ingest = subparsers.add_parser("ingest", parents=[common], help="Validate a corpus and split it")
    ingest.add_argument("--corpus", required=True, help="Corpus file, one JSON record per line")
    ingest.add_argument("--out-dir", required=True, help="Directory for split.json, corpus.jsonl, documents.tsv")
    ingest.add_argument("--ratios", type=_ratios, default=None, help="train,validation,test ratios")

    label = subparsers.add_parser("label", parents=[common], help="Write features and oracle labels")
    _corpus_selection(label)
    label.add_argument("--budget", default=None, help="sentences:K or words:W")
    label.add_argument("--out", required=True, help="Feature dump (TSV)")

    train = subparsers.add_parser("train", parents=[common], help="Train a sentence scorer")
    train.add_argument("--model", required=True, choices=[k.value for k in ModelKind], help="Trainer")
    train.add_argument("--dataset", required=True, help="Labeled feature dump")
    train.add_argument("--val-dataset", default=None, help="Labeled validation feature dump")
    train.add_argument("--out", required=True, help="Model file")
    train.add_argument("--log", default=None, help="Training-loss log (TSV)")
    train.add_argument("--no-undersample", action="store_true", help="Keep the class imbalance")

    summarize = subparsers.add_parser("summarize", parents=[common], help="Select summary sentences")
    _corpus_selection(summarize)
    source = summarize.add_mutually_exclusive_group(required=True)
    source.add_argument("--model", dest="model_path", default=None, help="Model file")
    source.add_argument("--baseline", choices=["lead", "oracle"], default=None, help="Baseline instead of a model")
    summarize.add_argument("--budget", default=None, help="sentences:K or words:W")
    summarize.add_argument("--out", required=True, help="Summaries (JSON lines)")

    evaluate = subparsers.add_parser("evaluate", parents=[common], help="ROUGE and sentence F1")
    _corpus_selection(evaluate)
    mode = evaluate.add_mutually_exclusive_group(required=True)
    mode.add_argument("--summaries", default=None, help="Summaries written by summarize")
    mode.add_argument(
        "--model",
        dest="model_kind",
        choices=[k.value for k in ModelKind],
        default=None,
        help="Train and evaluate this kind --repeats times (needs --split)",
    )
    evaluate.add_argument("--repeats", type=int, default=None, help="Runs to average")
    evaluate.add_argument("--budget", default=None, help="sentences:K or words:W")
    evaluate.add_argument("--stem", action="store_true", help="Porter-stem tokens for ROUGE")
    evaluate.add_argument("--average", choices=["micro", "macro"], default="micro", help="Sentence F1 averaging")
    evaluate.add_argument("--out", required=True, help="Report (JSON)")
    evaluate.add_argument("--table", default=None, help="Aligned text table")

    explain = subparsers.add_parser("explain", parents=[common], help="Shape tables and importance ratios")
    explain.add_argument("--model", dest="model_path", required=True, help="Model file")
    explain.add_argument("--dataset", required=True, help="Feature dump to measure importance on")
    explain.add_argument("--out-dir", required=True, help="Output directory")
    explain.add_argument("--statistic", choices=["std", "mad"], default="std", help="Variation statistic")
    explain.add_argument("--doc-id", dest="doc_ids", action="append", default=[], help="Write per-sentence contributions")
    explain.add_argument("--split", default=None, help="Split file, to restrict the dataset with --subset")
    explain.add_argument("--subset", default="all", choices=SPLIT_PARTS, help="Split part to measure on")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parse and check command-line arguments.

    Raises:
        SystemExit: Usage error (code 2) or --help (code 0)
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    for name in INPUT_ARGS + ("model_path",):
        value = getattr(args, name, None)
        if value is not None and not Path(value).is_file():
            parser.error(f"input file not found: {value}")
    if args.subcommand == "evaluate" and args.model_kind is not None and args.split is None:
        parser.error("evaluate --model needs --split")
    if getattr(args, "subset", "all") != "all" and getattr(args, "split", None) is None:
        parser.error("--subset needs --split")
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")
    return args


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Layer defaults, --config and --set, then validate one invocation.

    Raises:
        ConfigError: Invalid configuration or flag values
    """
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides += [f"ebm.seed={args.seed}", f"gaminet.seed={args.seed}", f"run.seed={args.seed}"]
    settings = load_settings(args.config, overrides)

    inputs = {name: getattr(args, name) for name in INPUT_ARGS if getattr(args, name, None) is not None}
    if getattr(args, "model_path", None) is not None:
        inputs["model"] = args.model_path
    outputs = {name: getattr(args, name) for name in OUTPUT_ARGS if getattr(args, name, None) is not None}

    options: Dict[str, Any] = {}
    for name in ("subset", "ratios", "baseline", "stem", "average", "statistic", "doc_ids", "no_undersample"):
        if getattr(args, name, None) is not None:
            options[name] = getattr(args, name)

    model_kind = getattr(args, "model_kind", None) or (args.model if args.subcommand == "train" else None)
    try:
        return RunConfig(
            subcommand=args.subcommand,
            inputs=inputs,
            outputs=outputs,
            model_kind=model_kind,
            budget=getattr(args, "budget", None) or settings.run.budget,
            settings=settings,
            seed=settings.run.seed,
            workers=args.workers if args.workers is not None else settings.run.workers,
            repeats=getattr(args, "repeats", None) or settings.run.repeats,
            options=options,
        )
    except ValidationError as e:
        raise ConfigError(f"invalid arguments: {e}") from e


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; sys.argv[1:] when None

    Returns:
        Exit code: 0 success, 1 data, training or file access error, 2 usage error
    """
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.log_level, args.log_json)
    try:
        config = build_run_config(args)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_USAGE

    logger.info(f"Running {config.subcommand} (seed {config.seed}, workers {config.workers})")
    try:
        COMMANDS[config.subcommand](config)
    except GamSumError as e:
        logger.error(f"{config.subcommand} failed: {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"{config.subcommand} failed on file access: {e}")
        return EXIT_ERROR
    return EXIT_OK


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
