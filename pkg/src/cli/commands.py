"""
Subcommand implementations. Each takes a validated RunConfig and writes its
declared outputs; errors surface as GamSumError subclasses.
"""

import json
import logging
import re
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import pandas as pd

from src.config.settings import ModelKind, RunConfig
from src.corpus.loader import load_corpus, load_split, read_records, save_split, split_corpus, write_records
from src.corpus.models import RawDocument
from src.corpus.persistence import load_model, save_model
from src.errors import SchemaError
from src.evaluation.experiment import run_repeated_experiment
from src.evaluation.report import evaluate
from src.features.dump import feature_frame, read_feature_dump, training_set_from_dump, write_feature_dump
from src.gam.explain import VariationStatistic, explain_sentences, export_shape_tables, importance_frame, importance_ratios
from src.gam.model import TermKind
from src.monitoring.metrics import TrainingLog, timed
from src.oracle.dataset import labeled_rows
from src.oracle.labeling import document_labels, undersample
from src.preprocess.pipeline import Document, preprocess_document
from src.summarizer.budget import SummaryBudget
from src.summarizer.selection import Summary, lead_baseline, oracle_baseline, score_sentences, select_sentences
from src.training.registry import TrainedModel, as_additive, train_model
from src.utils.parallel import ordered_map

logger = logging.getLogger("gamsum.cli.commands")

ALL_DOCUMENTS = "all"
TSV_FLOAT_FORMAT = "%.17g"


def _out_dir(path: str) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _select_raw(config: RunConfig, raws: List[RawDocument]) -> List[RawDocument]:
    """Restrict to one split part when a split file and subset are given, keeping corpus order."""
    subset = config.options.get("subset", ALL_DOCUMENTS)
    if "split" not in config.inputs or subset == ALL_DOCUMENTS:
        return raws
    wanted = set(load_split(config.inputs["split"]).subset(subset))
    return [raw for raw in raws if raw.id in wanted]


def _documents(config: RunConfig) -> List[Document]:
    raws = _select_raw(config, load_corpus(config.inputs["corpus"]))
    return ordered_map(preprocess_document, raws, config.workers)


def _split_documents(config: RunConfig) -> Tuple[List[Document], List[Document], List[Document]]:
    raws = load_corpus(config.inputs["corpus"])
    docs = {doc.id: doc for doc in ordered_map(preprocess_document, raws, config.workers)}
    split = load_split(config.inputs["split"])
    missing = [doc_id for doc_id in split.all_ids() if doc_id not in docs]
    if missing:
        raise SchemaError(f"split names documents absent from the corpus: {missing[:5]}")
    return tuple([docs[doc_id] for doc_id in split.subset(part)] for part in ("train", "validation", "test"))


@timed("ingest")
def run_ingest(config: RunConfig) -> None:
    """Validate and preprocess a corpus, then write the split and a per-document overview."""
    raws = load_corpus(config.inputs["corpus"])
    docs = ordered_map(preprocess_document, raws, config.workers)
    ratios = config.options.get("ratios") or config.settings.run.split_ratios
    split = split_corpus([raw.id for raw in raws], ratios, config.seed)

    out_dir = _out_dir(config.outputs["out_dir"])
    save_split(split, out_dir / "split.json")
    write_records((raw.to_record() for raw in raws), out_dir / "corpus.jsonl")
    part_of = {doc_id: part for part in ("train", "validation", "test") for doc_id in split.subset(part)}
    overview = pd.DataFrame(
        {
            "doc_id": [doc.id for doc in docs],
            "part": [part_of[doc.id] for doc in docs],
            "sentences": [len(doc) for doc in docs],
            "reference_sentences": [len(doc.reference_sentences) for doc in docs],
            "presegmented": [raw.is_presegmented for raw in raws],
        }
    )
    overview.to_csv(out_dir / "documents.tsv", sep="\t", index=False)
    logger.info(f"Ingested {len(docs)} documents into {out_dir}")


@timed("label")
def run_label(config: RunConfig) -> None:
    """Write the feature dump with oracle (or pre-assigned) labels."""
    docs = _documents(config)
    rows = labeled_rows(docs, config.summary_budget, config.workers)
    write_feature_dump(feature_frame(rows), config.outputs["out"])
    logger.info(f"Wrote features and labels of {len(docs)} documents to {config.outputs['out']}")


@timed("train")
def run_train(config: RunConfig) -> None:
    """Train one model kind on a labeled feature dump."""
    kind = ModelKind(config.model_kind)
    train = training_set_from_dump(read_feature_dump(config.inputs["dataset"]))
    if config.settings.run.undersample and not config.options.get("no_undersample", False):
        train = undersample(train, config.seed)
    val = None
    if "val_dataset" in config.inputs:
        val = training_set_from_dump(read_feature_dump(config.inputs["val_dataset"]))

    training_log = TrainingLog()
    model = train_model(kind, train, val, config.settings, training_log, config.workers)
    save_model(model, config.outputs["out"], config.settings.trainer_config(kind).model_dump(mode="json"))
    if "log" in config.outputs:
        training_log.write(config.outputs["log"])


def _summarizer(config: RunConfig) -> Callable[[Document], Summary]:
    budget: SummaryBudget = config.summary_budget
    baseline = config.options.get("baseline")
    if baseline == "lead":
        return lambda doc: lead_baseline(doc, budget)
    if baseline == "oracle":
        return lambda doc: oracle_baseline(doc, document_labels(doc, budget), budget)
    model: TrainedModel = load_model(config.inputs["model"])
    return lambda doc: select_sentences(score_sentences(model, doc), doc, budget)


@timed("summarize")
def run_summarize(config: RunConfig) -> None:
    """Summarize documents with a trained model or a baseline."""
    docs = _documents(config)
    summarize = _summarizer(config)
    summaries = [summarize(doc) for doc in docs]
    count = write_records((s.to_record() for s in summaries), config.outputs["out"])
    empty = sum(1 for s in summaries if s.notice)
    logger.info(f"Wrote {count} summaries to {config.outputs['out']} ({empty} empty)")


def _write_json(payload: Dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


@timed("evaluate")
def run_evaluate(config: RunConfig) -> None:
    """Score a summaries file, or run the repeated train/evaluate protocol."""
    budget = config.summary_budget
    if config.model_kind is not None:
        train_docs, val_docs, test_docs = _split_documents(config)
        result = run_repeated_experiment(
            train_docs,
            val_docs,
            test_docs,
            config.model_kind,
            budget,
            repeats=config.repeats,
            seed=config.seed,
            settings=config.settings,
            workers=config.workers,
        )
        summary = result.summary_frame()
        _write_json(
            {
                "model_kind": result.kind.value,
                "repeats": config.repeats,
                "runs": result.runs.reset_index().to_dict(orient="records"),
                "mean": summary["mean"].to_dict(),
                "std": summary["std"].to_dict(),
            },
            config.outputs["out"],
        )
        table = result.to_table()
    else:
        docs = _documents(config)
        summaries = [Summary.from_record(record) for record in read_records(config.inputs["summaries"])]
        references = {doc.id: doc.reference_text for doc in docs}
        labels = {doc.id: document_labels(doc, budget) for doc in docs}
        report = evaluate(
            summaries,
            references,
            labels,
            name=Path(config.inputs["summaries"]).stem,
            stem=config.options.get("stem", False),
            average=config.options.get("average", "micro"),
        )
        report.write(config.outputs["out"])
        table = report.to_table()
    if "table" in config.outputs:
        Path(config.outputs["table"]).write_text(table + "\n", encoding="utf-8")
    print(table)


def _tsv_name(stem: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", stem) + ".tsv"


def _term_file_name(term: str, kind: TermKind) -> str:
    if kind is TermKind.PAIR:
        left, right = term.split(" & ")
        return _tsv_name(f"pair_{left}__{right}")
    return _tsv_name(f"main_{term}")


@timed("explain")
def run_explain(config: RunConfig) -> None:
    """Write shape tables, the importance ranking and optional per-document explanations."""
    model = as_additive(load_model(config.inputs["model"]))
    frame = read_feature_dump(config.inputs["dataset"], model.feature_names)
    subset = config.options.get("subset", ALL_DOCUMENTS)
    if "split" in config.inputs and subset != ALL_DOCUMENTS:
        frame = frame[frame["doc_id"].isin(set(load_split(config.inputs["split"]).subset(subset)))]
    if frame.empty:
        raise SchemaError("no dataset rows left to explain")
    x = frame[list(model.feature_names)].to_numpy(dtype="float64")

    out_dir = _out_dir(config.outputs["out_dir"])
    tables = export_shape_tables(model)
    for table in tables:
        table.frame.to_csv(out_dir / _term_file_name(table.term, table.kind), sep="\t", index=False, float_format=TSV_FLOAT_FORMAT)

    statistic = VariationStatistic(config.options.get("statistic", "std"))
    importance = importance_frame(importance_ratios(model, x, statistic))
    importance.to_csv(out_dir / "importance.tsv", sep="\t", index=False, float_format=TSV_FLOAT_FORMAT)

    for doc_id in config.options.get("doc_ids", []):
        rows = frame[frame["doc_id"] == doc_id]
        if rows.empty:
            raise SchemaError(f"document '{doc_id}' is not in the dataset")
        local = explain_sentences(
            model, rows[list(model.feature_names)].to_numpy(dtype="float64"), rows["sentence_index"].tolist()
        )
        local.index.name = "sentence_index"
        local.to_csv(out_dir / _tsv_name(f"explain_{doc_id}"), sep="\t", float_format=TSV_FLOAT_FORMAT)
    logger.info(f"Wrote {len(tables)} shape tables and {len(importance)} importance rows to {out_dir}")


COMMANDS: Dict[str, Callable[[RunConfig], None]] = {
    "ingest": run_ingest,
    "label": run_label,
    "train": run_train,
    "summarize": run_summarize,
    "evaluate": run_evaluate,
    "explain": run_explain,
}
