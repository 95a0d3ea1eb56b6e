"""
Repeated train/summarize/evaluate runs averaged over re-derived seeds.

Each repeat re-randomizes undersampling and the trainer seed; labels and
features are computed once since they do not depend on the seed.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.config.settings import ModelKind, Settings
from src.evaluation.report import EvalReport, evaluate
from src.oracle.dataset import labeled_rows
from src.oracle.labeling import TrainingSet, undersample
from src.preprocess.pipeline import Document
from src.summarizer.budget import SummaryBudget
from src.summarizer.selection import score_sentences, select_sentences
from src.training.registry import train_model
from src.utils.seeding import derive_seed

logger = logging.getLogger("gamsum.evaluation.experiment")


@dataclass
class ExperimentResult:
    """Per-repeat metrics and their mean and population standard deviation."""

    kind: ModelKind
    runs: pd.DataFrame

    @property
    def mean(self) -> pd.Series:
        return self.runs.mean(axis=0)

    @property
    def std(self) -> pd.Series:
        return self.runs.std(axis=0, ddof=0)

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"mean": self.mean, "std": self.std})

    def to_table(self) -> str:
        """Mean and std in percent with two decimals, one row per metric."""
        return (100.0 * self.summary_frame()).to_string(float_format=lambda v: f"{v:.2f}")


def repeat_settings(settings: Settings, kind: ModelKind, seed: int) -> Settings:
    """Settings with the trainer seed replaced; logistic regression has none."""
    if kind is ModelKind.LOGISTIC:
        return settings
    section = kind.value
    updated = getattr(settings, section).model_copy(update={"seed": seed})
    return settings.model_copy(update={section: updated})


def run_repeated_experiment(
    train_docs: Sequence[Document],
    val_docs: Sequence[Document],
    test_docs: Sequence[Document],
    kind: Union[ModelKind, str],
    budget: SummaryBudget,
    repeats: int = 1,
    seed: int = 0,
    settings: Optional[Settings] = None,
    workers: int = 1,
) -> ExperimentResult:
    """
    Train ``repeats`` models of one kind and evaluate each on the test documents.

    Args:
        train_docs: Training documents
        val_docs: Validation documents (may be empty)
        test_docs: Documents to summarize and score
        kind: Trainer
        budget: Labeling and summary budget
        repeats: Number of runs
        seed: Root seed; repeat r uses derive_seed(seed, "repeat", r)
        settings: Trainer and run settings
        workers: Parallel per-document work and EBM bags

    Returns:
        One row per repeat with rouge1, rouge2, rougeL and f1
    """
    kind = ModelKind(kind)
    settings = settings or Settings()
    full_train = TrainingSet.from_documents(labeled_rows(train_docs, budget, workers))
    val = TrainingSet.from_documents(labeled_rows(val_docs, budget, workers)) if val_docs else None
    test_labels = {doc_id: labels for doc_id, _, labels in labeled_rows(test_docs, budget, workers)}
    references = {doc.id: doc.reference_text for doc in test_docs}

    rows: List[Dict[str, float]] = []
    for repeat in range(repeats):
        repeat_seed = derive_seed(seed, "repeat", repeat)
        train = undersample(full_train, repeat_seed) if settings.run.undersample else full_train
        model = train_model(kind, train, val, repeat_settings(settings, kind, repeat_seed), workers=workers)
        summaries = [select_sentences(score_sentences(model, doc), doc, budget) for doc in test_docs]
        report: EvalReport = evaluate(summaries, references, test_labels, name=f"{kind.value}#{repeat}")
        rows.append(report.metrics())
        logger.info(f"Repeat {repeat + 1}/{repeats} done")

    runs = pd.DataFrame(rows, index=pd.RangeIndex(repeats, name="repeat"))
    return ExperimentResult(kind, runs.astype(np.float64))
