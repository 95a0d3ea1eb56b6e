"""Per-document labeling and feature extraction into one TrainingSet."""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from src.features.extraction import extract_features
from src.oracle.labeling import TrainingSet, document_labels
from src.preprocess.pipeline import Document
from src.summarizer.budget import SummaryBudget
from src.utils.parallel import ordered_map

logger = logging.getLogger("gamsum.oracle.dataset")

LabeledRows = Tuple[str, np.ndarray, List[int]]


def _label_one(job: Tuple[Document, SummaryBudget]) -> LabeledRows:
    doc, budget = job
    return doc.id, extract_features(doc), document_labels(doc, budget)


def labeled_rows(docs: Sequence[Document], budget: SummaryBudget, workers: int = 1) -> List[LabeledRows]:
    """
    (doc_id, feature matrix, labels) for every document, in input order.

    Raises:
        LabelingError: A document without pre-assigned labels has an empty reference
    """
    rows = ordered_map(_label_one, [(doc, budget) for doc in docs], workers)
    positives = sum(int(np.sum(labels)) for _, _, labels in rows)
    total = sum(len(labels) for _, _, labels in rows)
    logger.info(f"Labeled {len(rows)} documents: {positives} of {total} sentences positive")
    return rows


def build_training_set(docs: Sequence[Document], budget: SummaryBudget, workers: int = 1) -> TrainingSet:
    return TrainingSet.from_documents(labeled_rows(docs, budget, workers))
