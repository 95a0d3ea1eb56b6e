"""
Sentence scoring and budgeted selection, plus the Lead and Oracle baselines.

Sentences are ranked by descending score with ties going to the earlier
sentence. Under a word budget the ranked list is walked and selection stops at
the first sentence that would exceed the budget; sentences are never split.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import SelectionError
from src.features.extraction import extract_features
from src.preprocess.pipeline import Document
from src.summarizer.budget import BudgetKind, SummaryBudget

logger = logging.getLogger("gamsum.summarizer")

EMPTY_SUMMARY_NOTICE = "empty-summary: no sentence selected"


@dataclass(frozen=True)
class Summary:
    """Selected sentences of one document, in document order."""

    doc_id: str
    indices: Tuple[int, ...]
    sentences: Tuple[str, ...]
    notice: Optional[str] = None

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise SelectionError(f"summary indices for '{self.doc_id}' must be strictly increasing: {self.indices}")

    @property
    def text(self) -> str:
        return " ".join(self.sentences)

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "id": self.doc_id,
            "indices": list(self.indices),
            "sentences": list(self.sentences),
            "text": self.text,
        }
        if self.notice:
            record["notice"] = self.notice
        return record

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "Summary":
        return cls(
            doc_id=str(record["id"]),
            indices=tuple(int(i) for i in record["indices"]),
            sentences=tuple(record["sentences"]),
            notice=record.get("notice"),
        )


def _build_summary(doc: Document, chosen: Sequence[int]) -> Summary:
    indices = tuple(sorted(chosen))
    notice = None
    if not indices:
        notice = EMPTY_SUMMARY_NOTICE
        logger.warning(f"Document {doc.id}: {EMPTY_SUMMARY_NOTICE}")
    return Summary(doc.id, indices, tuple(doc.sentences[i].raw for i in indices), notice)


def _take_within_budget(doc: Document, ordered: Sequence[int], budget: SummaryBudget) -> List[int]:
    """Prefix of ``ordered`` that fits the budget, stopping at the first violation."""
    if budget.kind is BudgetKind.SENTENCES:
        return list(ordered[: budget.limit])
    chosen: List[int] = []
    words = 0
    for i in ordered:
        count = doc.sentences[i].term_count
        if words + count > budget.limit:
            break
        chosen.append(i)
        words += count
    return chosen


def score_sentences(model: Any, doc: Document) -> np.ndarray:
    """
    Probability of each sentence belonging to the summary.

    Args:
        model: Anything with ``predict_proba`` over sentence-feature rows
        doc: Preprocessed document

    Returns:
        One probability per sentence
    """
    return np.asarray(model.predict_proba(extract_features(doc)), dtype=np.float64).reshape(-1)


def rank_sentences(scores: Sequence[float]) -> List[int]:
    """Indices by descending score, earlier sentence first on ties."""
    values = np.asarray(scores, dtype=np.float64)
    return sorted(range(values.size), key=lambda i: (-values[i], i))


def select_sentences(scores: Sequence[float], doc: Document, budget: SummaryBudget) -> Summary:
    """
    Pick the top-ranked sentences under the budget.

    Args:
        scores: One score per sentence
        doc: Preprocessed document
        budget: Sentence or word budget

    Returns:
        Summary with indices in document order

    Raises:
        SelectionError: Empty document or score count mismatch
    """
    if len(doc) == 0:
        raise SelectionError(f"document '{doc.id}' has no sentences to select from")
    if len(scores) != len(doc):
        raise SelectionError(f"document '{doc.id}': {len(scores)} scores for {len(doc)} sentences")
    return _build_summary(doc, _take_within_budget(doc, rank_sentences(scores), budget))


def lead_baseline(doc: Document, budget: SummaryBudget) -> Summary:
    """The first sentences of the document up to the budget."""
    if len(doc) == 0:
        raise SelectionError(f"document '{doc.id}' has no sentences to select from")
    return _build_summary(doc, _take_within_budget(doc, list(range(len(doc))), budget))


def oracle_baseline(doc: Document, labels: Sequence[int], budget: SummaryBudget) -> Summary:
    """
    Label-1 sentences in document order, clipped to the budget.

    All-zero labels give an empty summary carrying ``EMPTY_SUMMARY_NOTICE``.
    """
    if len(labels) != len(doc):
        raise SelectionError(f"document '{doc.id}': {len(labels)} labels for {len(doc)} sentences")
    positives = [i for i, label in enumerate(labels) if label == 1]
    return _build_summary(doc, _take_within_budget(doc, positives, budget))
