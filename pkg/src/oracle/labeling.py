"""
Extractive oracle labels and class balancing.

Labels come from greedy forward selection maximizing the mean of ROUGE-1 F
and ROUGE-2 F between the selected sentences and the reference summary.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import BalancingError, LabelingError
from src.features.extraction import FEATURE_NAMES, FeatureVector
from src.preprocess.pipeline import Document
from src.rouge.scorer import RougeScore, tokenize
from src.summarizer.budget import BudgetKind, SummaryBudget
from src.utils.seeding import derive_rng

logger = logging.getLogger("gamsum.oracle.labeling")


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[k : k + n]) for k in range(len(tokens) - n + 1))


def _f1(candidate: Counter, reference: Counter, reference_total: int) -> float:
    overlap = sum((candidate & reference).values())
    return RougeScore.from_counts(overlap, sum(candidate.values()), reference_total).f1


def oracle_objective(
    selected: Sequence[int],
    sentence_tokens: Sequence[Sequence[str]],
    reference_tokens: Sequence[Sequence[str]],
) -> float:
    """
    Mean of ROUGE-1 F and ROUGE-2 F for a set of sentences.

    Args:
        selected: Sentence indices
        sentence_tokens: ROUGE tokens per document sentence
        reference_tokens: ROUGE tokens per reference sentence

    Returns:
        The objective value in [0, 1]
    """
    scores = []
    for n in (1, 2):
        reference = Counter()
        for tokens in reference_tokens:
            reference.update(_ngrams(tokens, n))
        candidate = Counter()
        for i in selected:
            candidate.update(_ngrams(sentence_tokens[i], n))
        scores.append(_f1(candidate, reference, sum(reference.values())))
    return (scores[0] + scores[1]) / 2.0


def greedy_oracle_labels(doc: Document, budget: SummaryBudget) -> List[int]:
    """
    Label the sentences a greedy ROUGE-maximizing oracle would extract.

    Each step adds the sentence with the largest objective gain (ties go to
    the earlier sentence). Selection stops when no sentence gives a positive
    gain or the budget is exhausted. Under a word budget only sentences that
    still fit are considered.

    Args:
        doc: Preprocessed document with a reference summary
        budget: Sentence or word budget

    Returns:
        0/1 label per sentence

    Raises:
        LabelingError: The reference summary is empty
    """
    reference_tokens = [tokenize(s) for s in doc.reference_text]
    if not any(reference_tokens):
        raise LabelingError(f"document '{doc.id}' has an empty reference summary")

    sentence_tokens = [tokenize(s.raw) for s in doc.sentences]
    word_counts = [s.term_count for s in doc.sentences]
    n = len(doc.sentences)

    selected: List[int] = []
    best = 0.0
    words_used = 0
    while True:
        if budget.kind is BudgetKind.SENTENCES and len(selected) >= budget.limit:
            break
        step_best = best
        step_choice = -1
        for i in range(n):
            if i in selected:
                continue
            if budget.kind is BudgetKind.WORDS and words_used + word_counts[i] > budget.limit:
                continue
            value = oracle_objective(selected + [i], sentence_tokens, reference_tokens)
            if value > step_best:
                step_best = value
                step_choice = i
        if step_choice < 0:
            break
        selected.append(step_choice)
        words_used += word_counts[step_choice]
        best = step_best

    labels = [0] * n
    for i in selected:
        labels[i] = 1
    if not selected:
        logger.debug(f"Document {doc.id}: oracle selected no sentence")
    return labels


def document_labels(doc: Document, budget: SummaryBudget) -> List[int]:
    """Pre-assigned labels when the corpus carries them, greedy oracle labels otherwise."""
    if doc.labels is not None:
        return list(doc.labels)
    return greedy_oracle_labels(doc, budget)


@dataclass(frozen=True)
class LabeledSentence:
    """One training example."""

    doc_id: str
    sentence_index: int
    features: FeatureVector
    label: int


@dataclass(frozen=True)
class TrainingSet:
    """Aligned arrays of labeled sentences."""

    doc_ids: np.ndarray
    sentence_indices: np.ndarray
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.labels)
        if not (len(self.doc_ids) == len(self.sentence_indices) == self.features.shape[0] == n):
            raise ValueError("training set arrays must be aligned")
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D array")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def class_counts(self) -> Tuple[int, int]:
        """(negative count, positive count)."""
        positives = int(np.sum(self.labels == 1))
        return len(self.labels) - positives, positives

    @classmethod
    def from_arrays(
        cls,
        features: np.ndarray,
        labels: Sequence[int],
        doc_ids: Optional[Sequence[str]] = None,
        sentence_indices: Optional[Sequence[int]] = None,
    ) -> "TrainingSet":
        features = np.asarray(features, dtype=np.float64)
        n = features.shape[0]
        return cls(
            doc_ids=np.asarray(doc_ids if doc_ids is not None else [""] * n, dtype=object),
            sentence_indices=np.asarray(
                sentence_indices if sentence_indices is not None else np.arange(n), dtype=np.int64
            ),
            features=features,
            labels=np.asarray(labels, dtype=np.int64),
        )

    @classmethod
    def from_documents(cls, rows: Sequence[Tuple[str, np.ndarray, Sequence[int]]]) -> "TrainingSet":
        """Concatenate (doc_id, feature matrix, labels) per document in the given order."""
        if not rows:
            return cls.from_arrays(np.zeros((0, len(FEATURE_NAMES))), [])
        doc_ids: List[str] = []
        indices: List[int] = []
        for doc_id, matrix, _ in rows:
            doc_ids.extend([doc_id] * matrix.shape[0])
            indices.extend(range(matrix.shape[0]))
        features = np.vstack([matrix for _, matrix, _ in rows])
        labels = np.concatenate([np.asarray(lab, dtype=np.int64) for _, _, lab in rows])
        return cls.from_arrays(features, labels, doc_ids, indices)

    def take(self, rows: np.ndarray) -> "TrainingSet":
        return TrainingSet(
            doc_ids=self.doc_ids[rows],
            sentence_indices=self.sentence_indices[rows],
            features=self.features[rows],
            labels=self.labels[rows],
        )

    def sentences(self) -> List[LabeledSentence]:
        return [
            LabeledSentence(
                doc_id=str(self.doc_ids[k]),
                sentence_index=int(self.sentence_indices[k]),
                features=FeatureVector(*(float(v) for v in self.features[k])),
                label=int(self.labels[k]),
            )
            for k in range(len(self))
        ]


def undersample(training_set: TrainingSet, seed: int) -> TrainingSet:
    """
    Randomly drop majority-class rows until both classes have equal counts.

    Minority rows are all kept; the kept rows stay in their original order.

    Args:
        training_set: Labeled rows from the whole training split
        seed: Root seed

    Returns:
        The balanced set

    Raises:
        BalancingError: One class is absent
    """
    negatives, positives = training_set.class_counts
    if negatives == 0 or positives == 0:
        raise BalancingError(f"both classes are needed to balance, got {negatives} negative / {positives} positive")

    majority_label = 0 if negatives > positives else 1
    minority_count = min(negatives, positives)
    majority_rows = np.flatnonzero(training_set.labels == majority_label)
    minority_rows = np.flatnonzero(training_set.labels != majority_label)

    rng = derive_rng(seed, "undersample")
    chosen = rng.choice(majority_rows, size=minority_count, replace=False)
    kept = np.sort(np.concatenate([minority_rows, chosen]))
    logger.info(f"Undersampled {len(training_set)} rows to {len(kept)} ({minority_count} per class)")
    return training_set.take(kept)
