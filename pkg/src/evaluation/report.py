"""
Corpus-level evaluation: mean ROUGE F over documents and sentence-selection F1.

Means are arithmetic over documents, accumulated with ``math.fsum`` so the
result does not depend on document order.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import pandas as pd

from src.errors import PairingError
from src.rouge.scorer import score_all, tokenize_sentences
from src.summarizer.selection import Summary

logger = logging.getLogger("gamsum.evaluation")

ROUGE_METRICS = ("rouge1", "rouge2", "rougeL")
ZERO_F1_NOTICE = "zero-f1: no sentence selected and no positive label; F1 defined as 0"


class F1Average(Enum):
    """How sentence-selection F1 is aggregated over documents."""

    MICRO = "micro"
    MACRO = "macro"


def _check_pairing(left: Iterable[str], right: Iterable[str], what: str) -> List[str]:
    left, right = list(left), list(right)
    for name, ids in (("summaries", left), (what, right)):
        if len(set(ids)) != len(ids):
            raise PairingError(f"duplicate document ids in {name}")
    missing = sorted(set(right) - set(left))
    extra = sorted(set(left) - set(right))
    if missing or extra:
        raise PairingError(f"document ids do not pair up: missing summaries for {missing[:5]}, no {what} for {extra[:5]}")
    return sorted(left)


def per_document_rouge(
    summaries: Sequence[Summary],
    references: Mapping[str, Sequence[str]],
    stem: bool = False,
) -> pd.DataFrame:
    """
    ROUGE F of every summary against its reference sentences.

    Args:
        summaries: One summary per document
        references: Reference sentences keyed by document id
        stem: Porter-stem tokens before matching

    Returns:
        Frame indexed by doc_id with one column per ROUGE metric, sorted by id

    Raises:
        PairingError: Summary and reference ids differ
    """
    by_id = {s.doc_id: s for s in summaries}
    ids = _check_pairing([s.doc_id for s in summaries], references.keys(), "references")
    rows = []
    for doc_id in ids:
        scores = score_all(
            tokenize_sentences(by_id[doc_id].sentences, stem=stem),
            tokenize_sentences(references[doc_id], stem=stem),
        )
        rows.append({"doc_id": doc_id, **{metric: scores[metric].f1 for metric in ROUGE_METRICS}})
    return pd.DataFrame(rows, columns=["doc_id", *ROUGE_METRICS]).set_index("doc_id")


def _rouge_means(frame: pd.DataFrame) -> Dict[str, float]:
    if frame.empty:
        return {metric: 0.0 for metric in ROUGE_METRICS}
    return {metric: math.fsum(frame[metric].tolist()) / len(frame) for metric in ROUGE_METRICS}


def evaluate_rouge(
    summaries: Sequence[Summary],
    references: Mapping[str, Sequence[str]],
    stem: bool = False,
) -> Dict[str, float]:
    """Mean ROUGE-1/2/L F over the paired documents."""
    return _rouge_means(per_document_rouge(summaries, references, stem))


def _f1(tp: int, n_selected: int, n_positive: int) -> float:
    if tp == 0:
        return 0.0
    precision = tp / n_selected
    recall = tp / n_positive
    return 2.0 * precision * recall / (precision + recall)


def selection_counts(
    selected: Mapping[str, Iterable[int]],
    oracle_labels: Mapping[str, Sequence[int]],
) -> pd.DataFrame:
    """True positives, selected count and positive count per document."""
    ids = _check_pairing(selected.keys(), oracle_labels.keys(), "labels")
    rows = []
    for doc_id in ids:
        chosen = set(int(i) for i in selected[doc_id])
        positives = {i for i, label in enumerate(oracle_labels[doc_id]) if label == 1}
        rows.append(
            {"doc_id": doc_id, "tp": len(chosen & positives), "selected": len(chosen), "positive": len(positives)}
        )
    return pd.DataFrame(rows, columns=["doc_id", "tp", "selected", "positive"]).set_index("doc_id")


def sentence_f1(
    selected: Mapping[str, Iterable[int]],
    oracle_labels: Mapping[str, Sequence[int]],
    average: Union[F1Average, str] = F1Average.MICRO,
    notices: Optional[List[str]] = None,
) -> float:
    """
    Sentence-selection F1 against oracle labels.

    Args:
        selected: Selected sentence indices keyed by document id
        oracle_labels: 0/1 labels keyed by document id
        average: micro (pooled counts over all sentences) or macro (mean of per-document F1)
        notices: Receives the zero-denominator notice when it applies

    Returns:
        F1 in [0, 1]

    Raises:
        PairingError: Document ids differ
    """
    average = F1Average(average)
    counts = selection_counts(selected, oracle_labels)
    if average is F1Average.MICRO:
        tp, n_selected, n_positive = (int(counts[c].sum()) for c in ("tp", "selected", "positive"))
        if n_selected == 0 and n_positive == 0:
            logger.warning(ZERO_F1_NOTICE)
            if notices is not None:
                notices.append(ZERO_F1_NOTICE)
        return _f1(tp, n_selected, n_positive)

    if counts.empty:
        return 0.0
    per_doc = [_f1(int(r.tp), int(r.selected), int(r.positive)) for r in counts.itertuples()]
    if any(r.selected == 0 and r.positive == 0 for r in counts.itertuples()):
        logger.warning(ZERO_F1_NOTICE)
        if notices is not None:
            notices.append(ZERO_F1_NOTICE)
    return math.fsum(per_doc) / len(per_doc)


@dataclass
class EvalReport:
    """Corpus means, sentence F1 and the per-document breakdown."""

    name: str
    rouge: Dict[str, float]
    f1: Optional[float]
    per_document: pd.DataFrame
    notices: List[str] = field(default_factory=list)

    @property
    def n_documents(self) -> int:
        return len(self.per_document)

    def metrics(self) -> Dict[str, float]:
        values = dict(self.rouge)
        if self.f1 is not None:
            values["f1"] = self.f1
        return values

    def to_table(self) -> str:
        """Aligned text table in percent with two decimals."""
        row = {metric: 100.0 * value for metric, value in self.metrics().items()}
        frame = pd.DataFrame([row], index=pd.Index([self.name], name="system"))
        return frame.to_string(float_format=lambda v: f"{v:.2f}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "documents": self.n_documents,
            "rouge": {metric: self.rouge[metric] for metric in ROUGE_METRICS},
            "f1": self.f1,
            "notices": list(self.notices),
            "per_document": self.per_document.reset_index().to_dict(orient="records"),
        }

    def write(self, json_path: Union[str, Path], table_path: Optional[Union[str, Path]] = None) -> None:
        with open(json_path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")
        if table_path is not None:
            Path(table_path).write_text(self.to_table() + "\n", encoding="utf-8")
        logger.info(f"Wrote evaluation report for {self.n_documents} documents to {json_path}")


def evaluate(
    summaries: Sequence[Summary],
    references: Mapping[str, Sequence[str]],
    oracle_labels: Optional[Mapping[str, Sequence[int]]] = None,
    name: str = "system",
    stem: bool = False,
    average: Union[F1Average, str] = F1Average.MICRO,
) -> EvalReport:
    """
    Score summaries against references and, when labels are given, the oracle.

    Returns:
        EvalReport whose per-document frame has ROUGE F and, with labels, tp/selected/positive
    """
    per_doc = per_document_rouge(summaries, references, stem)
    rouge = _rouge_means(per_doc)
    notices: List[str] = []
    f1 = None
    if oracle_labels is not None:
        selected = {s.doc_id: s.indices for s in summaries}
        f1 = sentence_f1(selected, oracle_labels, average, notices)
        per_doc = per_doc.join(selection_counts(selected, oracle_labels))
    empty = sum(1 for s in summaries if not s.indices)
    if empty:
        notices.append(f"{empty} empty summaries")
    logger.info(
        f"{name}: R1 {100 * rouge['rouge1']:.2f} R2 {100 * rouge['rouge2']:.2f} RL {100 * rouge['rougeL']:.2f}"
        + (f" F1 {100 * f1:.2f}" if f1 is not None else "")
    )
    return EvalReport(name, rouge, f1, per_doc, notices)
