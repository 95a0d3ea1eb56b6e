"""
Per-document statistics shared by the six sentence features.

The context is built once per document and never mutated afterwards.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from src.preprocess.pipeline import Document

Bigram = Tuple[str, str]


def sentence_bigrams(stems: List[str]) -> List[Bigram]:
    """Adjacent pairs of content-term stems, in order, with repeats."""
    return list(zip(stems, stems[1:]))


def cosine_matrix(count_vectors: List[Counter]) -> np.ndarray:
    """
    Pairwise cosine similarity of sparse count vectors.

    Rows with no counts get zero similarity to everything, themselves included.
    """
    terms = sorted(set().union(*count_vectors)) if count_vectors else []
    vocabulary: Dict[str, int] = {term: column for column, term in enumerate(terms)}

    dense = np.zeros((len(count_vectors), max(len(vocabulary), 1)), dtype=np.float64)
    for row, counts in enumerate(count_vectors):
        for term, count in counts.items():
            dense[row, vocabulary[term]] = count

    norms = np.linalg.norm(dense, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = dense / safe[:, None]
    cosine = unit @ unit.T
    # Symmetrize to remove rounding asymmetry from the matrix product.
    cosine = 0.5 * (cosine + cosine.T)
    nonempty = norms > 0
    cosine[np.ix_(nonempty, nonempty)] = np.clip(cosine[np.ix_(nonempty, nonempty)], 0.0, 1.0)
    np.fill_diagonal(cosine, np.where(nonempty, 1.0, 0.0))
    return cosine


@dataclass(frozen=True)
class DocumentFeatureContext:
    """Bigram frequencies, term counts and cosine similarities for one document."""

    n: int
    bigrams: Tuple[Tuple[Bigram, ...], ...]
    bigram_sentence_frequency: Dict[Bigram, int]
    bigram_frequency: Dict[Bigram, int]
    term_counts: np.ndarray
    proper_noun_counts: np.ndarray
    numeric_counts: np.ndarray
    cosine: np.ndarray

    @property
    def max_term_count(self) -> int:
        return int(self.term_counts.max()) if self.n else 0

    @classmethod
    def build(cls, doc: Document) -> "DocumentFeatureContext":
        """
        Collect the statistics for a preprocessed document.

        Args:
            doc: Document with at least one sentence

        Returns:
            The frozen context
        """
        per_sentence = tuple(tuple(sentence_bigrams(s.content_stems)) for s in doc.sentences)
        frequency: Counter = Counter()
        sentence_frequency: Counter = Counter()
        for bigrams in per_sentence:
            frequency.update(bigrams)
            sentence_frequency.update(set(bigrams))

        term_counts = np.array([s.term_count for s in doc.sentences], dtype=np.int64)
        proper = np.array([sum(t.is_proper_noun for t in s.terms) for s in doc.sentences], dtype=np.int64)
        numeric = np.array([sum(t.is_numeric for t in s.terms) for s in doc.sentences], dtype=np.int64)

        cosine = cosine_matrix([Counter(s.content_stems) for s in doc.sentences])
        for array in (term_counts, proper, numeric, cosine):
            array.setflags(write=False)

        return cls(
            n=len(doc.sentences),
            bigrams=per_sentence,
            bigram_sentence_frequency=dict(sentence_frequency),
            bigram_frequency=dict(frequency),
            term_counts=term_counts,
            proper_noun_counts=proper,
            numeric_counts=numeric,
            cosine=cosine,
        )
