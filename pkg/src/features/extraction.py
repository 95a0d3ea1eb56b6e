"""
The six sentence features.

Every feature lies in [0, 1]. Degenerate documents (a single sentence, or all
raw weights zero) get 0 for the affected feature rather than an undefined
value.
"""

import logging
import math
from typing import List, NamedTuple, Optional

import numpy as np

from src.errors import SchemaError
from src.features.context import DocumentFeatureContext
from src.preprocess.pipeline import Document

logger = logging.getLogger("gamsum.features.extraction")

FEATURE_NAMES = ("tf_isf", "position", "length", "proper_noun_ratio", "numeric_ratio", "similarity")


class FeatureVector(NamedTuple):
    """Features x1..x6 of one sentence."""

    tf_isf: float
    position: float
    length: float
    proper_noun_ratio: float
    numeric_ratio: float
    similarity: float


def _context(doc: Document, context: Optional[DocumentFeatureContext]) -> DocumentFeatureContext:
    return context if context is not None else DocumentFeatureContext.build(doc)


def _normalize_by_max(raw: np.ndarray) -> np.ndarray:
    top = raw.max() if raw.size else 0.0
    if top <= 0.0:
        return np.zeros_like(raw, dtype=np.float64)
    return np.clip(raw / top, 0.0, 1.0)


def _ratio(numerators: np.ndarray, denominators: np.ndarray) -> np.ndarray:
    out = np.zeros(len(denominators), dtype=np.float64)
    nonzero = denominators > 0
    out[nonzero] = numerators[nonzero] / denominators[nonzero]
    return out


def tf_isf(doc: Document, context: Optional[DocumentFeatureContext] = None) -> np.ndarray:
    """
    Bigram TF-ISF salience normalized by the document maximum.

    For each bigram occurrence in a sentence, adds F(b) * ln(n / n_b) where
    F(b) is the bigram's frequency in the document and n_b the number of
    sentences containing it.
    """
    ctx = _context(doc, context)
    raw = np.zeros(ctx.n, dtype=np.float64)
    for i, bigrams in enumerate(ctx.bigrams):
        raw[i] = math.fsum(
            ctx.bigram_frequency[b] * math.log(ctx.n / ctx.bigram_sentence_frequency[b]) for b in bigrams
        )
    return _normalize_by_max(raw)


def position(doc: Document, context: Optional[DocumentFeatureContext] = None) -> np.ndarray:
    """1-based sentence position over sentence count."""
    n = len(doc.sentences)
    return np.arange(1, n + 1, dtype=np.float64) / n


def length(doc: Document, context: Optional[DocumentFeatureContext] = None) -> np.ndarray:
    """Term count over the longest sentence's term count."""
    ctx = _context(doc, context)
    return _normalize_by_max(ctx.term_counts.astype(np.float64))


def proper_noun_ratio(doc: Document, context: Optional[DocumentFeatureContext] = None) -> np.ndarray:
    """Share of a sentence's terms flagged as proper nouns."""
    ctx = _context(doc, context)
    return _ratio(ctx.proper_noun_counts.astype(np.float64), ctx.term_counts.astype(np.float64))


def numeric_ratio(doc: Document, context: Optional[DocumentFeatureContext] = None) -> np.ndarray:
    """Share of a sentence's terms flagged as numeric."""
    ctx = _context(doc, context)
    return _ratio(ctx.numeric_counts.astype(np.float64), ctx.term_counts.astype(np.float64))


def sentence_similarity(doc: Document, context: Optional[DocumentFeatureContext] = None) -> np.ndarray:
    """
    Sum of cosine similarities to every other sentence, normalized by the maximum such sum.

    Self-similarity is excluded from both the sums and the maximum.
    """
    ctx = _context(doc, context)
    if ctx.n < 2:
        return np.zeros(ctx.n, dtype=np.float64)
    off_diagonal = ctx.cosine.copy()
    np.fill_diagonal(off_diagonal, 0.0)
    sums = np.array([math.fsum(row) for row in off_diagonal], dtype=np.float64)
    return _normalize_by_max(sums)


def extract_features(doc: Document) -> np.ndarray:
    """
    Compute the feature matrix of a document.

    Args:
        doc: Preprocessed document

    Returns:
        Array of shape (sentence count, 6), columns in FEATURE_NAMES order
    """
    ctx = DocumentFeatureContext.build(doc)
    columns = [
        tf_isf(doc, ctx),
        position(doc, ctx),
        length(doc, ctx),
        proper_noun_ratio(doc, ctx),
        numeric_ratio(doc, ctx),
        sentence_similarity(doc, ctx),
    ]
    matrix = np.column_stack(columns).astype(np.float64)
    if not np.all(np.isfinite(matrix)):
        raise SchemaError(f"non-finite feature value in document '{doc.id}'")
    return matrix


def feature_vectors(doc: Document) -> List[FeatureVector]:
    """``extract_features`` as one FeatureVector per sentence."""
    return [FeatureVector(*(float(v) for v in row)) for row in extract_features(doc)]
