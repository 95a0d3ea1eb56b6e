"""
Document preprocessing: segmentation, annotation and sentence assembly.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.corpus.models import RawDocument
from src.errors import EmptyDocumentError
from src.preprocess.annotator import Token, annotate, capitalized_non_initial
from src.preprocess.segmenter import segment_sentences

logger = logging.getLogger("gamsum.preprocess.pipeline")


@dataclass(frozen=True)
class Sentence:
    """An annotated sentence at a fixed position in its document."""

    index: int
    raw: str
    tokens: Tuple[Token, ...]
    content_terms: Tuple[Token, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "content_terms", tuple(t for t in self.tokens if t.is_content))

    @property
    def terms(self) -> Tuple[Token, ...]:
        """Non-punctuation tokens, stopwords included."""
        return tuple(t for t in self.tokens if t.is_term)

    @property
    def term_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_term)

    @property
    def content_stems(self) -> List[str]:
        return [t.stem for t in self.content_terms]


@dataclass(frozen=True)
class Document:
    """A preprocessed document with contiguous sentence indices 0..n-1."""

    id: str
    sentences: Tuple[Sentence, ...]
    reference_sentences: Tuple[Sentence, ...]
    labels: Optional[Tuple[int, ...]] = None

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def reference_text(self) -> List[str]:
        return [s.raw for s in self.reference_sentences]


def _annotate_all(raw_sentences: List[str]) -> List[Tuple[str, Tuple[Token, ...]]]:
    context = frozenset(capitalized_non_initial(raw_sentences))
    return [
        (raw, tuple(annotate(raw, sentence_initial=True, capitalized_elsewhere=context)))
        for raw in raw_sentences
    ]


def preprocess_sentences(raw_sentences: List[str]) -> List[Sentence]:
    """
    Annotate already-segmented sentences, dropping those without terms.

    Args:
        raw_sentences: Sentence strings in document order

    Returns:
        Sentences re-indexed from 0
    """
    annotated = _annotate_all([s.strip() for s in raw_sentences if s.strip()])
    kept = [(raw, tokens) for raw, tokens in annotated if any(t.is_term for t in tokens)]
    return [Sentence(index=i, raw=raw, tokens=tokens) for i, (raw, tokens) in enumerate(kept)]


def preprocess_document(raw: RawDocument) -> Document:
    """
    Segment and annotate a raw document and its reference summary.

    Args:
        raw: The ingested document

    Returns:
        The preprocessed document; pre-assigned labels stay aligned with kept sentences

    Raises:
        EmptyDocumentError: No sentence carries a single term
    """
    if raw.is_presegmented:
        parts = list(raw.body)
        part_labels = list(raw.labels) if raw.labels is not None else None
    else:
        parts = segment_sentences(raw.body)
        part_labels = None

    # Strip and annotate in place so labels can follow the kept positions.
    stripped = [p.strip() for p in parts]
    annotated = _annotate_all(stripped)

    sentences: List[Sentence] = []
    labels: List[int] = []
    for position, (text, tokens) in enumerate(annotated):
        if not text or not any(t.is_term for t in tokens):
            continue
        sentences.append(Sentence(index=len(sentences), raw=text, tokens=tokens))
        if part_labels is not None:
            labels.append(part_labels[position])

    if not sentences:
        raise EmptyDocumentError(f"document '{raw.id}' has no sentences with terms")

    dropped = len(parts) - len(sentences)
    if dropped:
        logger.debug(f"Document {raw.id}: dropped {dropped} sentences without terms")

    reference = preprocess_sentences(raw.reference)
    return Document(
        id=raw.id,
        sentences=tuple(sentences),
        reference_sentences=tuple(reference),
        labels=tuple(labels) if part_labels is not None else None,
    )
