"""Sentence segmentation, token annotation and document assembly."""

from src.preprocess.annotator import Token, annotate
from src.preprocess.pipeline import Document, Sentence, preprocess_document
from src.preprocess.segmenter import segment_sentences

__all__ = ["Token", "annotate", "Document", "Sentence", "preprocess_document", "segment_sentences"]
