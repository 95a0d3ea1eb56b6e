"""
Rule-based sentence segmentation.

A boundary is placed after a run of ".", "!" or "?" (plus any closing quotes
or brackets) when it is followed by whitespace and then an uppercase letter,
a digit, or an opening quote. Boundaries after a listed abbreviation or a
single-letter initial are suppressed.
"""

import re
from typing import List

from src.preprocess.resources import abbreviations

_BOUNDARY = re.compile(r"[.!?]+[\"'”’)\]]*(?=\s+[\"'“‘(\[]?[A-Z0-9])")
_INITIAL = re.compile(r"[a-z]\.")
_LEADING_OPENERS = "\"'“‘(["


def _suppressed(candidate: str) -> bool:
    """True when ``candidate`` ends with an abbreviation or an initial."""
    words = candidate.split()
    if not words:
        return False
    last = words[-1].lower().lstrip(_LEADING_OPENERS)
    if not last.endswith("."):
        return False
    known = abbreviations()
    if last in known or _INITIAL.fullmatch(last):
        return True
    if len(words) >= 2:
        pair = f"{words[-2].lower().lstrip(_LEADING_OPENERS)} {last}"
        if pair in known:
            return True
    return False


def segment_sentences(body: str) -> List[str]:
    """
    Split raw text into sentences.

    Args:
        body: Raw document text

    Returns:
        Non-empty sentence strings in order; the whole body when no boundary applies
    """
    sentences: List[str] = []
    start = 0
    for match in _BOUNDARY.finditer(body):
        end = match.end()
        candidate = body[start:end]
        if _suppressed(candidate):
            continue
        sentence = candidate.strip()
        if sentence:
            sentences.append(sentence)
        start = end

    tail = body[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
