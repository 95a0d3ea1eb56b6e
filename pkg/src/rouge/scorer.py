"""
ROUGE-1/2/L with clipped overlaps and summary-level union-LCS.

Texts are handled as lists of sentences, each a list of tokens. Tokens are
lowercased alphanumeric runs; Porter stemming is optional.
"""

import re
from collections import Counter
from functools import lru_cache
from typing import Dict, List, NamedTuple, Sequence

from nltk.stem.porter import PorterStemmer

TokenSentences = Sequence[Sequence[str]]

_NON_ALNUM = re.compile(r"[^a-z0-9]+")
_porter = PorterStemmer()


class RougeScore(NamedTuple):
    """Precision, recall and balanced F1."""

    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: int, candidate_total: int, reference_total: int) -> "RougeScore":
        precision = overlap / candidate_total if candidate_total > 0 else 0.0
        recall = overlap / reference_total if reference_total > 0 else 0.0
        if precision > 0.0 and recall > 0.0:
            f1 = 2.0 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
        return cls(precision, recall, f1)


@lru_cache(maxsize=65536)
def _porter_stem(token: str) -> str:
    return _porter.stem(token) if len(token) > 3 else token


def tokenize(text: str, stem: bool = False) -> List[str]:
    """Lowercase and split on non-alphanumerics."""
    tokens = [t for t in _NON_ALNUM.split(text.lower()) if t]
    if stem:
        tokens = [_porter_stem(t) for t in tokens]
    return tokens


def tokenize_sentences(sentences: Sequence[str], stem: bool = False) -> List[List[str]]:
    """Tokenize each sentence, keeping sentence boundaries."""
    return [tokenize(s, stem=stem) for s in sentences]


def _ngram_counts(sentences: TokenSentences, n: int) -> Counter:
    counts: Counter = Counter()
    for tokens in sentences:
        counts.update(tuple(tokens[k : k + n]) for k in range(len(tokens) - n + 1))
    return counts


def rouge_n(candidate: TokenSentences, reference: TokenSentences, n: int = 1) -> RougeScore:
    """
    ROUGE-N over n-grams pooled from all sentences.

    Args:
        candidate: Candidate summary as token lists per sentence
        reference: Reference summary as token lists per sentence
        n: 1 or 2

    Returns:
        The score; empty sides give 0
    """
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    candidate_counts = _ngram_counts(candidate, n)
    reference_counts = _ngram_counts(reference, n)
    overlap = sum((candidate_counts & reference_counts).values())
    return RougeScore.from_counts(overlap, sum(candidate_counts.values()), sum(reference_counts.values()))


def _lcs_table(a: Sequence[str], b: Sequence[str]) -> List[List[int]]:
    rows, cols = len(a), len(b)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        ai = a[i - 1]
        previous, current = table[i - 1], table[i]
        for j in range(1, cols + 1):
            if ai == b[j - 1]:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
    return table


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence."""
    if not a or not b:
        return 0
    return _lcs_table(a, b)[len(a)][len(b)]


def _lcs_positions(reference: Sequence[str], candidate: Sequence[str]) -> List[int]:
    """Positions in ``reference`` on one longest common subsequence with ``candidate``."""
    table = _lcs_table(reference, candidate)
    i, j = len(reference), len(candidate)
    positions: List[int] = []
    while i > 0 and j > 0:
        if reference[i - 1] == candidate[j - 1]:
            positions.append(i - 1)
            i -= 1
            j -= 1
        elif table[i][j - 1] > table[i - 1][j]:
            j -= 1
        else:
            i -= 1
    positions.reverse()
    return positions


def union_lcs(reference_sentence: Sequence[str], candidate: TokenSentences) -> List[str]:
    """Reference tokens hit by the LCS with any candidate sentence, in reference order."""
    hit = set()
    for candidate_sentence in candidate:
        hit.update(_lcs_positions(reference_sentence, candidate_sentence))
    return [reference_sentence[k] for k in sorted(hit)]


def rouge_l(candidate: TokenSentences, reference: TokenSentences) -> RougeScore:
    """
    Summary-level ROUGE-L.

    For each reference sentence the union-LCS hits against all candidate
    sentences are counted, clipped by the token counts remaining on both sides.
    """
    reference_remaining = Counter(t for s in reference for t in s)
    candidate_remaining = Counter(t for s in candidate for t in s)
    reference_total = sum(reference_remaining.values())
    candidate_total = sum(candidate_remaining.values())

    hits = 0
    for reference_sentence in reference:
        for token in union_lcs(reference_sentence, candidate):
            if reference_remaining[token] > 0 and candidate_remaining[token] > 0:
                hits += 1
                reference_remaining[token] -= 1
                candidate_remaining[token] -= 1
    return RougeScore.from_counts(hits, candidate_total, reference_total)


def score_all(candidate: TokenSentences, reference: TokenSentences) -> Dict[str, RougeScore]:
    """ROUGE-1, ROUGE-2 and ROUGE-L keyed "rouge1", "rouge2", "rougeL"."""
    return {
        "rouge1": rouge_n(candidate, reference, 1),
        "rouge2": rouge_n(candidate, reference, 2),
        "rougeL": rouge_l(candidate, reference),
    }
