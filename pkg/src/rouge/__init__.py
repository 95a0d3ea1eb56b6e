"""Native ROUGE scoring."""

from src.rouge.scorer import RougeScore, lcs_length, rouge_l, rouge_n, score_all, tokenize

__all__ = ["RougeScore", "lcs_length", "rouge_l", "rouge_n", "score_all", "tokenize"]
