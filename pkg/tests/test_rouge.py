"""
Tests for the native ROUGE implementation.
"""

import unittest

import numpy as np
import pytest

from src.rouge.scorer import RougeScore, lcs_length, rouge_l, rouge_n, score_all, tokenize, tokenize_sentences, union_lcs
from src.testing.framework import brute_force_lcs

VOCAB = ["a", "b", "c", "d"]


def _sentences(*texts: str):
    return tokenize_sentences(list(texts))


class TestRougeN(unittest.TestCase):
    """Tests for ROUGE-1 and ROUGE-2."""

    def test_cat_sat_cat_ran(self):
        candidate, reference = _sentences("the cat sat"), _sentences("the cat ran")
        one = rouge_n(candidate, reference, 1)
        two = rouge_n(candidate, reference, 2)
        for value in one:
            self.assertAlmostEqual(value, 2 / 3)
        for value in two:
            self.assertAlmostEqual(value, 1 / 2)

    def test_identical(self):
        text = _sentences("Storm closes the harbor.", "Ferries resume Monday.")
        self.assertEqual(rouge_n(text, text, 1), RougeScore(1.0, 1.0, 1.0))
        self.assertEqual(rouge_n(text, text, 2), RougeScore(1.0, 1.0, 1.0))

    def test_disjoint(self):
        self.assertEqual(rouge_n(_sentences("red fox"), _sentences("blue whale"), 1), RougeScore(0.0, 0.0, 0.0))

    def test_empty_sides(self):
        self.assertEqual(rouge_n([], _sentences("x y"), 1), RougeScore(0.0, 0.0, 0.0))
        self.assertEqual(rouge_n(_sentences("x y"), [], 2), RougeScore(0.0, 0.0, 0.0))

    def test_clipped_counts(self):
        """Test repeated candidate n-grams count at most as often as in the reference"""
        score = rouge_n(_sentences("the the the the"), _sentences("the cat"), 1)
        self.assertAlmostEqual(score.precision, 1 / 4)
        self.assertAlmostEqual(score.recall, 1 / 2)

    def test_bigrams_do_not_cross_sentences(self):
        score = rouge_n(_sentences("cat", "sat"), _sentences("cat sat"), 2)
        self.assertEqual(score.f1, 0.0)

    def test_bad_n(self):
        with self.assertRaises(ValueError):
            rouge_n(_sentences("a"), _sentences("a"), 3)


class TestRougeL:
    """Tests for summary-level ROUGE-L."""

    def test_cat_sat_cat_ran(self) -> None:
        score = rouge_l(_sentences("the cat sat"), _sentences("the cat ran"))
        assert score.precision == pytest.approx(2 / 3)
        assert score.recall == pytest.approx(2 / 3)
        assert score.f1 == pytest.approx(2 / 3)

    def test_identical(self) -> None:
        text = _sentences("Storm closes the harbor.", "Ferries resume Monday.")
        assert rouge_l(text, text) == RougeScore(1.0, 1.0, 1.0)

    def test_union_lcs(self) -> None:
        """Test the union of LCS hits across two candidate sentences."""
        reference = ["w1", "w2", "w3", "w4", "w5"]
        candidate = [["w1", "w2", "w6", "w7", "w8"], ["w1", "w3", "w8", "w9", "w5"]]
        assert union_lcs(reference, candidate) == ["w1", "w2", "w3", "w5"]
        score = rouge_l(candidate, [reference])
        assert score.recall == pytest.approx(4 / 5)
        assert score.precision == pytest.approx(4 / 10)

    def test_hits_are_clipped(self) -> None:
        """Test a candidate token cannot be matched by more reference tokens than it occurs."""
        score = rouge_l([["x"]], [["x", "y"], ["x", "z"]])
        assert score.precision == 1.0
        assert score.recall == pytest.approx(1 / 4)

    def test_single_sentences_equal_lcs_brute_force(self) -> None:
        rng = np.random.default_rng(23)
        for _ in range(1000):
            a = [VOCAB[k] for k in rng.integers(0, len(VOCAB), size=int(rng.integers(0, 11)))]
            b = [VOCAB[k] for k in rng.integers(0, len(VOCAB), size=int(rng.integers(0, 11)))]
            expected = brute_force_lcs(a, b)
            assert lcs_length(a, b) == expected
            score = rouge_l([a], [b])
            assert score.recall == pytest.approx(expected / len(b) if b else 0.0)
            assert score.precision == pytest.approx(expected / len(a) if a else 0.0)


class TestLcs(unittest.TestCase):
    """Tests for lcs_length."""

    def test_examples(self):
        self.assertEqual(lcs_length(list("abcbdab"), list("bdcaba")), 4)
        self.assertEqual(lcs_length([], ["a"]), 0)
        self.assertEqual(lcs_length(["a", "b"], ["a", "b"]), 2)

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            a = [VOCAB[k] for k in rng.integers(0, 4, size=int(rng.integers(0, 15)))]
            b = [VOCAB[k] for k in rng.integers(0, 4, size=int(rng.integers(0, 15)))]
            self.assertEqual(lcs_length(a, b), lcs_length(b, a))
            self.assertLessEqual(lcs_length(a, b), min(len(a), len(b)))


def test_rouge_n_f1_symmetric() -> None:
    rng = np.random.default_rng(8)
    for _ in range(200):
        a = [[VOCAB[k] for k in rng.integers(0, 4, size=int(rng.integers(1, 9)))]]
        b = [[VOCAB[k] for k in rng.integers(0, 4, size=int(rng.integers(1, 9)))]]
        for n in (1, 2):
            forward, backward = rouge_n(a, b, n), rouge_n(b, a, n)
            assert forward.f1 == pytest.approx(backward.f1)
            assert forward.precision == pytest.approx(backward.recall)


def test_appending_reference_ngram_never_lowers_recall() -> None:
    rng = np.random.default_rng(9)
    for _ in range(200):
        reference = [[VOCAB[k] for k in rng.integers(0, 4, size=6)]]
        candidate = [[VOCAB[k] for k in rng.integers(0, 4, size=4)]]
        for n in (1, 2):
            start = int(rng.integers(0, 6 - n + 1))
            extended = candidate + [reference[0][start : start + n]]
            assert rouge_n(extended, reference, n).recall >= rouge_n(candidate, reference, n).recall


def test_tokenize() -> None:
    assert tokenize("The U.S. economy grew 2.5%!") == ["the", "u", "s", "economy", "grew", "2", "5"]
    assert tokenize("Running dogs", stem=True) == ["run", "dog"]
    assert score_all(_sentences("a b"), _sentences("a b")).keys() == {"rouge1", "rouge2", "rougeL"}


def test_agrees_with_rouge_score_package() -> None:
    """Test single-sentence scores against the rouge-score package when installed."""
    rouge_scorer = pytest.importorskip("rouge_score.rouge_scorer")
    scorer = rouge_scorer.RougeScorer(["rouge1", "rouge2", "rougeL"], use_stemmer=False)
    pairs = [
        ("the cat sat on the mat", "the cat ran to the mat"),
        ("Police closed 3 roads after the storm.", "The storm closed roads, police said."),
        ("council votes on budget", "budget vote delayed by council"),
    ]
    for candidate, reference in pairs:
        ours = score_all(_sentences(candidate), _sentences(reference))
        theirs = scorer.score(reference, candidate)
        for key in ("rouge1", "rouge2", "rougeL"):
            assert ours[key].f1 == pytest.approx(theirs[key].fmeasure, abs=1e-9)
