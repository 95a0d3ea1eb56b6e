"""
Token annotation: stems, stopword, proper-noun, numeric and punctuation flags.

Proper nouns are found by rule instead of statistical tagging: a token is a
proper noun iff it is capitalized, alphabetic, not a stopword, and either not
sentence-initial or seen capitalized in a non-initial position elsewhere in
the same document.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import AbstractSet, Iterable, List, Set

from nltk.stem.snowball import SnowballStemmer

from src.preprocess.resources import stopwords

_TOKEN = re.compile(
    r"""
    \d+[A-Za-z]\w*                          # ordinals and unit-suffixed numbers: 3rd, 10km
  | [+-]?\d+(?:,\d{3})*(?:\.\d+)?%?         # numbers
  | \w+(?:['’-]\w+)*                        # words, keeping internal apostrophes and hyphens
  | [^\w\s]+                                # punctuation and symbol runs
    """,
    re.VERBOSE,
)
_NUMERIC = re.compile(r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?%?")
_PUNCTUATION_CHARS = frozenset(".,;:!?'\"()[]{}-–—…/\\`‘’“”«»*|~^_")

_stemmer = SnowballStemmer("english")


@dataclass(frozen=True)
class Token:
    """One annotated token."""

    surface: str
    stem: str
    is_stopword: bool
    is_proper_noun: bool
    is_numeric: bool
    is_punctuation: bool

    @property
    def is_term(self) -> bool:
        """Terms are the non-punctuation tokens (stopwords included)."""
        return not self.is_punctuation

    @property
    def is_content(self) -> bool:
        """Content terms drop stopwords as well."""
        return not self.is_punctuation and not self.is_stopword


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Snowball English stem of a lowercased word; falls back to the word itself."""
    lowered = word.lower()
    stemmed = _stemmer.stem(lowered)
    return stemmed or lowered


def tokenize(text: str) -> List[str]:
    """Split text into whitespace/punctuation-delimited surface units."""
    return _TOKEN.findall(text)


def is_punctuation(surface: str) -> bool:
    """True when every character is sentence punctuation (symbols such as % are not)."""
    return bool(surface) and all(ch in _PUNCTUATION_CHARS for ch in surface)


def is_numeric(surface: str) -> bool:
    """Signed integer or decimal, optionally comma-grouped, optionally with a % suffix."""
    return _NUMERIC.fullmatch(surface) is not None


def is_stopword(surface: str) -> bool:
    """Case-insensitive lookup in the bundled stopword list."""
    return surface.lower().replace("’", "'") in stopwords()


def is_capitalized_word(surface: str) -> bool:
    """Alphabetic with an uppercase first letter."""
    return surface.isalpha() and surface[0].isupper()


def _first_term_position(surfaces: List[str]) -> int:
    for position, surface in enumerate(surfaces):
        if not is_punctuation(surface):
            return position
    return -1


def annotate(
    sentence_raw: str,
    sentence_initial: bool = True,
    capitalized_elsewhere: AbstractSet[str] = frozenset(),
) -> List[Token]:
    """
    Annotate a sentence.

    Args:
        sentence_raw: Raw sentence text
        sentence_initial: Whether the first term of the text starts a sentence
        capitalized_elsewhere: Surfaces seen capitalized in non-initial positions in the document

    Returns:
        One Token per surface unit, in order
    """
    surfaces = tokenize(sentence_raw)
    initial_position = _first_term_position(surfaces) if sentence_initial else -1

    tokens: List[Token] = []
    for position, surface in enumerate(surfaces):
        punctuation = is_punctuation(surface)
        if punctuation:
            tokens.append(Token(surface, surface, False, False, False, True))
            continue

        stopword = is_stopword(surface)
        numeric = is_numeric(surface)
        has_letters = any(ch.isalpha() for ch in surface)
        token_stem = stem(surface) if has_letters else surface.lower()

        proper = (
            is_capitalized_word(surface)
            and not stopword
            and (position != initial_position or surface in capitalized_elsewhere)
        )
        tokens.append(Token(surface, token_stem, stopword, proper, numeric, False))
    return tokens


def capitalized_non_initial(sentences_raw: Iterable[str]) -> Set[str]:
    """
    Collect surfaces that occur capitalized somewhere other than sentence start.

    Args:
        sentences_raw: The document's sentences

    Returns:
        Set of capitalized alphabetic surfaces seen in non-initial positions
    """
    found: Set[str] = set()
    for sentence in sentences_raw:
        surfaces = tokenize(sentence)
        initial_position = _first_term_position(surfaces)
        for position, surface in enumerate(surfaces):
            if position != initial_position and is_capitalized_word(surface):
                found.add(surface)
    return found
