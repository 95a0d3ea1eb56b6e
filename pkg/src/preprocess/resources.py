"""Bundled, versioned word lists for preprocessing."""

from functools import lru_cache
from pathlib import Path
from typing import FrozenSet

DATA_DIR = Path(__file__).parent / "data"
STOPWORDS_FILE = DATA_DIR / "stopwords_en_v1.txt"
ABBREVIATIONS_FILE = DATA_DIR / "abbreviations_en_v1.txt"


def _read_list(path: Path) -> FrozenSet[str]:
    entries = set()
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            entry = line.strip()
            if entry and not entry.startswith("#"):
                entries.add(entry.lower())
    return frozenset(entries)


@lru_cache(maxsize=None)
def stopwords() -> FrozenSet[str]:
    """The bundled English stopword list (lowercase)."""
    return _read_list(STOPWORDS_FILE)


@lru_cache(maxsize=None)
def abbreviations() -> FrozenSet[str]:
    """The bundled abbreviation list (lowercase, trailing period kept)."""
    return _read_list(ABBREVIATIONS_FILE)
