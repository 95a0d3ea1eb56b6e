"""
Shared fixtures for the GAMSum test suite.
"""

import os
import sys
from pathlib import Path
from typing import Dict, List

import pytest

# Add the repository root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.corpus.loader import load_corpus
from src.corpus.models import RawDocument
from src.preprocess.pipeline import Document, preprocess_document
from src.testing.framework import PlantedData, planted_additive, planted_interaction

FIXTURES_DIR = Path(__file__).parent / "fixtures"
MINI_CORPUS = FIXTURES_DIR / "mini_corpus.jsonl"
GOLDEN_CORPUS = FIXTURES_DIR / "golden_corpus.jsonl"


@pytest.fixture(scope="session")
def mini_corpus_path() -> Path:
    return MINI_CORPUS


@pytest.fixture(scope="session")
def mini_corpus_raw() -> List[RawDocument]:
    return load_corpus(MINI_CORPUS)


@pytest.fixture(scope="session")
def mini_corpus_docs(mini_corpus_raw: List[RawDocument]) -> List[Document]:
    return [preprocess_document(raw) for raw in mini_corpus_raw]


@pytest.fixture(scope="session")
def golden_docs() -> Dict[str, Document]:
    """Hand-evaluated documents keyed by id."""
    return {raw.id: preprocess_document(raw) for raw in load_corpus(GOLDEN_CORPUS)}


@pytest.fixture(scope="session")
def additive_data() -> PlantedData:
    """Two true features plus two noise features."""
    return planted_additive(n=5000, seed=11)


@pytest.fixture(scope="session")
def interaction_data() -> PlantedData:
    """Six features, (0, 1) interacting."""
    return planted_interaction(n=20000, seed=3)
