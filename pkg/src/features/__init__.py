"""Sentence features x1..x6."""

from src.features.context import DocumentFeatureContext
from src.features.extraction import FEATURE_NAMES, FeatureVector, extract_features

__all__ = ["DocumentFeatureContext", "FEATURE_NAMES", "FeatureVector", "extract_features"]
