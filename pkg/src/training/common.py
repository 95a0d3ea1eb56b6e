"""Helpers shared by the trainers."""

from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import TrainingError
from src.features.extraction import FEATURE_NAMES
from src.oracle.labeling import TrainingSet


def default_feature_names(n_features: int) -> Tuple[str, ...]:
    """The six sentence-feature names, or x1..xd for other widths."""
    if n_features == len(FEATURE_NAMES):
        return FEATURE_NAMES
    return tuple(f"x{k + 1}" for k in range(n_features))


def resolve_feature_names(train: TrainingSet, feature_names: Optional[Sequence[str]]) -> Tuple[str, ...]:
    d = train.features.shape[1]
    names = tuple(feature_names) if feature_names is not None else default_feature_names(d)
    if len(names) != d:
        raise TrainingError(f"{len(names)} feature names for {d} feature columns")
    return names


def base_logit(labels: np.ndarray) -> float:
    """
    Log-odds of the positive rate.

    Raises:
        TrainingError: Only one class is present
    """
    labels = np.asarray(labels, dtype=np.float64)
    if labels.size == 0:
        raise TrainingError("training set is empty")
    rate = float(labels.mean())
    if rate <= 0.0 or rate >= 1.0:
        raise TrainingError(f"training labels contain a single class (positive rate {rate})")
    return float(np.log(rate / (1.0 - rate)))


def validation_arrays(train: TrainingSet, val: Optional[TrainingSet]) -> Tuple[np.ndarray, np.ndarray]:
    """Validation rows, falling back to the training rows when none are given."""
    if val is not None and len(val) > 0:
        return val.features, val.labels
    return train.features, train.labels
