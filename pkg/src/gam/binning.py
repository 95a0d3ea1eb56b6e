"""
Quantile binning of feature columns.

A column with at most ``max_bins`` distinct values gets one bin per value
(cuts at midpoints between neighbours). Otherwise cuts sit at the empirical
quantiles k / max_bins, with duplicates merged. Values map to bins by
right-sided search over the cuts, so anything outside the training range
lands in an edge bin.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from src.errors import SchemaError


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


def _column_cuts(column: np.ndarray, max_bins: int) -> np.ndarray:
    unique = np.unique(column)
    if unique.size <= 1:
        return np.zeros(0, dtype=np.float64)
    if unique.size <= max_bins:
        return (unique[:-1] + unique[1:]) / 2.0
    levels = np.arange(1, max_bins, dtype=np.float64) / max_bins
    cuts = np.unique(np.quantile(column, levels))
    return cuts[cuts > unique[0]]


@dataclass(frozen=True)
class Binner:
    """Per-feature cut points plus the observed training range."""

    cuts: Tuple[np.ndarray, ...]
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self) -> None:
        for f, cuts in enumerate(self.cuts):
            if cuts.size > 1 and not np.all(np.diff(cuts) > 0):
                raise ValueError(f"cut points of feature {f} are not strictly increasing")

    @property
    def n_features(self) -> int:
        return len(self.cuts)

    def n_bins(self, feature: int) -> int:
        return int(self.cuts[feature].size + 1)

    def bin_counts(self) -> List[int]:
        return [self.n_bins(f) for f in range(self.n_features)]

    def edges(self, feature: int) -> np.ndarray:
        """Bin boundaries [min, cuts..., max]."""
        cuts = self.cuts[feature]
        low = min(self.mins[feature], cuts[0]) if cuts.size else self.mins[feature]
        high = max(self.maxs[feature], cuts[-1]) if cuts.size else self.maxs[feature]
        return np.concatenate([[low], cuts, [high]])

    def centers(self, feature: int) -> np.ndarray:
        """Midpoint of each bin; each center falls in its own bin."""
        edges = self.edges(feature)
        return (edges[:-1] + edges[1:]) / 2.0

    def transform_column(self, values: np.ndarray, feature: int) -> np.ndarray:
        return np.searchsorted(self.cuts[feature], values, side="right").astype(np.int64)

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        """
        Map feature values to bin indices.

        Args:
            matrix: Array of shape (n, n_features) or (n_features,)

        Returns:
            Integer array of the same shape
        """
        matrix = np.asarray(matrix, dtype=np.float64)
        single = matrix.ndim == 1
        rows = matrix.reshape(1, -1) if single else matrix
        if rows.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {rows.shape[1]}")
        bins = np.empty(rows.shape, dtype=np.int64)
        for f in range(self.n_features):
            bins[:, f] = self.transform_column(rows[:, f], f)
        return bins[0] if single else bins

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cuts": [[float(c) for c in cuts] for cuts in self.cuts],
            "mins": [float(v) for v in self.mins],
            "maxs": [float(v) for v in self.maxs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Binner":
        return cls(
            cuts=tuple(_readonly(np.asarray(c, dtype=np.float64)) for c in data["cuts"]),
            mins=_readonly(np.asarray(data["mins"], dtype=np.float64)),
            maxs=_readonly(np.asarray(data["maxs"], dtype=np.float64)),
        )


def fit_binner(matrix: np.ndarray, max_bins: int = 256) -> Binner:
    """
    Fit quantile cut points for every feature column.

    Args:
        matrix: Training rows, shape (n, d) with n >= 1
        max_bins: Upper bound on bins per feature, at least 2

    Returns:
        The fitted binner; a constant feature gets a single bin
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 1:
        raise ValueError("fit_binner needs a 2-D matrix with at least one row")
    if max_bins < 2:
        raise ValueError(f"max_bins must be >= 2, got {max_bins}")
    if not np.all(np.isfinite(matrix)):
        raise SchemaError(f"fit_binner needs finite values, got {int(np.sum(~np.isfinite(matrix)))} non-finite")

    cuts = tuple(_readonly(_column_cuts(matrix[:, f], max_bins)) for f in range(matrix.shape[1]))
    return Binner(cuts=cuts, mins=_readonly(matrix.min(axis=0)), maxs=_readonly(matrix.max(axis=0)))
