"""
The additive model shared by every trainer.

logit(x) = intercept + sum of main shapes + sum of pair shapes, each a lookup
into binned contribution tables. Terms are always summed in the same order
(intercept, mains by feature id, pairs lexicographically), so vectorized
prediction and per-term decomposition agree to the last bit.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from src.gam.binning import Binner

Pair = Tuple[int, int]

INTERCEPT = "intercept"


class TermKind(Enum):
    """Main effect or pairwise interaction."""

    MAIN = "main"
    PAIR = "pair"


class Term(NamedTuple):
    """A retained model term."""

    kind: TermKind
    features: Tuple[int, ...]
    name: str


def pair_name(feature_names: Sequence[str], pair: Pair) -> str:
    return f"{feature_names[pair[0]]} & {feature_names[pair[1]]}"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class AdditiveModel:
    """
    Binned generalized additive model with pairwise interactions and logistic link.

    ``mains`` maps a feature id to one contribution per bin of ``binner``.
    ``pairs`` maps (i, j), i < j, to a matrix indexed by the bins of
    ``pair_binner`` for features i and j.
    """

    intercept: float
    mains: Mapping[int, np.ndarray]
    pairs: Mapping[Pair, np.ndarray]
    binner: Binner
    pair_binner: Binner
    feature_names: Tuple[str, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        d = len(self.feature_names)
        if self.binner.n_features != d or self.pair_binner.n_features != d:
            raise ValueError("binners and feature names disagree on the feature count")
        if not np.isfinite(self.intercept):
            raise ValueError("intercept must be finite")

        mains: Dict[int, np.ndarray] = {}
        for f in sorted(self.mains):
            shape = _frozen(self.mains[f])
            if not 0 <= f < d:
                raise ValueError(f"main shape for unknown feature {f}")
            if shape.shape != (self.binner.n_bins(f),):
                raise ValueError(f"main shape {f} has {shape.shape}, expected ({self.binner.n_bins(f)},)")
            if not np.all(np.isfinite(shape)):
                raise ValueError(f"main shape {f} is not finite")
            mains[f] = shape

        pairs: Dict[Pair, np.ndarray] = {}
        for pair in sorted(self.pairs):
            i, j = pair
            if not (0 <= i < j < d):
                raise ValueError(f"pair {pair} must satisfy 0 <= i < j < {d}")
            surface = _frozen(self.pairs[pair])
            expected = (self.pair_binner.n_bins(i), self.pair_binner.n_bins(j))
            if surface.shape != expected:
                raise ValueError(f"pair shape {pair} has {surface.shape}, expected {expected}")
            if not np.all(np.isfinite(surface)):
                raise ValueError(f"pair shape {pair} is not finite")
            pairs[pair] = surface

        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "mains", mains)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def terms(self) -> List[Term]:
        """Retained terms in summation order."""
        out = [Term(TermKind.MAIN, (f,), self.feature_names[f]) for f in sorted(self.mains)]
        out += [Term(TermKind.PAIR, pair, pair_name(self.feature_names, pair)) for pair in sorted(self.pairs)]
        return out

    def _rows(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        rows = x.reshape(1, -1) if x.ndim == 1 else x
        if rows.ndim != 2 or rows.shape[1] != self.n_features:
            raise ValueError(f"expected rows of {self.n_features} features, got shape {x.shape}")
        return rows

    def term_contributions(self, x: np.ndarray) -> np.ndarray:
        """
        Per-term contributions.

        Args:
            x: Rows of shape (n, d) or a single row

        Returns:
            Array (n, len(terms())) in summation order
        """
        rows = self._rows(x)
        out = np.zeros((rows.shape[0], len(self.mains) + len(self.pairs)), dtype=np.float64)
        if self.mains:
            bins = self.binner.transform(rows)
            for column, f in enumerate(sorted(self.mains)):
                out[:, column] = self.mains[f][bins[:, f]]
        if self.pairs:
            pair_bins = self.pair_binner.transform(rows)
            offset = len(self.mains)
            for column, (i, j) in enumerate(sorted(self.pairs)):
                out[:, offset + column] = self.pairs[(i, j)][pair_bins[:, i], pair_bins[:, j]]
        return out

    def predict_logit(self, x: np.ndarray) -> np.ndarray:
        """
        Log-odds for each row (a float for a single row).

        The sum runs left to right over terms() after the intercept.
        """
        contributions = self.term_contributions(x)
        total = np.full(contributions.shape[0], self.intercept, dtype=np.float64)
        for column in range(contributions.shape[1]):
            total = total + contributions[:, column]
        if np.asarray(x).ndim == 1:
            return float(total[0])
        return total

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """Logistic of predict_logit."""
        logit = self.predict_logit(x)
        if isinstance(logit, float):
            return float(expit(logit))
        return expit(logit)

    def decompose(self, x: np.ndarray) -> Dict[str, float]:
        """
        Named contributions of a single row, intercept first.

        Adding the values left to right reproduces predict_logit(x) exactly.
        """
        row = np.asarray(x, dtype=np.float64)
        if row.ndim != 1:
            raise ValueError("decompose takes a single feature row")
        contributions = self.term_contributions(row)[0]
        out: Dict[str, float] = {INTERCEPT: self.intercept}
        for term, value in zip(self.terms(), contributions):
            out[term.name] = float(value)
        return out

    def replace(self, **changes: Any) -> "AdditiveModel":
        """Copy with some fields swapped."""
        values = {
            "intercept": self.intercept,
            "mains": dict(self.mains),
            "pairs": dict(self.pairs),
            "binner": self.binner,
            "pair_binner": self.pair_binner,
            "feature_names": self.feature_names,
            "metadata": dict(self.metadata),
        }
        values.update(changes)
        return AdditiveModel(**values)


def sum_terms(decomposition: Mapping[str, float]) -> float:
    """Add decomposed terms in their stored order."""
    total = 0.0
    first = True
    for value in decomposition.values():
        total = value if first else total + value
        first = False
    return total


def intercept_only(
    intercept: float,
    binner: Binner,
    feature_names: Sequence[str],
    pair_binner: Optional[Binner] = None,
) -> AdditiveModel:
    """A model with no shapes."""
    return AdditiveModel(
        intercept=intercept,
        mains={},
        pairs={},
        binner=binner,
        pair_binner=pair_binner if pair_binner is not None else binner,
        feature_names=tuple(feature_names),
    )


def center_model(
    model: AdditiveModel,
    x_train: np.ndarray,
    center_mains: bool = True,
    center_pairs: bool = True,
) -> AdditiveModel:
    """
    Shift shapes to zero training-weighted mean, moving the means into the intercept.

    Args:
        model: Model whose shapes may carry offsets
        x_train: Training rows defining the weights
        center_mains: Center main shapes (off leaves them bit-identical)
        center_pairs: Center pair shapes

    Returns:
        The centered model; predictions agree with ``model`` up to rounding
    """
    rows = np.asarray(x_train, dtype=np.float64)
    n = rows.shape[0]
    intercept = model.intercept
    mains: Dict[int, np.ndarray] = dict(model.mains)
    pairs: Dict[Pair, np.ndarray] = dict(model.pairs)

    if center_mains and model.mains:
        bins = model.binner.transform(rows)
        for f in sorted(model.mains):
            shape = model.mains[f]
            weights = np.bincount(bins[:, f], minlength=shape.size) / n
            mean = float(np.dot(weights, shape))
            mains[f] = shape - mean
            intercept += mean

    if center_pairs and model.pairs:
        pair_bins = model.pair_binner.transform(rows)
        for (i, j) in sorted(model.pairs):
            surface = model.pairs[(i, j)]
            flat = pair_bins[:, i] * surface.shape[1] + pair_bins[:, j]
            weights = np.bincount(flat, minlength=surface.size).reshape(surface.shape) / n
            mean = float(np.sum(weights * surface))
            pairs[(i, j)] = surface - mean
            intercept += mean

    return model.replace(intercept=intercept, mains=mains, pairs=pairs)
