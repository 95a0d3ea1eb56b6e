"""
Pairwise interaction screening on the residuals of a mains-only model.

For every pair of features the residuals y - p are tabulated on the
(bin_i, bin_j) grid of the pair binner. Each axis-aligned cut (v1, v2) splits
the grid into four quadrants; the squared-error reduction of fitting the
four quadrant means over the best additive fit on the same 2 x 2 table is

    (m00 - m01 - m10 + m11)^2 / (1/c00 + 1/c01 + 1/c10 + 1/c11)

A pair's strength is the best reduction over all cuts, per training row.
Cumulative sums over the grid make all cuts cost O(bins_i * bins_j).
"""

import itertools
import logging
from typing import Iterable, List, NamedTuple, Optional

import numpy as np
from scipy.special import expit

from src.gam.model import AdditiveModel, Pair

logger = logging.getLogger("gamsum.training.interactions")


class PairStrength(NamedTuple):
    pair: Pair
    strength: float


def _grid_sums(bins_i: np.ndarray, bins_j: np.ndarray, values: np.ndarray, shape) -> np.ndarray:
    flat = bins_i * shape[1] + bins_j
    return np.bincount(flat, weights=values, minlength=shape[0] * shape[1]).reshape(shape)


def _quadrants(cumulative: np.ndarray):
    """Quadrant totals for every interior cut, each of shape (B_i - 1, B_j - 1)."""
    total = cumulative[-1, -1]
    low_low = cumulative[:-1, :-1]
    low_i = cumulative[:-1, -1][:, None]
    low_j = cumulative[-1, :-1][None, :]
    low_high = low_i - low_low
    high_low = low_j - low_low
    high_high = total - low_low - low_high - high_low
    return low_low, low_high, high_low, high_high


def pair_strength(bins_i: np.ndarray, bins_j: np.ndarray, residuals: np.ndarray, n_bins_i: int, n_bins_j: int) -> float:
    """
    Best single-cut interaction gain of one pair, divided by the row count.

    Args:
        bins_i: Bin index of feature i per row
        bins_j: Bin index of feature j per row
        residuals: y - p per row
        n_bins_i: Bin count of feature i
        n_bins_j: Bin count of feature j

    Returns:
        Non-negative strength; 0 when either feature has a single bin
    """
    if n_bins_i < 2 or n_bins_j < 2 or residuals.size == 0:
        return 0.0
    shape = (n_bins_i, n_bins_j)
    counts = _grid_sums(bins_i, bins_j, np.ones_like(residuals), shape)
    sums = _grid_sums(bins_i, bins_j, residuals, shape)

    count_q = _quadrants(counts.cumsum(axis=0).cumsum(axis=1))
    sum_q = _quadrants(sums.cumsum(axis=0).cumsum(axis=1))

    occupied = np.ones_like(count_q[0], dtype=bool)
    for c in count_q:
        occupied &= c > 0.5
    if not occupied.any():
        return 0.0

    safe = [np.where(occupied, c, 1.0) for c in count_q]
    means = [s / c for s, c in zip(sum_q, safe)]
    contrast = means[0] - means[1] - means[2] + means[3]
    inverse = sum(1.0 / c for c in safe)
    gain = np.where(occupied, contrast * contrast / inverse, 0.0)
    return float(gain.max()) / residuals.size


def rank_interactions(
    model_mains: AdditiveModel,
    x: np.ndarray,
    y: np.ndarray,
    top_k: int,
    allowed_features: Optional[Iterable[int]] = None,
    base_logits: Optional[np.ndarray] = None,
) -> List[PairStrength]:
    """
    Rank feature pairs by interaction strength on the mains-model residuals.

    Args:
        model_mains: Finalized mains-only model; its pair binner defines the grid
        x: Training rows
        y: 0/1 labels
        top_k: Number of pairs to return
        allowed_features: When given, a pair needs at least one parent in this set
        base_logits: Logits to take residuals from instead of the model's own

    Returns:
        Up to ``top_k`` pairs, strongest first, ties in lexicographic pair order
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[1]
    if top_k <= 0 or d < 2:
        return []

    logits = model_mains.predict_logit(x) if base_logits is None else np.asarray(base_logits, dtype=np.float64)
    residuals = np.asarray(y, dtype=np.float64) - expit(logits)
    bins = model_mains.pair_binner.transform(x)
    allowed = None if allowed_features is None else set(allowed_features)

    ranked: List[PairStrength] = []
    for i, j in itertools.combinations(range(d), 2):
        if allowed is not None and i not in allowed and j not in allowed:
            continue
        strength = pair_strength(
            bins[:, i], bins[:, j], residuals, model_mains.pair_binner.n_bins(i), model_mains.pair_binner.n_bins(j)
        )
        ranked.append(PairStrength((i, j), strength))

    ranked.sort(key=lambda item: (-item.strength, item.pair))
    selected = ranked[:top_k]
    logger.info(
        "Top interactions: " + ", ".join(f"{p.pair}={p.strength:.3e}" for p in selected) if selected else "No candidate pairs"
    )
    return selected
