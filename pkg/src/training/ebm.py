"""
Explainable boosting: cyclic boosting of main effects with bagging, then
pairwise interactions boosted on the residuals with the mains frozen.

Boosting works in log-odds space. Every step fits a small split tree over a
feature's ordered bins to the per-bin gradient and Hessian sums of the
logistic loss, and adds the learning-rate-scaled Newton leaf values to the
feature's shape.
"""

import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from src.config.settings import EbmConfig
from src.gam.binning import fit_binner
from src.gam.logistic import logistic_loss
from src.gam.model import AdditiveModel, Pair, center_model
from src.monitoring.metrics import TrainingLog
from src.oracle.labeling import TrainingSet
from src.training.common import base_logit, resolve_feature_names, validation_arrays
from src.training.interactions import PairStrength, rank_interactions
from src.utils.parallel import ordered_map
from src.utils.seeding import derive_rng

logger = logging.getLogger("gamsum.training.ebm")

_MIN_HESSIAN = 1e-12
NO_GAIN_NOTICE = "no-gain: pairwise interactions did not lower validation log-loss and were dropped"


class BagJob(NamedTuple):
    bag: int
    train_bins: np.ndarray
    train_y: np.ndarray
    val_bins: Optional[np.ndarray]
    val_y: Optional[np.ndarray]
    bin_counts: Tuple[int, ...]
    intercept: float
    config: EbmConfig


class BagResult(NamedTuple):
    shapes: List[np.ndarray]
    log: TrainingLog
    best_round: int


def fit_bin_tree(
    gradient: np.ndarray,
    hessian: np.ndarray,
    counts: np.ndarray,
    max_leaves: int,
    min_samples_leaf: int = 1,
) -> List[Tuple[int, int]]:
    """
    Grow a best-first split tree over ordered bins.

    Args:
        gradient: Per-bin sums of y - p
        hessian: Per-bin sums of p (1 - p)
        counts: Per-bin row counts
        max_leaves: Leaf cap
        min_samples_leaf: Minimum rows on each side of a split

    Returns:
        Leaves as half-open bin ranges [lo, hi), in bin order
    """
    g_cum = np.concatenate([[0.0], np.cumsum(gradient)])
    h_cum = np.concatenate([[0.0], np.cumsum(hessian)])
    n_cum = np.concatenate([[0], np.cumsum(counts)])

    def best_split(lo: int, hi: int) -> Tuple[float, int]:
        if hi - lo < 2:
            return 0.0, -1
        g, h = g_cum[hi] - g_cum[lo], h_cum[hi] - h_cum[lo]
        if h < _MIN_HESSIAN:
            return 0.0, -1
        at = np.arange(lo + 1, hi)
        g_left, h_left, n_left = g_cum[at] - g_cum[lo], h_cum[at] - h_cum[lo], n_cum[at] - n_cum[lo]
        g_right, h_right, n_right = g - g_left, h - h_left, n_cum[hi] - n_cum[at]
        valid = (
            (n_left >= min_samples_leaf)
            & (n_right >= min_samples_leaf)
            & (h_left >= _MIN_HESSIAN)
            & (h_right >= _MIN_HESSIAN)
        )
        if not valid.any():
            return 0.0, -1
        safe_left, safe_right = np.where(valid, h_left, 1.0), np.where(valid, h_right, 1.0)
        gain = g_left * g_left / safe_left + g_right * g_right / safe_right - g * g / h
        gain = np.where(valid, gain, -np.inf)
        best = int(np.argmax(gain))
        return float(gain[best]), int(at[best])

    leaves = [(0, len(gradient))]
    while len(leaves) < max_leaves:
        candidates = [(best_split(lo, hi), k) for k, (lo, hi) in enumerate(leaves)]
        (gain, at), k = max(candidates, key=lambda c: (c[0][0], -c[1]))
        if at < 0 or gain <= 0.0:
            break
        lo, hi = leaves[k]
        leaves[k : k + 1] = [(lo, at), (at, hi)]
    return leaves


def boost_update(
    bins: np.ndarray,
    y: np.ndarray,
    p: np.ndarray,
    n_bins: int,
    config: EbmConfig,
) -> np.ndarray:
    """Per-bin additive update for one feature at the current probabilities."""
    gradient = np.bincount(bins, weights=y - p, minlength=n_bins)
    hessian = np.bincount(bins, weights=p * (1.0 - p), minlength=n_bins)
    counts = np.bincount(bins, minlength=n_bins)
    update = np.zeros(n_bins, dtype=np.float64)
    for lo, hi in fit_bin_tree(gradient, hessian, counts, config.max_leaves, config.min_samples_leaf):
        h = hessian[lo:hi].sum()
        if h >= _MIN_HESSIAN:
            update[lo:hi] = config.learning_rate * gradient[lo:hi].sum() / h
    return update


def _train_bag(job: BagJob) -> BagResult:
    config = job.config
    d = len(job.bin_counts)
    shapes = [np.zeros(size, dtype=np.float64) for size in job.bin_counts]
    log = TrainingLog()

    logits = np.full(job.train_y.size, job.intercept)
    val_logits = np.full(job.val_y.size, job.intercept)
    best_val = logistic_loss(val_logits, job.val_y)
    best_shapes = [s.copy() for s in shapes]
    best_round = 0
    since_best = 0

    for round_index in range(1, config.rounds + 1):
        for f in range(d):
            p = expit(logits)
            update = boost_update(job.train_bins[:, f], job.train_y, p, job.bin_counts[f], config)
            shapes[f] += update
            logits += update[job.train_bins[:, f]]
            val_logits += update[job.val_bins[:, f]]

        train_loss = logistic_loss(logits, job.train_y)
        val_loss = logistic_loss(val_logits, job.val_y)
        log.record("mains", job.bag, round_index, train_loss, val_loss)
        if val_loss < best_val:
            best_val, best_round, since_best = val_loss, round_index, 0
            best_shapes = [s.copy() for s in shapes]
        else:
            since_best += 1
            if since_best >= config.patience:
                logger.debug(f"Bag {job.bag}: early stop at round {round_index}, best round {best_round}")
                break

    return BagResult(best_shapes, log, best_round)


def _bag_jobs(
    train_bins: np.ndarray,
    y: np.ndarray,
    val: Optional[Tuple[np.ndarray, np.ndarray]],
    bin_counts: Sequence[int],
    intercept: float,
    config: EbmConfig,
) -> List[BagJob]:
    n = y.size
    jobs = []
    for bag in range(config.bags):
        if config.bag_fraction >= 1.0:
            rows = np.arange(n)
        else:
            size = max(1, int(round(config.bag_fraction * n)))
            rows = np.sort(derive_rng(config.seed, "bag", bag).choice(n, size=size, replace=False))
        if val is not None:
            val_bins, val_y = val
        else:
            out_of_bag = np.setdiff1d(np.arange(n), rows)
            held = out_of_bag if out_of_bag.size else rows
            val_bins, val_y = train_bins[held], y[held]
        jobs.append(BagJob(bag, train_bins[rows], y[rows], val_bins, val_y, tuple(bin_counts), intercept, config))
    return jobs


def train_main_effects(
    train: TrainingSet,
    val: Optional[TrainingSet] = None,
    config: Optional[EbmConfig] = None,
    training_log: Optional[TrainingLog] = None,
    workers: int = 1,
    feature_names: Optional[Sequence[str]] = None,
) -> AdditiveModel:
    """
    Stage 1: bagged cyclic boosting of one shape per feature.

    Args:
        train: Training rows with both classes
        val: Validation rows for early stopping; out-of-bag rows are used when absent
        config: Boosting settings
        training_log: Optional sink for per-round losses
        workers: Parallel bags; never changes the result
        feature_names: Column names, defaulting to the sentence features

    Returns:
        Centered mains-only model

    Raises:
        TrainingError: Only one class in the training labels
    """
    config = config or EbmConfig()
    names = resolve_feature_names(train, feature_names)
    x, y = train.features, train.labels.astype(np.float64)
    intercept = base_logit(y)

    binner = fit_binner(x, config.max_bins)
    pair_binner = fit_binner(x, config.max_interaction_bins)
    train_bins = binner.transform(x)
    val_arrays = None
    if val is not None and len(val) > 0:
        val_arrays = (binner.transform(val.features), val.labels.astype(np.float64))

    logger.info(f"EBM stage 1: {config.bags} bags, {config.rounds} rounds, {x.shape[0]} rows")
    jobs = _bag_jobs(train_bins, y, val_arrays, binner.bin_counts(), intercept, config)
    results = ordered_map(_train_bag, jobs, workers)

    mains: Dict[int, np.ndarray] = {}
    for f in range(x.shape[1]):
        mains[f] = np.mean(np.stack([r.shapes[f] for r in results]), axis=0)
    if training_log is not None:
        for result in results:
            training_log.extend(result.log)

    model = AdditiveModel(
        intercept=intercept,
        mains=mains,
        pairs={},
        binner=binner,
        pair_binner=pair_binner,
        feature_names=names,
        metadata={"model_kind": "ebm", "best_rounds": [r.best_round for r in results], "notices": []},
    )
    logger.info(f"EBM stage 1 done, best rounds per bag {[r.best_round for r in results]}")
    return center_model(model, x)


def _quadrant_update(
    bins_i: np.ndarray,
    bins_j: np.ndarray,
    y: np.ndarray,
    p: np.ndarray,
    shape: Tuple[int, int],
    config: EbmConfig,
) -> Optional[np.ndarray]:
    """Best single 2-D cut with Newton values per quadrant, or None when no cut helps."""
    if shape[0] < 2 or shape[1] < 2:
        return None
    flat = bins_i * shape[1] + bins_j
    size = shape[0] * shape[1]
    g = np.bincount(flat, weights=y - p, minlength=size).reshape(shape)
    h = np.bincount(flat, weights=p * (1.0 - p), minlength=size).reshape(shape)
    c = np.bincount(flat, minlength=size).reshape(shape).astype(np.float64)

    def quadrants(grid: np.ndarray):
        cum = grid.cumsum(axis=0).cumsum(axis=1)
        total = cum[-1, -1]
        ll = cum[:-1, :-1]
        lh = cum[:-1, -1][:, None] - ll
        hl = cum[-1, :-1][None, :] - ll
        hh = total - ll - lh - hl
        return (ll, lh, hl, hh), total

    g_q, g_total = quadrants(g)
    h_q, h_total = quadrants(h)
    c_q, _ = quadrants(c)
    if h_total < _MIN_HESSIAN:
        return None

    valid = np.ones_like(c_q[0], dtype=bool)
    for cq, hq in zip(c_q, h_q):
        valid &= (cq >= config.min_samples_leaf) & (hq >= _MIN_HESSIAN)
    if not valid.any():
        return None

    gain = -g_total * g_total / h_total
    for gq, hq in zip(g_q, h_q):
        gain = gain + gq * gq / np.where(valid, hq, 1.0)
    gain = np.where(valid, gain, -np.inf)
    v1, v2 = np.unravel_index(int(np.argmax(gain)), gain.shape)
    if not gain[v1, v2] > 0.0:
        return None

    update = np.zeros(shape, dtype=np.float64)
    regions = [
        (slice(0, v1 + 1), slice(0, v2 + 1)),
        (slice(0, v1 + 1), slice(v2 + 1, None)),
        (slice(v1 + 1, None), slice(0, v2 + 1)),
        (slice(v1 + 1, None), slice(v2 + 1, None)),
    ]
    for (rows, cols), gq, hq in zip(regions, g_q, h_q):
        update[rows, cols] = config.learning_rate * gq[v1, v2] / hq[v1, v2]
    return update


def train_pairs(
    model_mains: AdditiveModel,
    train: TrainingSet,
    val: Optional[TrainingSet],
    pairs: Sequence[Pair],
    config: EbmConfig,
    training_log: Optional[TrainingLog] = None,
) -> Dict[Pair, np.ndarray]:
    """
    Stage 2: boost pair surfaces on the residuals of a frozen mains model.

    Returns:
        Uncentered surfaces at the best validation round
    """
    x, y = train.features, train.labels.astype(np.float64)
    x_val, y_val = validation_arrays(train, val)
    y_val = y_val.astype(np.float64)

    pair_bins = model_mains.pair_binner.transform(x)
    val_pair_bins = model_mains.pair_binner.transform(x_val)
    logits = np.array(model_mains.predict_logit(x), dtype=np.float64)
    val_logits = np.array(model_mains.predict_logit(x_val), dtype=np.float64)

    shapes = {p: (model_mains.pair_binner.n_bins(p[0]), model_mains.pair_binner.n_bins(p[1])) for p in pairs}
    surfaces = {p: np.zeros(shapes[p], dtype=np.float64) for p in pairs}
    best_surfaces = {p: s.copy() for p, s in surfaces.items()}
    best_val = logistic_loss(val_logits, y_val)
    since_best = 0

    for round_index in range(1, config.interaction_rounds + 1):
        for (i, j) in pairs:
            update = _quadrant_update(pair_bins[:, i], pair_bins[:, j], y, expit(logits), shapes[(i, j)], config)
            if update is None:
                continue
            surfaces[(i, j)] += update
            logits += update[pair_bins[:, i], pair_bins[:, j]]
            val_logits += update[val_pair_bins[:, i], val_pair_bins[:, j]]

        train_loss = logistic_loss(logits, y)
        val_loss = logistic_loss(val_logits, y_val)
        if training_log is not None:
            training_log.record("pairs", 0, round_index, train_loss, val_loss)
        if val_loss < best_val:
            best_val, since_best = val_loss, 0
            best_surfaces = {p: s.copy() for p, s in surfaces.items()}
        else:
            since_best += 1
            if since_best >= config.patience:
                logger.debug(f"Pair boosting early stop at round {round_index}")
                break
    return best_surfaces


def train_ebm(
    train: TrainingSet,
    val: Optional[TrainingSet] = None,
    config: Optional[EbmConfig] = None,
    training_log: Optional[TrainingLog] = None,
    workers: int = 1,
    feature_names: Optional[Sequence[str]] = None,
) -> AdditiveModel:
    """
    Train an EBM: bagged mains, interaction ranking, then pairs on residuals.

    Args:
        train: Training rows with both classes
        val: Validation rows for early stopping and the pair gain check
        config: Boosting settings
        training_log: Optional sink for per-round losses
        workers: Parallel bags
        feature_names: Column names

    Returns:
        Finalized model; pairs are dropped with a notice when they do not
        lower validation log-loss
    """
    config = config or EbmConfig()
    mains_model = train_main_effects(train, val, config, training_log, workers, feature_names)
    if config.interactions == 0 or train.features.shape[1] < 2 or config.interaction_rounds == 0:
        return mains_model

    ranked: List[PairStrength] = rank_interactions(mains_model, train.features, train.labels, config.interactions)
    pairs = [item.pair for item in ranked]
    logger.info(f"EBM stage 2: boosting {len(pairs)} pairs")
    surfaces = train_pairs(mains_model, train, val, pairs, config, training_log)

    metadata = dict(mains_model.metadata)
    metadata["interaction_strengths"] = [[int(p[0]), int(p[1]), float(s)] for p, s in ranked]
    full = center_model(mains_model.replace(pairs=surfaces, metadata=metadata), train.features, center_mains=False)

    x_val, y_val = validation_arrays(train, val)
    mains_loss = logistic_loss(mains_model.predict_logit(x_val), y_val.astype(np.float64))
    full_loss = logistic_loss(full.predict_logit(x_val), y_val.astype(np.float64))
    if not full_loss < mains_loss:
        logger.warning(f"{NO_GAIN_NOTICE} (val loss {full_loss:.6f} vs {mains_loss:.6f})")
        metadata["notices"] = list(metadata.get("notices", [])) + [NO_GAIN_NOTICE]
        return mains_model.replace(metadata=metadata)
    logger.info(f"EBM done: validation log-loss {mains_loss:.6f} -> {full_loss:.6f}")
    return full
