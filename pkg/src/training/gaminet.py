"""
GAMI-Net style trainer: one subnetwork per effect, trained in three stages.

Stage 1 trains all main subnetworks jointly and prunes the trivial ones.
Stage 2 screens pairs on the stage-1 residuals (heredity: at least one parent
retained), trains pair subnetworks with a marginal clarity penalty and prunes
them. Stage 3 fine-tunes everything that survived. The final networks are
evaluated on the bin grid and exported as an AdditiveModel.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit, log_expit

from src.config.settings import GaminetConfig
from src.errors import StepSizeError
from src.gam.binning import Binner, fit_binner
from src.gam.logistic import logistic_loss
from src.gam.model import AdditiveModel, Pair, center_model
from src.monitoring.metrics import TrainingLog
from src.oracle.labeling import TrainingSet
from src.training.common import base_logit, resolve_feature_names, validation_arrays
from src.training.interactions import rank_interactions
from src.training.subnetwork import Subnetwork, SubnetworkKind, clarity_from_outputs
from src.utils.seeding import derive_rng

logger = logging.getLogger("gamsum.training.gaminet")

EffectKey = Union[int, Pair]


def prune_by_contribution(variances: Dict[EffectKey, float], tau: float) -> List[EffectKey]:
    """
    Smallest set of effects, by decreasing variance, whose cumulative share reaches ``tau``.

    Effects with zero total variance are all pruned.
    """
    total = float(sum(variances.values()))
    if total <= 0.0:
        return []
    ranked = sorted(variances, key=lambda key: (-variances[key], str(key)))
    kept: List[EffectKey] = []
    cumulative = 0.0
    for key in ranked:
        kept.append(key)
        cumulative += variances[key]
        if cumulative / total >= tau - 1e-12:
            break
    return kept


class GaminetModel:
    """
    Trained subnetworks plus their exported bin-grid AdditiveModel.

    ``additive`` is what summarization, explanation and persistence use;
    ``predict_logit_native`` evaluates the networks themselves.
    """

    def __init__(
        self,
        additive: AdditiveModel,
        intercept: float,
        mains: Dict[int, Subnetwork],
        pairs: Dict[Pair, Subnetwork],
    ):
        self.additive = additive
        self.intercept = float(intercept)
        self.mains = dict(sorted(mains.items()))
        self.pairs = dict(sorted(pairs.items()))

    @property
    def feature_names(self) -> Tuple[str, ...]:
        return self.additive.feature_names

    @property
    def metadata(self) -> Dict:
        return self.additive.metadata

    def predict_logit(self, x: np.ndarray) -> np.ndarray:
        return self.additive.predict_logit(x)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return self.additive.predict_proba(x)

    def decompose(self, x: np.ndarray) -> Dict[str, float]:
        return self.additive.decompose(x)

    def predict_logit_native(self, x: np.ndarray) -> np.ndarray:
        """Log-odds from the networks, without the bin grid."""
        rows = np.asarray(x, dtype=np.float64)
        single = rows.ndim == 1
        rows = rows.reshape(1, -1) if single else rows
        total = np.full(rows.shape[0], self.intercept)
        for f, net in self.mains.items():
            total = total + net.forward(rows[:, [f]], keep=False)
        for (i, j), net in self.pairs.items():
            total = total + net.forward(rows[:, [i, j]], keep=False)
        return float(total[0]) if single else total


class _StagedTrainer:
    """Mutable training state; owned by one train_gaminet call."""

    def __init__(
        self,
        x: np.ndarray,
        y: np.ndarray,
        x_val: np.ndarray,
        y_val: np.ndarray,
        pair_binner: Binner,
        config: GaminetConfig,
        training_log: Optional[TrainingLog],
    ):
        self.x, self.y = x, y.astype(np.float64)
        self.x_val, self.y_val = x_val, y_val.astype(np.float64)
        self.pair_bins = pair_binner.transform(x)
        self.config = config
        self.log = training_log
        self.intercept = base_logit(self.y)
        self.mains: Dict[int, Subnetwork] = {}
        self.pairs: Dict[Pair, Subnetwork] = {}

    def _inputs(self, key: EffectKey, rows: np.ndarray) -> np.ndarray:
        columns = [key] if isinstance(key, int) else list(key)
        return rows[:, columns]

    def _networks(self) -> List[Tuple[EffectKey, Subnetwork]]:
        return list(self.mains.items()) + list(self.pairs.items())

    def logits(self, rows: np.ndarray) -> np.ndarray:
        total = np.full(rows.shape[0], self.intercept)
        for key, net in self._networks():
            total = total + net.forward(self._inputs(key, rows), keep=False)
        return total

    def train_stage(self, stage: str, epochs: int, trainable: Sequence[EffectKey], clarity: bool) -> None:
        """Mini-batch gradient descent on the trainable networks and the intercept."""
        config = self.config
        trainable = list(trainable)
        networks = dict(self._networks())
        frozen = [key for key in networks if key not in trainable]
        frozen_logits = np.zeros(self.y.size)
        for key in frozen:
            frozen_logits = frozen_logits + networks[key].forward(self._inputs(key, self.x), keep=False)

        n = self.y.size
        for epoch in range(1, epochs + 1):
            order = derive_rng(config.seed, "gaminet", stage, epoch).permutation(n)
            for batch_index, start in enumerate(range(0, n, config.batch_size)):
                rows = order[start : start + config.batch_size]
                xb, yb = self.x[rows], self.y[rows]
                outputs = {key: networks[key].forward(self._inputs(key, xb)) for key in trainable}
                logit = self.intercept + frozen_logits[rows]
                for key in trainable:
                    logit = logit + outputs[key]

                loss = float(-np.mean(yb * log_expit(logit) + (1.0 - yb) * log_expit(-logit)))
                grad_logit = (expit(logit) - yb) / yb.size
                grads: Dict[EffectKey, List[np.ndarray]] = {}
                for key in trainable:
                    grad_out = grad_logit
                    if clarity and config.clarity > 0.0 and not isinstance(key, int):
                        penalty, penalty_grad = clarity_from_outputs(outputs[key], self.pair_bins[rows][:, list(key)])
                        loss += config.clarity * penalty
                        grad_out = grad_out + config.clarity * penalty_grad
                    grads[key] = networks[key].backward(grad_out)
                intercept_grad = float(grad_logit.sum())

                if not np.isfinite(loss):
                    raise StepSizeError(
                        "loss became non-finite",
                        {"stage": stage, "epoch": epoch, "batch": batch_index, "step_size": config.step_size, "loss": loss},
                    )

                squared = intercept_grad * intercept_grad
                for key in trainable:
                    squared += sum(float(np.sum(g * g)) for g in grads[key])
                norm = float(np.sqrt(squared))
                scale = config.clip_norm / norm if norm > config.clip_norm else 1.0

                step = config.step_size * scale
                self.intercept -= step * intercept_grad
                for key in trainable:
                    for param, grad in zip(networks[key].parameters(), grads[key]):
                        param -= step * grad
                if not all(np.all(np.isfinite(p)) for key in trainable for p in networks[key].parameters()):
                    raise StepSizeError(
                        "parameters became non-finite",
                        {"stage": stage, "epoch": epoch, "batch": batch_index, "step_size": config.step_size, "loss": loss},
                    )

            train_loss = logistic_loss(self.logits(self.x), self.y)
            val_loss = logistic_loss(self.logits(self.x_val), self.y_val)
            if not (np.isfinite(train_loss) and np.isfinite(self.intercept)):
                raise StepSizeError(
                    "training loss became non-finite",
                    {"stage": stage, "epoch": epoch, "step_size": config.step_size, "loss": train_loss},
                )
            if self.log is not None:
                self.log.record(stage, 0, epoch, train_loss, val_loss)

    def center(self, keys: Sequence[EffectKey]) -> Dict[EffectKey, float]:
        """Move each network's training mean into the intercept; return output variances."""
        networks = dict(self._networks())
        variances: Dict[EffectKey, float] = {}
        for key in keys:
            net = networks[key]
            outputs = net.forward(self._inputs(key, self.x), keep=False)
            mean = float(np.mean(outputs))
            net.biases[-1] -= mean
            self.intercept += mean
            variances[key] = float(np.var(outputs))
        return variances


def export_grids(
    intercept: float,
    mains: Dict[int, Subnetwork],
    pairs: Dict[Pair, Subnetwork],
    binner: Binner,
    pair_binner: Binner,
    feature_names: Sequence[str],
    x_train: np.ndarray,
    metadata: Optional[Dict] = None,
) -> AdditiveModel:
    """Evaluate networks at bin centers and return the centered AdditiveModel."""
    main_shapes = {f: net.forward(binner.centers(f).reshape(-1, 1), keep=False) for f, net in mains.items()}
    pair_shapes = {}
    for (i, j), net in pairs.items():
        ci, cj = pair_binner.centers(i), pair_binner.centers(j)
        grid_i, grid_j = np.meshgrid(ci, cj, indexing="ij")
        values = net.forward(np.column_stack([grid_i.ravel(), grid_j.ravel()]), keep=False)
        pair_shapes[(i, j)] = values.reshape(ci.size, cj.size)
    model = AdditiveModel(
        intercept=intercept,
        mains=main_shapes,
        pairs=pair_shapes,
        binner=binner,
        pair_binner=pair_binner,
        feature_names=tuple(feature_names),
        metadata=dict(metadata or {}),
    )
    return center_model(model, x_train)


def train_gaminet(
    train: TrainingSet,
    val: Optional[TrainingSet] = None,
    config: Optional[GaminetConfig] = None,
    training_log: Optional[TrainingLog] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> GaminetModel:
    """
    Train main and pair subnetworks in three stages and export the bin grids.

    Args:
        train: Training rows with both classes
        val: Validation rows for the per-epoch log (training rows when absent)
        config: Architecture, stage epochs, step size, tau, clarity weight, K
        training_log: Optional sink for per-epoch losses
        feature_names: Column names

    Returns:
        The trained model

    Raises:
        TrainingError: Only one class in the labels
        StepSizeError: The loss diverged
    """
    config = config or GaminetConfig()
    names = resolve_feature_names(train, feature_names)
    x = train.features
    x_val, y_val = validation_arrays(train, val)
    d = x.shape[1]

    binner = fit_binner(x, config.max_bins)
    pair_binner = fit_binner(x, config.max_interaction_bins)
    state = _StagedTrainer(x, train.labels, x_val, y_val, pair_binner, config, training_log)
    notices: List[str] = []

    # Stage 1: main effects
    for f in range(d):
        rng = derive_rng(config.seed, "gaminet", "init", "main", f)
        state.mains[f] = Subnetwork.initialize(SubnetworkKind.MAIN, (f,), config.hidden_layers, rng)
    logger.info(f"GAMI-Net stage 1: {d} main subnetworks, {config.epochs[0]} epochs")
    state.train_stage("stage1", config.epochs[0], list(state.mains), clarity=False)
    main_variances = state.center(list(state.mains))
    kept_mains = sorted(prune_by_contribution(main_variances, config.tau))
    pruned_mains = [f for f in state.mains if f not in kept_mains]
    state.mains = {f: state.mains[f] for f in kept_mains}
    logger.info(f"Stage 1 kept mains {kept_mains}, pruned {pruned_mains}")

    # Stage 2: pairwise interactions on the stage-1 residuals
    candidates = []
    if config.interactions > 0 and d >= 2 and kept_mains:
        stage1_model = export_grids(state.intercept, state.mains, {}, binner, pair_binner, names, x)
        candidates = rank_interactions(
            stage1_model,
            x,
            train.labels,
            config.interactions,
            allowed_features=kept_mains,
            base_logits=state.logits(x),
        )
    for item in candidates:
        rng = derive_rng(config.seed, "gaminet", "init", "pair", *item.pair)
        state.pairs[item.pair] = Subnetwork.initialize(SubnetworkKind.PAIR, item.pair, config.hidden_layers, rng)

    kept_pairs: List[Pair] = []
    if state.pairs:
        logger.info(f"GAMI-Net stage 2: {len(state.pairs)} pair subnetworks, {config.epochs[1]} epochs")
        state.train_stage("stage2", config.epochs[1], list(state.pairs), clarity=True)
        pair_variances = state.center(list(state.pairs))
        kept_pairs = sorted(prune_by_contribution(pair_variances, config.tau))
        state.pairs = {p: state.pairs[p] for p in kept_pairs}
        logger.info(f"Stage 2 kept pairs {kept_pairs}")
    else:
        notices.append("no pairwise interactions were screened in")

    # Stage 3: fine-tune everything retained
    retained = list(state.mains) + list(state.pairs)
    if retained:
        logger.info(f"GAMI-Net stage 3: fine-tuning {len(retained)} subnetworks, {config.epochs[2]} epochs")
        state.train_stage("stage3", config.epochs[2], retained, clarity=True)
        state.center(retained)
    else:
        notices.append("every effect was pruned; the model is intercept-only")

    metadata = {
        "model_kind": "gaminet",
        "retained_mains": [int(f) for f in state.mains],
        "pruned_mains": [int(f) for f in pruned_mains],
        "retained_pairs": [[int(i), int(j)] for (i, j) in state.pairs],
        "screened_pairs": [[int(p[0]), int(p[1]), float(s)] for p, s in candidates],
        "notices": notices,
    }
    additive = export_grids(state.intercept, state.mains, state.pairs, binner, pair_binner, names, x, metadata)
    logger.info(f"GAMI-Net done: {len(state.mains)} mains, {len(state.pairs)} pairs")
    return GaminetModel(additive, state.intercept, state.mains, state.pairs)
