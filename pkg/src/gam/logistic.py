"""
Logistic-regression baseline expressed as an additive model.

Coefficients are fitted by full-batch gradient descent on the mean logistic
loss with step 1/L, where L bounds the curvature of the loss. The linear
model is then written onto the bin grid: each bin contributes the weight
times the mean training value of its feature inside that bin.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit, log_expit

from src.config.settings import LogisticConfig
from src.errors import LogisticConvergenceWarning, TrainingError
from src.gam.binning import fit_binner
from src.gam.model import AdditiveModel, center_model
from src.monitoring.metrics import TrainingLog
from src.oracle.labeling import TrainingSet
from src.training.common import resolve_feature_names

logger = logging.getLogger("gamsum.gam.logistic")


@dataclass(frozen=True)
class LogisticFit:
    """Fitted coefficients and how the descent ended."""

    weights: np.ndarray
    bias: float
    iterations: int
    gradient_norm: float
    converged: bool


def logistic_loss(logits: np.ndarray, y: np.ndarray) -> float:
    """Mean negative log-likelihood for 0/1 labels."""
    return float(-np.mean(y * log_expit(logits) + (1.0 - y) * log_expit(-logits)))


def fit_logistic_coefficients(
    x: np.ndarray,
    y: np.ndarray,
    config: Optional[LogisticConfig] = None,
    x_val: Optional[np.ndarray] = None,
    y_val: Optional[np.ndarray] = None,
    training_log: Optional[TrainingLog] = None,
) -> LogisticFit:
    """
    Fit weights and bias by gradient descent.

    Args:
        x: Training rows (n, d)
        y: 0/1 labels
        config: Iteration cap, tolerance, L2 penalty and early stopping
        x_val: Optional validation rows for early stopping
        y_val: Optional validation labels
        training_log: Optional sink for per-iteration losses

    Returns:
        The fit; warns with LogisticConvergenceWarning when the cap is hit
    """
    config = config or LogisticConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = x.shape
    if n == 0:
        raise TrainingError("cannot fit a logistic model on zero rows")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise TrainingError("logistic regression needs finite features and labels")

    design = np.hstack([x, np.ones((n, 1))])
    curvature = 0.25 * float(np.linalg.eigvalsh(design.T @ design / n).max()) + config.l2
    step = 1.0 / curvature
    penalty = np.full(d + 1, config.l2)
    penalty[-1] = 0.0

    use_val = config.early_stopping and x_val is not None and y_val is not None and len(y_val) > 0
    if use_val:
        val_design = np.hstack([np.asarray(x_val, dtype=np.float64), np.ones((len(y_val), 1))])
        y_val = np.asarray(y_val, dtype=np.float64)
        if not (np.all(np.isfinite(val_design)) and np.all(np.isfinite(y_val))):
            raise TrainingError("logistic early stopping needs finite validation features and labels")
        best_val = np.inf
        best_theta = np.zeros(d + 1)
        since_best = 0

    theta = np.zeros(d + 1)
    gradient_norm = np.inf
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iter + 1):
        logits = design @ theta
        gradient = design.T @ (expit(logits) - y) / n + penalty * theta
        gradient_norm = float(np.linalg.norm(gradient))
        if gradient_norm <= config.tol:
            converged = True
            break
        theta = theta - step * gradient

        val_loss = logistic_loss(val_design @ theta, y_val) if use_val else None
        if training_log is not None:
            training_log.record("logistic", 0, iterations, logistic_loss(design @ theta, y), val_loss)
        if use_val:
            if val_loss < best_val:
                best_val, best_theta, since_best = val_loss, theta.copy(), 0
            else:
                since_best += 1
                if since_best >= config.patience:
                    logger.info(f"Logistic early stop at iteration {iterations} (best val loss {best_val:.6f})")
                    theta = best_theta
                    converged = True
                    break

    if not converged:
        message = (
            f"logistic regression did not reach tolerance {config.tol} in {config.max_iter} "
            f"iterations (final gradient norm {gradient_norm:.3e})"
        )
        logger.warning(message)
        warnings.warn(message, LogisticConvergenceWarning, stacklevel=2)

    return LogisticFit(
        weights=theta[:-1].copy(),
        bias=float(theta[-1]),
        iterations=iterations,
        gradient_norm=gradient_norm,
        converged=converged,
    )


def linear_additive_model(
    fit: LogisticFit,
    x: np.ndarray,
    feature_names: Sequence[str],
    max_bins: int = 256,
) -> AdditiveModel:
    """
    Write a linear model onto a bin grid fitted to ``x``.

    Args:
        fit: Coefficients
        x: Training rows used for the binner and per-bin means
        feature_names: Column names
        max_bins: Bin cap

    Returns:
        Centered additive model with one main shape per feature
    """
    x = np.asarray(x, dtype=np.float64)
    binner = fit_binner(x, max_bins)
    bins = binner.transform(x)
    mains = {}
    for f in range(x.shape[1]):
        size = binner.n_bins(f)
        counts = np.bincount(bins[:, f], minlength=size)
        sums = np.bincount(bins[:, f], weights=x[:, f], minlength=size)
        centers = binner.centers(f)
        means = np.where(counts > 0, sums / np.maximum(counts, 1), centers)
        mains[f] = fit.weights[f] * means

    model = AdditiveModel(
        intercept=fit.bias,
        mains=mains,
        pairs={},
        binner=binner,
        pair_binner=binner,
        feature_names=tuple(feature_names),
        metadata={
            "coefficients": {name: float(w) for name, w in zip(feature_names, fit.weights)},
            "bias": fit.bias,
            "iterations": fit.iterations,
            "gradient_norm": fit.gradient_norm,
        },
    )
    return center_model(model, x)


def train_logistic(
    train: TrainingSet,
    config: Optional[LogisticConfig] = None,
    val: Optional[TrainingSet] = None,
    training_log: Optional[TrainingLog] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> AdditiveModel:
    """
    Logistic-regression baseline as an AdditiveModel with linear shapes.

    Args:
        train: TrainingSet
        config: Logistic settings
        val: Optional validation TrainingSet, used for early stopping when enabled
        training_log: Optional loss sink
        feature_names: Column names

    Returns:
        Finalized model
    """
    config = config or LogisticConfig()
    if len(np.unique(train.labels)) < 2:
        raise TrainingError("logistic regression needs both classes in the training set")
    fit = fit_logistic_coefficients(
        train.features,
        train.labels,
        config,
        x_val=val.features if val is not None else None,
        y_val=val.labels if val is not None else None,
        training_log=training_log,
    )
    logger.info(f"Logistic fit: {fit.iterations} iterations, gradient norm {fit.gradient_norm:.3e}")
    return linear_additive_model(fit, train.features, resolve_feature_names(train, feature_names), config.max_bins)
