"""
One entry point over the three trainers.
"""

import logging
from typing import Optional, Union

from src.config.settings import ModelKind, Settings
from src.gam.logistic import train_logistic
from src.gam.model import AdditiveModel
from src.monitoring.metrics import TrainingLog
from src.oracle.labeling import TrainingSet
from src.training.ebm import train_ebm
from src.training.gaminet import GaminetModel, train_gaminet

logger = logging.getLogger("gamsum.training")

TrainedModel = Union[AdditiveModel, GaminetModel]


def as_additive(model: TrainedModel) -> AdditiveModel:
    """The bin-grid model behind any trained model."""
    return model.additive if isinstance(model, GaminetModel) else model


def train_model(
    kind: Union[ModelKind, str],
    train: TrainingSet,
    val: Optional[TrainingSet] = None,
    settings: Optional[Settings] = None,
    training_log: Optional[TrainingLog] = None,
    workers: int = 1,
) -> TrainedModel:
    """
    Train one model kind with its configuration section.

    Args:
        kind: ebm, gaminet or logistic
        train: Balanced or unbalanced training rows
        val: Validation rows
        settings: Full settings; defaults when None
        training_log: Optional loss sink
        workers: Parallel EBM bags

    Returns:
        AdditiveModel, or GaminetModel for gaminet
    """
    kind = ModelKind(kind)
    settings = settings or Settings()
    logger.info(f"Training {kind.value} on {len(train)} rows (class counts {train.class_counts})")
    if kind is ModelKind.EBM:
        return train_ebm(train, val, settings.ebm, training_log, workers)
    if kind is ModelKind.GAMINET:
        return train_gaminet(train, val, settings.gaminet, training_log)
    return train_logistic(train, settings.logistic, val, training_log)
