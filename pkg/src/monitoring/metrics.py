"""
Training curves and stage timing for GAMSum.

A ``TrainingLog`` collects one row per boosting round or epoch. It is written
as tab-separated text rather than logged line by line.
"""

import functools
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, List, Optional, TypeVar, Union, cast

import numpy as np
import pandas as pd

logger = logging.getLogger("gamsum.monitoring.metrics")

F = TypeVar("F", bound=Callable[..., Any])

LOG_COLUMNS = ["stage", "bag", "round", "train_loss", "val_loss"]


@dataclass(frozen=True)
class LogRow:
    stage: str
    bag: int
    round: int
    train_loss: float
    val_loss: float


class TrainingLog:
    """Per-round train/validation losses of one training run."""

    def __init__(self) -> None:
        self._rows: List[LogRow] = []

    def __len__(self) -> int:
        return len(self._rows)

    def record(
        self,
        stage: str,
        bag: int,
        round_index: int,
        train_loss: float,
        val_loss: Optional[float] = None,
    ) -> None:
        """
        Append one row.

        Args:
            stage: e.g. "mains", "pairs", "stage1"
            bag: Bag index (0 when the trainer does not bag)
            round_index: Round or epoch number within the stage
            train_loss: Training log-loss
            val_loss: Validation log-loss, NaN when there is none
        """
        self._rows.append(
            LogRow(stage, int(bag), int(round_index), float(train_loss), np.nan if val_loss is None else float(val_loss))
        )
        logger.debug(f"{stage} bag={bag} round={round_index} train={train_loss:.6f} val={val_loss}")

    def extend(self, other: "TrainingLog") -> None:
        self._rows.extend(other._rows)

    def rows(self, stage: Optional[str] = None) -> List[LogRow]:
        return [r for r in self._rows if stage is None or r.stage == stage]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.__dict__ for r in self._rows], columns=LOG_COLUMNS)

    def write(self, path: Union[str, Path]) -> None:
        """Write the log as tab-separated text."""
        self.to_frame().to_csv(path, sep="\t", index=False, float_format="%.17g")
        logger.info(f"Wrote training log ({len(self)} rows) to {path}")


def timed(stage: str) -> Callable[[F], F]:
    """
    Decorator logging how long a pipeline stage took.

    Args:
        stage: Name used in the log line

    Returns:
        Decorated function
    """

    def decorator(func: F) -> F:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                duration = time.perf_counter() - start_time
                logger.info(f"{stage} finished in {duration:.2f}s")

        return cast(F, wrapper)

    return decorator
