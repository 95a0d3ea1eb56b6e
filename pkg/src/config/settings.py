"""
Configuration for GAMSum trainers and runs.

Defaults live in ``config/gamsum.yaml``. A config file given on the command
line is layered on top, then ``section.key=value`` overrides. The result is
validated by pydantic before any work starts.
"""

import copy
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.errors import GamSumError, SelectionError
from src.summarizer.budget import SummaryBudget

logger = logging.getLogger("gamsum.config")

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "gamsum.yaml"


class ConfigError(GamSumError, ValueError):
    """Configuration file or override is invalid."""


class ModelKind(str, Enum):
    """Trainers that produce an AdditiveModel."""

    EBM = "ebm"
    GAMINET = "gaminet"
    LOGISTIC = "logistic"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class EbmConfig(_Section):
    """Cyclic boosting with bagging, then pairwise interactions on residuals."""

    rounds: int = Field(500, ge=0)
    learning_rate: float = Field(0.05, gt=0.0, le=1.0)
    max_leaves: int = Field(3, ge=2)
    bags: int = Field(8, ge=1)
    bag_fraction: float = Field(0.85, gt=0.0, le=1.0)
    interactions: int = Field(10, ge=0)
    interaction_rounds: int = Field(200, ge=0)
    max_bins: int = Field(256, ge=2)
    max_interaction_bins: int = Field(32, ge=2)
    patience: int = Field(50, ge=1)
    min_samples_leaf: int = Field(2, ge=1)
    seed: int = 0


class GaminetConfig(_Section):
    """Staged training of main and pair subnetworks."""

    epochs: Tuple[int, int, int] = (200, 200, 100)
    batch_size: int = Field(256, ge=1)
    step_size: float = Field(0.1, gt=0.0)
    interactions: int = Field(10, ge=0)
    tau: float = Field(0.99, gt=0.0, le=1.0)
    clarity: float = Field(0.1, ge=0.0)
    hidden_layers: Tuple[int, ...] = (16, 16)
    clip_norm: float = Field(5.0, gt=0.0)
    max_bins: int = Field(256, ge=2)
    max_interaction_bins: int = Field(64, ge=2)
    seed: int = 0

    @field_validator("epochs")
    @classmethod
    def _epochs_positive(cls, value: Tuple[int, int, int]) -> Tuple[int, int, int]:
        if any(e < 1 for e in value):
            raise ValueError("every stage needs at least one epoch")
        return value

    @field_validator("hidden_layers")
    @classmethod
    def _layers_positive(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value or any(units < 1 for units in value):
            raise ValueError("hidden_layers needs at least one layer of >= 1 unit")
        return value


class LogisticConfig(_Section):
    """Gradient descent on the logistic loss."""

    max_iter: int = Field(10000, ge=1)
    tol: float = Field(1e-6, gt=0.0)
    l2: float = Field(0.0, ge=0.0)
    early_stopping: bool = True
    patience: int = Field(200, ge=1)
    max_bins: int = Field(256, ge=2)


class RunSettings(_Section):
    """Defaults for CLI runs."""

    budget: str = "sentences:3"
    split_ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    undersample: bool = True
    seed: int = 0
    workers: int = Field(1, ge=1)
    repeats: int = Field(1, ge=1)


class Settings(_Section):
    """All configuration sections."""

    ebm: EbmConfig = EbmConfig()
    gaminet: GaminetConfig = GaminetConfig()
    logistic: LogisticConfig = LogisticConfig()
    run: RunSettings = RunSettings()

    def trainer_config(self, kind: ModelKind) -> _Section:
        return {ModelKind.EBM: self.ebm, ModelKind.GAMINET: self.gaminet, ModelKind.LOGISTIC: self.logistic}[kind]


class RunConfig(_Section):
    """One validated CLI invocation."""

    subcommand: str
    inputs: Dict[str, str] = {}
    outputs: Dict[str, str] = {}
    model_kind: Optional[ModelKind] = None
    budget: str = "sentences:3"
    settings: Settings = Settings()
    seed: int = 0
    workers: int = Field(1, ge=1)
    repeats: int = Field(1, ge=1)
    options: Dict[str, Any] = {}

    @field_validator("budget")
    @classmethod
    def _budget_parses(cls, value: str) -> str:
        try:
            return str(SummaryBudget.parse(value))
        except SelectionError as e:
            raise ValueError(str(e)) from e

    @property
    def summary_budget(self) -> SummaryBudget:
        return SummaryBudget.parse(self.budget)


def _merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class ConfigManager:
    """
    Layered configuration: defaults file, user file, then overrides.

    Call ``settings()`` to validate and freeze the current layers.
    """

    def __init__(self, defaults_path: Optional[Union[str, Path]] = DEFAULT_CONFIG_PATH):
        """
        Initialize the manager.

        Args:
            defaults_path: YAML file with default values; None or a missing file means built-in defaults
        """
        self.config: Dict[str, Any] = {}
        if defaults_path is not None and Path(defaults_path).exists():
            self.load_file(defaults_path)
        else:
            logger.debug("No defaults file, using built-in defaults")

    def load_file(self, path: Union[str, Path]) -> None:
        """Layer a YAML file over the current configuration."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a mapping of sections")
        self.config = _merge(self.config, data)
        logger.debug(f"Loaded configuration from {path}")

    def apply_override(self, override: str) -> None:
        """
        Apply one ``section.key=value`` override; the value is parsed as YAML.

        Raises:
            ConfigError: Malformed override
        """
        path, sep, raw_value = override.partition("=")
        keys = [k for k in path.strip().split(".") if k]
        if not sep or len(keys) < 2:
            raise ConfigError(f"override must look like section.key=value, got '{override}'")
        try:
            value = yaml.safe_load(raw_value)
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse value in override '{override}'") from e

        update: Dict[str, Any] = {keys[-1]: value}
        for key in reversed(keys[:-1]):
            update = {key: update}
        self.config = _merge(self.config, update)

    def apply_overrides(self, overrides: Iterable[str]) -> None:
        for override in overrides:
            self.apply_override(override)

    def settings(self) -> Settings:
        """Validate the layered configuration."""
        try:
            return Settings.model_validate(self.config)
        except ValidationError as e:
            raise ConfigError(f"invalid configuration: {e}") from e


def load_settings(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[List[str]] = None,
    defaults_path: Optional[Union[str, Path]] = DEFAULT_CONFIG_PATH,
) -> Settings:
    """
    Build validated settings.

    Args:
        config_path: Optional user YAML file
        overrides: ``section.key=value`` strings applied last
        defaults_path: Defaults YAML file

    Returns:
        Frozen settings
    """
    manager = ConfigManager(defaults_path)
    if config_path is not None:
        manager.load_file(config_path)
    manager.apply_overrides(overrides or [])
    return manager.settings()
