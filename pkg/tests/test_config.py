"""
Tests for layered configuration.
"""

import unittest
from pathlib import Path

import pytest
from pydantic import ValidationError

from src.config.settings import (
    DEFAULT_CONFIG_PATH,
    ConfigError,
    ConfigManager,
    EbmConfig,
    GaminetConfig,
    ModelKind,
    RunConfig,
    Settings,
    load_settings,
)
from src.summarizer.budget import SummaryBudget


class TestDefaults(unittest.TestCase):
    """Tests for the shipped defaults file."""

    def test_defaults_file_matches_built_in_defaults(self):
        self.assertTrue(DEFAULT_CONFIG_PATH.exists())
        self.assertEqual(load_settings(), Settings())

    def test_missing_defaults_file(self):
        self.assertEqual(ConfigManager(None).settings(), Settings())
        self.assertEqual(ConfigManager("does/not/exist.yaml").settings(), Settings())

    def test_trainer_config(self):
        settings = Settings()
        self.assertIs(settings.trainer_config(ModelKind.EBM), settings.ebm)
        self.assertIs(settings.trainer_config(ModelKind.GAMINET), settings.gaminet)
        self.assertIs(settings.trainer_config(ModelKind.LOGISTIC), settings.logistic)


class TestOverrides:
    """Tests for section.key=value overrides."""

    def test_scalar_and_list_values(self) -> None:
        settings = load_settings(overrides=["ebm.rounds=10", "gaminet.epochs=[1, 2, 3]", "run.budget=words:200"])
        assert settings.ebm.rounds == 10
        assert settings.gaminet.epochs == (1, 2, 3)
        assert settings.run.budget == "words:200"
        assert settings.ebm.learning_rate == EbmConfig().learning_rate

    def test_later_override_wins(self) -> None:
        assert load_settings(overrides=["ebm.bags=2", "ebm.bags=5"]).ebm.bags == 5

    @pytest.mark.parametrize("override", ["ebm.rounds", "rounds=10", "=3", ".rounds=1"])
    def test_malformed(self, override: str) -> None:
        with pytest.raises(ConfigError):
            ConfigManager(None).apply_override(override)

    @pytest.mark.parametrize("override", ["ebm.rounds=-1", "ebm.unknown=1", "gaminet.tau=1.5", "gaminet.epochs=[0, 1, 1]"])
    def test_invalid_values(self, override: str) -> None:
        with pytest.raises(ConfigError):
            load_settings(overrides=[override])

    def test_config_error_is_value_error(self) -> None:
        with pytest.raises(ValueError):
            load_settings(overrides=["logistic.max_iter=0"])


class TestConfigFiles:
    """Tests for user config files."""

    def test_file_layered_over_defaults(self, tmp_path: Path) -> None:
        path = tmp_path / "user.yaml"
        path.write_text("ebm:\n  rounds: 7\nrun:\n  workers: 3\n", encoding="utf-8")
        settings = load_settings(path, ["ebm.bags=1"])
        assert (settings.ebm.rounds, settings.ebm.bags, settings.run.workers) == (7, 1, 3)
        assert settings.ebm.max_bins == 256

    def test_not_a_mapping(self, tmp_path: Path) -> None:
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_settings(path)

    def test_unreadable(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError):
            load_settings(tmp_path / "missing.yaml")


class TestRunConfig:
    """Tests for per-invocation configuration."""

    def test_budget_normalized(self) -> None:
        config = RunConfig(subcommand="summarize", budget=" words:150 ")
        assert config.budget == "words:150"
        assert config.summary_budget == SummaryBudget.words(150)

    def test_bad_budget(self) -> None:
        with pytest.raises(ValidationError):
            RunConfig(subcommand="label", budget="paragraphs:2")

    def test_frozen(self) -> None:
        config = RunConfig(subcommand="train", model_kind="gaminet")
        assert config.model_kind is ModelKind.GAMINET
        with pytest.raises(ValidationError):
            config.seed = 3

    def test_gaminet_layers(self) -> None:
        with pytest.raises(ValidationError):
            GaminetConfig(hidden_layers=())
