"""
Tests for model files and the trainer registry.
"""

import json
import warnings
from pathlib import Path

import numpy as np
import pytest

from src.config.settings import EbmConfig, GaminetConfig, LogisticConfig, ModelKind, Settings
from src.corpus.persistence import FORMAT_VERSION, load_model, model_document, model_from_document, save_model
from src.errors import LogisticConvergenceWarning, ModelIntegrityError, UnsupportedModelVersionError
from src.gam.model import AdditiveModel
from src.testing.framework import PlantedData, assert_bit_identical
from src.training.gaminet import GaminetModel
from src.training.registry import as_additive, train_model

SMALL = Settings(
    ebm=EbmConfig(rounds=20, bags=2, interactions=2, interaction_rounds=10, max_bins=16),
    gaminet=GaminetConfig(epochs=(2, 2, 1), hidden_layers=(6,), interactions=2),
    logistic=LogisticConfig(max_iter=500),
)


@pytest.fixture(scope="module")
def ebm_model(additive_data: PlantedData) -> AdditiveModel:
    train, val = additive_data.split()
    return train_model(ModelKind.EBM, train, val, SMALL)


class TestModelFiles:
    """Tests for save_model / load_model."""

    def test_predictions_bit_identical(self, tmp_path: Path, ebm_model: AdditiveModel) -> None:
        save_model(ebm_model, tmp_path / "m.json", SMALL.ebm.model_dump())
        loaded = load_model(tmp_path / "m.json")
        rows = np.random.default_rng(0).uniform(-0.1, 1.1, size=(100, ebm_model.n_features))
        assert np.array_equal(loaded.predict_proba(rows), ebm_model.predict_proba(rows))
        assert_bit_identical(loaded, ebm_model)
        assert loaded.metadata["model_kind"] == "ebm"

    def test_saving_twice_is_byte_identical(self, tmp_path: Path, ebm_model: AdditiveModel) -> None:
        save_model(ebm_model, tmp_path / "a.json")
        save_model(ebm_model, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_tampered_file(self, tmp_path: Path, ebm_model: AdditiveModel) -> None:
        document = model_document(ebm_model)
        document["payload"]["intercept"] += 1.0
        path = tmp_path / "tampered.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(ModelIntegrityError):
            load_model(path)

    def test_unknown_version_checked_first(self, ebm_model: AdditiveModel) -> None:
        document = model_document(ebm_model)
        document["format_version"] = FORMAT_VERSION + 1
        del document["payload"]
        with pytest.raises(UnsupportedModelVersionError):
            model_from_document(document)

    def test_missing_key(self, ebm_model: AdditiveModel) -> None:
        document = model_document(ebm_model)
        del document["networks"]
        with pytest.raises(ModelIntegrityError):
            model_from_document(document)

    def test_not_json(self, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text('{"format_version": 1, ', encoding="utf-8")
        with pytest.raises(ModelIntegrityError):
            load_model(path)

    def test_training_config_echo(self, ebm_model: AdditiveModel) -> None:
        document = model_document(ebm_model, SMALL.ebm.model_dump())
        assert document["training_config"]["rounds"] == 20
        assert document["feature_names"] == list(ebm_model.feature_names)


class TestRegistry:
    """Tests for train_model and saving every kind."""

    def test_gaminet_round_trip(self, tmp_path: Path, additive_data: PlantedData) -> None:
        train, val = additive_data.split()
        model = train_model("gaminet", train, val, SMALL)
        assert isinstance(model, GaminetModel)
        save_model(model, tmp_path / "g.json")
        loaded = load_model(tmp_path / "g.json")
        assert isinstance(loaded, GaminetModel)
        assert_bit_identical(loaded.additive, model.additive)
        rows = additive_data.x[:50]
        assert np.array_equal(loaded.predict_logit_native(rows), model.predict_logit_native(rows))

    def test_logistic_kind(self, additive_data: PlantedData) -> None:
        train, val = additive_data.split()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LogisticConvergenceWarning)
            model = train_model(ModelKind.LOGISTIC, train, val, SMALL)
        assert as_additive(model) is model
        assert model.pairs == {}

    def test_unknown_kind(self, additive_data: PlantedData) -> None:
        with pytest.raises(ValueError):
            train_model("forest", additive_data.training_set)
