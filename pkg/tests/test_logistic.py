"""
Tests for the logistic-regression baseline.
"""

import warnings

import numpy as np
import pytest

from src.config.settings import LogisticConfig
from src.errors import LogisticConvergenceWarning, TrainingError
from src.gam.logistic import fit_logistic_coefficients, logistic_loss, train_logistic
from src.monitoring.metrics import TrainingLog
from src.oracle.labeling import TrainingSet
from src.testing.framework import irls_logistic


def _linear_data(n: int = 2000, seed: int = 0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 3))
    logit = 0.8 * x[:, 0] - 1.2 * x[:, 1] + 0.3
    y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-logit))).astype(np.int64)
    return x, y


class TestFitCoefficients:
    """Tests for gradient-descent fitting."""

    def test_matches_newton_solution(self) -> None:
        x, y = _linear_data()
        fit = fit_logistic_coefficients(x, y, LogisticConfig(tol=1e-9, max_iter=50_000, early_stopping=False))
        weights, bias = irls_logistic(x, y.astype(np.float64))
        assert fit.converged
        assert np.allclose(fit.weights, weights, atol=1e-5)
        assert fit.bias == pytest.approx(bias, abs=1e-5)

    def test_symmetric_data_gives_zero_weight(self) -> None:
        x = np.array([[-1.0], [1.0], [-1.0], [1.0]])
        y = np.array([0, 0, 1, 1])
        fit = fit_logistic_coefficients(x, y, LogisticConfig(early_stopping=False))
        assert fit.weights[0] == 0.0
        assert fit.bias == 0.0

    def test_iteration_cap_warns(self) -> None:
        x, y = _linear_data(200, seed=1)
        with pytest.warns(LogisticConvergenceWarning):
            fit = fit_logistic_coefficients(x, y, LogisticConfig(max_iter=1, early_stopping=False))
        assert not fit.converged
        assert fit.iterations == 1

    def test_separable_data(self) -> None:
        """Test separable data classifies perfectly while warning about convergence."""
        half = np.linspace(0.1, 1.0, 50)
        x = np.concatenate([-half, half]).reshape(-1, 1)
        y = np.concatenate([np.zeros(50), np.ones(50)]).astype(np.int64)
        with pytest.warns(LogisticConvergenceWarning):
            model = train_logistic(TrainingSet.from_arrays(x, y), LogisticConfig(max_iter=500, early_stopping=False), feature_names=["x"])
        predicted = (model.predict_proba(x) > 0.5).astype(np.int64)
        assert np.array_equal(predicted, y)

    def test_early_stopping_logs_losses(self) -> None:
        x, y = _linear_data(1000, seed=2)
        x_val, y_val = _linear_data(300, seed=3)
        log = TrainingLog()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LogisticConvergenceWarning)
            fit_logistic_coefficients(x, y, LogisticConfig(max_iter=300, patience=20), x_val, y_val, log)
        rows = log.rows("logistic")
        assert rows
        assert all(np.isfinite(r.val_loss) for r in rows)
        assert rows[-1].train_loss < rows[0].train_loss

    def test_logs_every_iteration_without_validation(self) -> None:
        x, y = _linear_data(400, seed=5)
        log = TrainingLog()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LogisticConvergenceWarning)
            fit = fit_logistic_coefficients(x, y, LogisticConfig(max_iter=40, early_stopping=False), training_log=log)
        rows = log.rows("logistic")
        assert [r.round_index for r in rows] == list(range(1, fit.iterations + 1))
        assert all(np.isnan(r.val_loss) for r in rows)
        assert all(later.train_loss <= earlier.train_loss for earlier, later in zip(rows, rows[1:]))

    def test_non_finite_rows_rejected(self) -> None:
        x, y = _linear_data(50, seed=6)
        x[7, 1] = np.nan
        log = TrainingLog()
        with pytest.raises(TrainingError):
            fit_logistic_coefficients(x, y, LogisticConfig(early_stopping=False), training_log=log)
        assert len(log) == 0

    def test_non_finite_validation_rejected(self) -> None:
        x, y = _linear_data(50, seed=7)
        x_val, y_val = _linear_data(20, seed=8)
        x_val[0, 0] = np.inf
        with pytest.raises(TrainingError):
            fit_logistic_coefficients(x, y, LogisticConfig(), x_val, y_val)

    def test_loss(self) -> None:
        assert logistic_loss(np.zeros(4), np.array([0, 1, 0, 1])) == pytest.approx(np.log(2.0))


class TestTrainLogistic:
    """Tests for the additive form of the baseline."""

    def test_linear_on_grid_values(self) -> None:
        """Test the additive model reproduces the linear logit when every value has its own bin."""
        rng = np.random.default_rng(4)
        x = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], size=(1500, 2))
        logit = 2.0 * x[:, 0] - 1.0
        y = (rng.uniform(size=1500) < 1.0 / (1.0 + np.exp(-logit))).astype(np.int64)
        model = train_logistic(TrainingSet.from_arrays(x, y), LogisticConfig(early_stopping=False, tol=1e-8), feature_names=["p", "q"])
        weights = np.array([model.metadata["coefficients"]["p"], model.metadata["coefficients"]["q"]])
        expected = x @ weights + model.metadata["bias"]
        assert np.allclose(model.predict_logit(x), expected, atol=1e-9)
        assert model.pairs == {}
        assert sorted(model.mains) == [0, 1]

    def test_single_class(self) -> None:
        x = np.random.default_rng(0).uniform(size=(10, 2))
        with pytest.raises(TrainingError):
            train_logistic(TrainingSet.from_arrays(x, np.zeros(10, dtype=np.int64)))
