"""
Tests for subnetworks, the clarity penalty and the staged GAMI-Net trainer.
"""

import itertools

import numpy as np
import pytest

from src.config.settings import GaminetConfig
from src.errors import StepSizeError, TrainingError
from src.oracle.labeling import TrainingSet
from src.testing.framework import PlantedData, assert_bit_identical, assert_heredity
from src.training.gaminet import GaminetModel, prune_by_contribution, train_gaminet
from src.training.subnetwork import (
    Batch,
    Subnetwork,
    SubnetworkKind,
    analytic_gradients,
    clarity_from_outputs,
    clarity_penalty,
    gradient_check,
)

QUICK = GaminetConfig(epochs=(3, 2, 2), hidden_layers=(8,), interactions=2, seed=2)


def _batch(kind: SubnetworkKind, n: int, rng: np.random.Generator) -> Batch:
    arity = 1 if kind is SubnetworkKind.MAIN else 2
    x = rng.uniform(size=(n, arity))
    y = (rng.uniform(size=n) < 0.4).astype(np.float64)
    bins = (x * 4).astype(np.int64) if arity == 2 else None
    return Batch(x, y, bins)


class TestPruning:
    """Tests for prune_by_contribution."""

    def test_smallest_prefix_reaching_tau(self) -> None:
        variances = {0: 5.0, 1: 3.0, 2: 1.0, 3: 1.0}
        assert prune_by_contribution(variances, 0.8) == [0, 1]
        assert prune_by_contribution(variances, 0.81) == [0, 1, 2]
        assert prune_by_contribution(variances, 1.0) == [0, 1, 2, 3]

    def test_pairs_and_zero_variance(self) -> None:
        assert prune_by_contribution({(0, 1): 2.0, (1, 2): 0.0}, 0.9) == [(0, 1)]
        assert prune_by_contribution({0: 0.0, 1: 0.0}, 0.5) == []


class TestSubnetwork:
    """Tests for the MLP building block."""

    def test_fresh_network_outputs_zero(self) -> None:
        net = Subnetwork.initialize(SubnetworkKind.PAIR, (0, 3), (8, 8), np.random.default_rng(0))
        assert np.all(net.forward(np.random.default_rng(1).uniform(size=(10, 2))) == 0.0)

    def test_backward_needs_forward(self) -> None:
        net = Subnetwork.initialize(SubnetworkKind.MAIN, (0,), (4,), np.random.default_rng(0))
        with pytest.raises(RuntimeError):
            net.backward(np.zeros(3))

    def test_arity_checked(self) -> None:
        with pytest.raises(ValueError):
            Subnetwork(SubnetworkKind.MAIN, (0, 1), [np.zeros((1, 1))], [np.zeros(1)])

    def test_dict_form(self) -> None:
        net = Subnetwork.initialize(SubnetworkKind.PAIR, (1, 2), (5,), np.random.default_rng(3), zero_output=False)
        restored = Subnetwork.from_dict(net.to_dict())
        x = np.random.default_rng(4).uniform(size=(7, 2))
        assert np.array_equal(restored.forward(x), net.forward(x))
        assert restored.features == (1, 2)

    @pytest.mark.parametrize("kind,layers,clarity", [
        (SubnetworkKind.MAIN, (4,), 0.0),
        (SubnetworkKind.MAIN, (6, 3), 0.0),
        (SubnetworkKind.PAIR, (5,), 0.0),
        (SubnetworkKind.PAIR, (4, 4), 0.5),
        (SubnetworkKind.PAIR, (3, 6), 2.0),
    ])
    def test_gradient_check(self, kind: SubnetworkKind, layers, clarity: float) -> None:
        """Test backpropagation against central finite differences."""
        rng = np.random.default_rng(len(layers) * 10 + int(clarity * 4))
        features = (0,) if kind is SubnetworkKind.MAIN else (0, 1)
        net = Subnetwork.initialize(kind, features, layers, rng, zero_output=False)
        assert gradient_check(net, _batch(kind, 24, rng), clarity) < 1e-4

    def test_zero_weights_closed_form(self) -> None:
        """Test an all-zero network: only the output bias gets a gradient, 0.5 - mean(y)."""
        net = Subnetwork(SubnetworkKind.MAIN, (0,), [np.zeros((1, 4)), np.zeros((4, 1))], [np.zeros(4), np.zeros(1)])
        batch = _batch(SubnetworkKind.MAIN, 30, np.random.default_rng(5))
        grads = analytic_gradients(net, batch)
        assert grads[-1][0] == pytest.approx(0.5 - batch.y.mean())
        for grad in grads[:-1]:
            assert np.all(grad == 0.0)


class TestClarity:
    """Tests for the marginal clarity penalty."""

    def test_constant_output(self) -> None:
        bins = np.array([[0, 0], [0, 1], [1, 0], [1, 1], [2, 1]])
        penalty, _ = clarity_from_outputs(np.full(5, 0.7), bins)
        assert penalty == pytest.approx(0.49)

    def test_constant_network(self) -> None:
        net = Subnetwork(SubnetworkKind.PAIR, (0, 1), [np.zeros((2, 3)), np.zeros((3, 1))], [np.zeros(3), np.array([-1.5])])
        batch = _batch(SubnetworkKind.PAIR, 40, np.random.default_rng(6))
        assert clarity_penalty(net, batch) == pytest.approx(2.25)

    def test_symmetric_product_is_clear(self) -> None:
        """Test a product of centered inputs on a full grid has zero marginal means."""
        values = np.linspace(-1.0, 1.0, 6)
        grid = np.array(list(itertools.product(range(6), range(6))))
        outputs = values[grid[:, 0]] * values[grid[:, 1]]
        penalty, grad = clarity_from_outputs(outputs, grid)
        assert penalty == pytest.approx(0.0, abs=1e-20)
        assert np.allclose(grad, 0.0, atol=1e-15)

    def test_zero_weight_matches_no_bins(self) -> None:
        rng = np.random.default_rng(7)
        net = Subnetwork.initialize(SubnetworkKind.PAIR, (0, 1), (4,), rng, zero_output=False)
        batch = _batch(SubnetworkKind.PAIR, 20, rng)
        with_bins = analytic_gradients(net, batch, 0.0)
        without = analytic_gradients(net, Batch(batch.x, batch.y), 0.0)
        for a, b in zip(with_bins, without):
            assert np.array_equal(a, b)

    def test_main_networks_have_no_penalty(self) -> None:
        net = Subnetwork.initialize(SubnetworkKind.MAIN, (0,), (4,), np.random.default_rng(8), zero_output=False)
        assert clarity_penalty(net, _batch(SubnetworkKind.MAIN, 10, np.random.default_rng(8))) == 0.0


class TestTrainGaminet:
    """Tests for the staged trainer on small budgets."""

    def test_deterministic(self, additive_data: PlantedData) -> None:
        train, val = additive_data.split()
        first = train_gaminet(train, val, QUICK)
        second = train_gaminet(train, val, QUICK)
        assert_bit_identical(first.additive, second.additive)

    def test_structure(self, additive_data: PlantedData) -> None:
        train, val = additive_data.split()
        model = train_gaminet(train, val, QUICK)
        assert isinstance(model, GaminetModel)
        assert model.metadata["model_kind"] == "gaminet"
        assert_heredity(model.additive)
        assert sorted(model.additive.mains) == model.metadata["retained_mains"]
        p = model.predict_proba(val.features)
        assert np.all((p > 0.0) & (p < 1.0))

    def test_divergent_step_size(self, additive_data: PlantedData) -> None:
        with pytest.raises(StepSizeError) as excinfo:
            train_gaminet(additive_data.training_set, config=GaminetConfig(epochs=(2, 1, 1), step_size=float("inf")))
        assert excinfo.value.diagnostics["stage"] == "stage1"

    def test_single_class(self) -> None:
        x = np.random.default_rng(0).uniform(size=(20, 2))
        with pytest.raises(TrainingError):
            train_gaminet(TrainingSet.from_arrays(x, np.ones(20, dtype=np.int64)), config=QUICK)


@pytest.fixture(scope="module")
def trained_additive(additive_data: PlantedData) -> GaminetModel:
    train, val = additive_data.split()
    config = GaminetConfig(epochs=(80, 10, 10), step_size=0.3, interactions=1, tau=0.98, seed=1)
    return train_gaminet(train, val, config)


@pytest.mark.slow
class TestPlantedAdditive:
    """Pruning and export on data with two true features and two noise features."""

    def test_noise_features_pruned(self, trained_additive: GaminetModel) -> None:
        assert trained_additive.metadata["retained_mains"] == [0, 1]
        assert trained_additive.metadata["pruned_mains"] == [2, 3]
        assert_heredity(trained_additive.additive)

    def test_pruned_feature_does_not_move_predictions(self, trained_additive: GaminetModel, additive_data: PlantedData) -> None:
        in_pairs = {f for pair in trained_additive.additive.pairs for f in pair}
        free = [f for f in trained_additive.metadata["pruned_mains"] if f not in in_pairs]
        assert free
        x = additive_data.x[:200].copy()
        base = trained_additive.predict_logit(x)
        for f in free:
            moved = x.copy()
            moved[:, f] = np.random.default_rng(f).uniform(size=200)
            assert np.array_equal(trained_additive.predict_logit(moved), base)

    def test_exported_grid_matches_networks(self, trained_additive: GaminetModel, additive_data: PlantedData) -> None:
        x = additive_data.x
        grid = trained_additive.predict_logit(x)
        native = trained_additive.predict_logit_native(x)
        assert float(np.sqrt(np.mean((grid - native) ** 2))) < 0.05
