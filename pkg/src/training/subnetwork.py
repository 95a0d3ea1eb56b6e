"""
Small fully connected subnetworks with hand-written backpropagation.

A main subnetwork maps one feature to a scalar, a pair subnetwork maps two.
Hidden layers use tanh; the output layer is linear.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, log_expit

FD_STEP = 1e-5


class SubnetworkKind(Enum):
    MAIN = "main"
    PAIR = "pair"


@dataclass
class Batch:
    """
    Inputs and targets for one subnetwork.

    ``bins`` holds the parent-feature bin of each row (one column per input)
    and is only needed by the clarity penalty.
    """

    x: np.ndarray
    y: np.ndarray
    bins: Optional[np.ndarray] = None


class Subnetwork:
    """One additive effect: weights and biases of an MLP with scalar output."""

    def __init__(self, kind: SubnetworkKind, features: Tuple[int, ...], weights: List[np.ndarray], biases: List[np.ndarray]):
        arity = 1 if kind is SubnetworkKind.MAIN else 2
        if len(features) != arity or weights[0].shape[0] != arity:
            raise ValueError(f"{kind.value} subnetwork needs input arity {arity}")
        if weights[-1].shape[1] != 1:
            raise ValueError("subnetwork output must be scalar")
        self.kind = kind
        self.features = tuple(int(f) for f in features)
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self._cache: List[np.ndarray] = []

    @classmethod
    def initialize(
        cls,
        kind: SubnetworkKind,
        features: Sequence[int],
        hidden_layers: Sequence[int],
        rng: np.random.Generator,
        zero_output: bool = True,
    ) -> "Subnetwork":
        """
        Glorot-uniform hidden layers and, by default, a zero output layer.

        A zero output layer makes a fresh network contribute exactly 0.
        """
        sizes = [len(features)] + list(hidden_layers) + [1]
        weights, biases = [], []
        for layer, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            is_output = layer == len(sizes) - 2
            if is_output and zero_output:
                weights.append(np.zeros((fan_in, fan_out)))
            else:
                limit = np.sqrt(6.0 / (fan_in + fan_out))
                weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(kind, tuple(features), weights, biases)

    @property
    def arity(self) -> int:
        return self.weights[0].shape[0]

    def parameters(self) -> List[np.ndarray]:
        """Parameters in [W0, b0, W1, b1, ...] order; these are the live arrays."""
        out: List[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def copy(self) -> "Subnetwork":
        return Subnetwork(self.kind, self.features, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def forward(self, x: np.ndarray, dtype: Any = np.float64, keep: bool = True) -> np.ndarray:
        """
        Network output per row.

        Args:
            x: Inputs of shape (n, arity)
            dtype: Computation precision
            keep: Store activations for a following backward()

        Returns:
            Outputs of shape (n,)
        """
        h = np.asarray(x, dtype=dtype).reshape(-1, self.arity)
        activations = [h]
        last = len(self.weights) - 1
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w.astype(dtype) + b.astype(dtype)
            h = z if layer == last else np.tanh(z)
            activations.append(h)
        if keep:
            self._cache = activations
        return h[:, 0]

    def backward(self, grad_output: np.ndarray) -> List[np.ndarray]:
        """
        Parameter gradients given d(loss)/d(output) per row.

        Returns:
            Gradients aligned with parameters()
        """
        if not self._cache:
            raise RuntimeError("backward() needs a preceding forward()")
        activations = self._cache
        grad = np.asarray(grad_output, dtype=activations[-1].dtype).reshape(-1, 1)
        grads: List[np.ndarray] = []
        last = len(self.weights) - 1
        for layer in range(last, -1, -1):
            h_in, h_out = activations[layer], activations[layer + 1]
            if layer != last:
                grad = grad * (1.0 - h_out * h_out)
            grads.append(grad.sum(axis=0))
            grads.append(h_in.T @ grad)
            if layer > 0:
                grad = grad @ self.weights[layer].astype(grad.dtype).T
        grads.reverse()
        return grads

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "features": list(self.features),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Subnetwork":
        return cls(
            SubnetworkKind(data["kind"]),
            tuple(data["features"]),
            [np.asarray(w, dtype=np.float64).reshape(len(w), -1) for w in data["weights"]],
            [np.asarray(b, dtype=np.float64) for b in data["biases"]],
        )


def clarity_from_outputs(outputs: np.ndarray, bins: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Marginal clarity penalty of pair outputs and its gradient.

    For each parent axis, the outputs are averaged within every occupied bin;
    the penalty is half the sum over both axes of the mean squared bin
    average. A constant output c gives c squared.

    Args:
        outputs: Pair outputs per row
        bins: Parent bins per row, shape (n, 2)

    Returns:
        (penalty, d penalty / d output per row)
    """
    outputs = np.asarray(outputs)
    bins = np.asarray(bins, dtype=np.int64).reshape(-1, 2)
    penalty = outputs.dtype.type(0.0)
    grad = np.zeros_like(outputs)
    for axis in range(2):
        column = bins[:, axis]
        size = int(column.max()) + 1 if column.size else 0
        counts = np.bincount(column, minlength=size).astype(outputs.dtype)
        sums = np.zeros(size, dtype=outputs.dtype)
        np.add.at(sums, column, outputs)
        occupied = counts > 0
        n_occupied = int(occupied.sum())
        if n_occupied == 0:
            continue
        means = np.where(occupied, sums / np.where(occupied, counts, 1), 0)
        penalty = penalty + 0.5 * np.sum(means[occupied] ** 2) / n_occupied
        grad = grad + (means[column] / counts[column]) / n_occupied
    return float(penalty) if outputs.dtype == np.float64 else penalty, grad


def clarity_penalty(network: Subnetwork, batch: Batch) -> float:
    """Clarity penalty of a pair subnetwork on a batch (0 for main subnetworks)."""
    if network.kind is not SubnetworkKind.PAIR or batch.bins is None:
        return 0.0
    value, _ = clarity_from_outputs(network.forward(batch.x, keep=False), batch.bins)
    return float(value)


def _check_loss(network: Subnetwork, batch: Batch, clarity_weight: float, dtype: Any) -> Tuple[Any, np.ndarray]:
    out = network.forward(batch.x, dtype=dtype)
    y = np.asarray(batch.y, dtype=dtype)
    n = y.size
    loss = -np.sum(y * log_expit(out) + (1 - y) * log_expit(-out)) / n
    grad = (expit(out) - y) / n
    if clarity_weight > 0.0 and network.kind is SubnetworkKind.PAIR and batch.bins is not None:
        penalty, penalty_grad = clarity_from_outputs(out, batch.bins)
        loss = loss + clarity_weight * penalty
        grad = grad + clarity_weight * penalty_grad
    return loss, grad


def _longdouble_loss(network: Subnetwork, batch: Batch, clarity_weight: float) -> np.longdouble:
    out = network.forward(batch.x, dtype=np.longdouble, keep=False)
    y = np.asarray(batch.y, dtype=np.longdouble)
    # log(1 + exp(-|z|)) form, evaluated in extended precision.
    softplus_neg = np.log1p(np.exp(-np.abs(out))) + np.maximum(-out, 0)
    softplus_pos = np.log1p(np.exp(-np.abs(out))) + np.maximum(out, 0)
    loss = np.sum(y * softplus_neg + (1 - y) * softplus_pos) / y.size
    if clarity_weight > 0.0 and network.kind is SubnetworkKind.PAIR and batch.bins is not None:
        penalty, _ = clarity_from_outputs(out, batch.bins)
        loss = loss + np.longdouble(clarity_weight) * penalty
    return loss


def analytic_gradients(network: Subnetwork, batch: Batch, clarity_weight: float = 0.0) -> List[np.ndarray]:
    """Backpropagated gradients of mean log-loss (plus weighted clarity) on the batch."""
    _, grad = _check_loss(network, batch, clarity_weight, np.float64)
    return network.backward(grad)


def gradient_check(network: Subnetwork, batch: Batch, clarity_weight: float = 0.0) -> float:
    """
    Compare backpropagation against central finite differences.

    The loss is the mean log-loss of the network output taken as a logit,
    plus ``clarity_weight`` times the clarity penalty for pair networks.
    Finite differences use step 1e-5 and are evaluated in long double.

    Args:
        network: Network with finite parameters (left unchanged)
        batch: Inputs, 0/1 targets and optional parent bins

    Returns:
        Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-6)
    """
    analytic = analytic_gradients(network, batch, clarity_weight)
    worst = 0.0
    for param, grad in zip(network.parameters(), analytic):
        flat = param.reshape(-1)
        grad_flat = grad.reshape(-1)
        for k in range(flat.size):
            original = flat[k]
            flat[k] = original + FD_STEP
            plus = _longdouble_loss(network, batch, clarity_weight)
            flat[k] = original - FD_STEP
            minus = _longdouble_loss(network, batch, clarity_weight)
            flat[k] = original
            numeric = float((plus - minus) / np.longdouble(2 * FD_STEP))
            a = float(grad_flat[k])
            denominator = max(abs(a), abs(numeric), 1e-6)
            worst = max(worst, abs(a - numeric) / denominator)
    return worst
