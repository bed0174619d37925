"""
Feed-forward neural network: ReLU hidden layers, logistic output,
cross-entropy loss, mini-batch SGD with momentum.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.special import expit

from ..errors import NonFiniteLoss
from .glm import log_loss
from .specs import MlpParams

logger = logging.getLogger(__name__)


def _forward(weights: List[np.ndarray], biases: List[np.ndarray], X: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]:
    """Returns (probabilities, layer inputs, hidden pre-activations)."""
    activations = [X]
    pre = []
    a = X
    for W, b in zip(weights[:-1], biases[:-1]):
        z = a @ W + b
        pre.append(z)
        a = np.maximum(z, 0.0)
        activations.append(a)
    logits = a @ weights[-1] + biases[-1]
    return expit(logits[:, 0]), activations, pre


def mlp_loss_and_grads(
    weights: List[np.ndarray], biases: List[np.ndarray], X: np.ndarray, y: np.ndarray, l2: float
) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    """
    Mean cross-entropy plus l2/2 * sum of squared weights, and its gradients
    by backpropagation.

    Returns:
        Tuple: (loss, weight gradients, bias gradients), layer by layer
    """
    p, activations, pre = _forward(weights, biases, X)
    n = max(X.shape[0], 1)
    loss = log_loss(p, y) + 0.5 * l2 * sum(float(np.sum(W * W)) for W in weights)

    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    delta = ((p - y) / n)[:, None]
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = activations[layer].T @ delta + l2 * weights[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer].T) * (pre[layer - 1] > 0.0)
    return loss, grad_w, grad_b


def init_layers(sizes: List[int], rng: np.random.Generator) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Fan-in scaled uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / max(fan_in, 1))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


@dataclass
class MlpModel:
    layer_sizes: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    loss_trace: List[float] = field(default_factory=list)

    @property
    def width(self) -> int:
        return self.layer_sizes[0]

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _forward(self.weights, self.biases, X)[0]

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlpModel":
        sizes = [int(s) for s in d["layer_sizes"]]
        weights = [np.asarray(W, dtype=np.float64).reshape(a, b) for W, a, b in zip(d["weights"], sizes[:-1], sizes[1:])]
        return cls(
            layer_sizes=sizes,
            weights=weights,
            biases=[np.asarray(b, dtype=np.float64) for b in d["biases"]],
        )


def train_mlp(X: np.ndarray, y: np.ndarray, params: MlpParams, seed: int) -> MlpModel:
    """
    Train the network.

    Args:
        X (np.ndarray): Standardized design matrix
        y (np.ndarray): 0/1 labels
        params (MlpParams): Architecture and optimizer settings
        seed (int): Seeds the initialization and the per-epoch batch order

    Returns:
        MlpModel: Final weights; loss_trace holds the mean batch loss per epoch

    Raises:
        NonFiniteLoss: If a batch loss diverges
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))
    sizes = [X.shape[1], *params.hidden_layers, 1]
    weights, biases = init_layers(sizes, rng)
    vel_w = [np.zeros_like(W) for W in weights]
    vel_b = [np.zeros_like(b) for b in biases]

    n = X.shape[0]
    trace = []
    step = 0
    for epoch in range(params.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, params.batch_size):
            batch = order[start:start + params.batch_size]
            loss, grad_w, grad_b = mlp_loss_and_grads(weights, biases, X[batch], y[batch], params.l2)
            if not np.isfinite(loss):
                raise NonFiniteLoss("mlp", step)
            for i in range(len(weights)):
                vel_w[i] = params.momentum * vel_w[i] - params.learning_rate * grad_w[i]
                vel_b[i] = params.momentum * vel_b[i] - params.learning_rate * grad_b[i]
                weights[i] += vel_w[i]
                biases[i] += vel_b[i]
            epoch_loss += loss * batch.size
            step += 1
        trace.append(epoch_loss / max(n, 1))
        logger.debug(f"mlp epoch {epoch}: mean batch loss={trace[-1]:.6f}")
    if trace:
        logger.info(f"MLP trained: layers {sizes}, {params.epochs} epochs, final loss {trace[-1]:.6f}")
    return MlpModel(layer_sizes=sizes, weights=weights, biases=biases, loss_trace=trace)
