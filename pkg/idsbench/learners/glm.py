"""
Logistic regression (binomial GLM) fitted by full-batch gradient descent on
the L2-regularized logistic loss.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.special import expit

from ..errors import NonFiniteLoss
from .specs import GlmParams

logger = logging.getLogger(__name__)

PROB_CLIP = 1e-12


def log_loss(p: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy, probabilities clamped inside the logs only."""
    p = np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def glm_loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float) -> Tuple[float, np.ndarray, float]:
    """
    Regularized logistic loss and its gradient.

    loss = mean cross-entropy + l2/2 * ||w||^2 (bias not penalized)

    Returns:
        Tuple[float, np.ndarray, float]: (loss, dloss/dw, dloss/db)
    """
    p = expit(X @ w + b)
    residual = p - y
    n = max(X.shape[0], 1)
    loss = log_loss(p, y) + 0.5 * l2 * float(w @ w)
    grad_w = X.T @ residual / n + l2 * w
    grad_b = float(residual.sum() / n)
    return loss, grad_w, grad_b


@dataclass
class GlmModel:
    weights: np.ndarray
    bias: float
    l2: float
    loss_trace: List[float] = field(default_factory=list)

    @property
    def width(self) -> int:
        return int(self.weights.shape[0])

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights + self.bias

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(X))

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias, "l2": self.l2}

    @classmethod
    def from_dict(cls, d: dict) -> "GlmModel":
        return cls(weights=np.asarray(d["weights"], dtype=np.float64), bias=float(d["bias"]), l2=float(d["l2"]))


def train_glm(X: np.ndarray, y: np.ndarray, params: GlmParams) -> GlmModel:
    """
    Fit logistic regression from zero initialization.

    Args:
        X (np.ndarray): Encoded design matrix
        y (np.ndarray): 0/1 labels
        params (GlmParams): Penalty, step size and iteration budget

    Returns:
        GlmModel: The fitted model (loss_trace holds the loss before each step)

    Raises:
        NonFiniteLoss: If the loss diverges
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.zeros(X.shape[1])
    b = 0.0
    trace = []
    for step in range(params.n_iter):
        loss, grad_w, grad_b = glm_loss_and_grad(w, b, X, y, params.l2)
        if not np.isfinite(loss):
            raise NonFiniteLoss("glm", step)
        trace.append(loss)
        w -= params.learning_rate * grad_w
        b -= params.learning_rate * grad_b
        if step % 100 == 0:
            logger.debug(f"glm step {step}: loss={loss:.6f}")
    if trace:
        logger.info(f"GLM trained: {params.n_iter} steps, final loss {trace[-1]:.6f}")
    return GlmModel(weights=w, bias=b, l2=params.l2, loss_trace=trace)
