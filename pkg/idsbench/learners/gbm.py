"""
Gradient boosting machine for binary classification.

Starts from the log-odds of the training base rate and adds depth-limited
regression trees fit to the logistic-loss gradients, with Newton leaf
values and shrinkage.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.special import expit, logit

from .glm import PROB_CLIP, log_loss
from .specs import GbmParams
from .tree import DecisionTree, TreeBuilder

logger = logging.getLogger(__name__)


@dataclass
class GbmModel:
    prior: float
    trees: List[DecisionTree]
    shrinkage: float
    width: int
    loss_trace: List[float] = field(default_factory=list)

    def raw_score(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return self.prior + self.shrinkage * total

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.raw_score(X))

    def to_dict(self) -> dict:
        return {
            "prior": self.prior,
            "trees": [t.to_dict() for t in self.trees],
            "shrinkage": self.shrinkage,
            "width": self.width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GbmModel":
        return cls(
            prior=float(d["prior"]),
            trees=[DecisionTree.from_dict(t) for t in d["trees"]],
            shrinkage=float(d["shrinkage"]),
            width=int(d["width"]),
        )


def base_rate_log_odds(y: np.ndarray) -> float:
    rate = float(np.mean(y)) if y.size else 0.5
    return float(logit(np.clip(rate, PROB_CLIP, 1.0 - PROB_CLIP)))


def train_gbm(X: np.ndarray, y: np.ndarray, params: GbmParams) -> GbmModel:
    """
    Fit the boosting machine.

    Args:
        X (np.ndarray): Encoded design matrix
        y (np.ndarray): 0/1 labels
        params (GbmParams): Rounds, depth, shrinkage, leaf size and leaf regularizer

    Returns:
        GbmModel: Prior, trees in round order, and the training loss after each round
        (``loss_trace[0]`` is the prior-only loss)
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    prior = base_rate_log_odds(y)
    raw = np.full(X.shape[0], prior)
    builder = TreeBuilder(
        criterion="newton",
        max_depth=params.max_depth,
        min_samples_leaf=params.min_samples_leaf,
        min_samples_split=params.min_samples_split,
        leaf_l2=params.leaf_l2,
    )
    trees = []
    trace = [log_loss(expit(raw), y)]
    for round_ in range(params.n_rounds):
        p = expit(raw)
        grad = p - y
        hess = p * (1.0 - p)
        tree = builder.build(X, grad, hess)
        trees.append(tree)
        raw += params.shrinkage * tree.predict(X)
        trace.append(log_loss(expit(raw), y))
        logger.debug(f"gbm round {round_}: {tree.n_leaves} leaves, loss={trace[-1]:.6f}")
    logger.info(f"GBM trained: {len(trees)} rounds, final loss {trace[-1]:.6f}")
    return GbmModel(prior=prior, trees=trees, shrinkage=params.shrinkage, width=X.shape[1], loss_trace=trace)
