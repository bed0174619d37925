"""
Random forest of Gini classification trees.

Each tree gets its own seed substream (bootstrap draw and per-split feature
sampling), so the forest is identical whatever the number of workers.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from ..errors import InvalidHyperparameters
from ..utils.seeding import derive_seed
from .specs import ForestParams
from .tree import DecisionTree, TreeBuilder

logger = logging.getLogger(__name__)


@dataclass
class ForestModel:
    trees: List[DecisionTree]
    tree_seeds: List[int]
    mtry: int
    width: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        # fixed tree order keeps the float sum reproducible
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "trees": [t.to_dict() for t in self.trees],
            "tree_seeds": list(self.tree_seeds),
            "mtry": self.mtry,
            "width": self.width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestModel":
        return cls(
            trees=[DecisionTree.from_dict(t) for t in d["trees"]],
            tree_seeds=[int(s) for s in d["tree_seeds"]],
            mtry=int(d["mtry"]),
            width=int(d["width"]),
        )


def resolve_mtry(params: ForestParams, width: int) -> int:
    mtry = params.mtry if params.mtry is not None else max(1, math.ceil(math.sqrt(width)))
    if width and mtry > width:
        raise InvalidHyperparameters("random_forest", f"mtry={mtry} exceeds the {width} available features")
    return mtry


def _grow_tree(X: np.ndarray, y: np.ndarray, params: ForestParams, mtry: int, seed: int) -> DecisionTree:
    rng = np.random.Generator(np.random.PCG64(seed))
    n = X.shape[0]
    if params.bootstrap:
        size = params.sample_size or n
        rows = rng.integers(0, n, size=size)
        X_s, y_s = X[rows], y[rows]
    else:
        X_s, y_s = X, y
    builder = TreeBuilder(
        criterion="gini",
        max_depth=params.max_depth,
        min_samples_leaf=params.min_samples_leaf,
        min_samples_split=params.min_samples_split,
        mtry=mtry if mtry < X.shape[1] else None,
        rng=rng,
    )
    return builder.build(X_s, y_s)


def train_random_forest(X: np.ndarray, y: np.ndarray, params: ForestParams, seed: int, workers: int = 1) -> ForestModel:
    """
    Grow ``n_trees`` trees, each on a seeded bootstrap resample.

    Args:
        X (np.ndarray): Encoded design matrix
        y (np.ndarray): 0/1 labels
        params (ForestParams): Forest hyperparameters
        seed (int): Root seed of the per-tree substreams
        workers (int): Parallel tree builders; does not affect the result

    Returns:
        ForestModel: Trees in seed order

    Raises:
        InvalidHyperparameters: If mtry exceeds the feature count
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mtry = resolve_mtry(params, X.shape[1])
    seeds = [derive_seed(seed, "tree", t) for t in range(params.n_trees)]
    trees = Parallel(n_jobs=workers)(delayed(_grow_tree)(X, y, params, mtry, s) for s in seeds)
    depths = [t.depth() for t in trees]
    logger.info(
        f"Random forest trained: {len(trees)} trees, mtry={mtry}, "
        f"depth {min(depths)}-{max(depths)}, mean leaves {np.mean([t.n_leaves for t in trees]):.1f}"
    )
    return ForestModel(trees=list(trees), tree_seeds=seeds, mtry=mtry, width=X.shape[1])
