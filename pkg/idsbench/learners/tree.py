"""
Binary decision trees shared by the forest and the boosting machine.

Internal nodes route ``x[feature] < threshold`` to the left child and
everything else to the right. Trees are grown depth-first over a per-feature
pre-sorted position matrix that is partitioned (not re-sorted) at each split.
"""

import logging
from dataclasses import dataclass
from typing import List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Criterion = Literal["gini", "newton"]

LEAF = -1
# Gains at or below this (relative to the parent term) do not count as improvement
_GAIN_EPS = 1e-12
# Gains within this relative distance of the best are ties
_TIE_RTOL = 1e-12


class Split(NamedTuple):
    feature: int
    threshold: float
    gain: float


@dataclass(frozen=True)
class TreeNode:
    """Read-only view of one node; ``feature == LEAF`` marks a leaf."""
    feature: int
    threshold: float
    left: int
    right: int
    value: float
    n_samples: int

    @property
    def is_leaf(self) -> bool:
        return self.feature == LEAF


@dataclass
class DecisionTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int((self.feature == LEAF).sum())

    def node(self, i: int) -> TreeNode:
        return TreeNode(
            feature=int(self.feature[i]),
            threshold=float(self.threshold[i]),
            left=int(self.left[i]),
            right=int(self.right[i]),
            value=float(self.value[i]),
            n_samples=int(self.n_samples[i]),
        )

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depths[self.left[i]] = depths[i] + 1
                depths[self.right[i]] = depths[i] + 1
        return int(depths.max()) if self.n_nodes else 0

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Index of the leaf each row lands on."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.arange(X.shape[0])
        while active.size:
            current = node[active]
            internal = self.feature[current] != LEAF
            active = active[internal]
            current = current[internal]
            if not active.size:
                break
            go_left = X[active, self.feature[current]] < self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=np.float64),
            n_samples=np.asarray(d["n_samples"], dtype=np.int64),
        )

    @classmethod
    def constant(cls, value: float, n_samples: int = 0) -> "DecisionTree":
        """A single-leaf tree."""
        return cls(
            feature=np.array([LEAF], dtype=np.int64),
            threshold=np.zeros(1),
            left=np.array([LEAF], dtype=np.int64),
            right=np.array([LEAF], dtype=np.int64),
            value=np.array([float(value)]),
            n_samples=np.array([n_samples], dtype=np.int64),
        )


def gini_split_gain(p_left: np.ndarray, n_left: np.ndarray, p_total: float, n_total: int) -> np.ndarray:
    """
    Gini impurity decrease of splitting a node into (left, right).

    Args:
        p_left: positives on the left side
        n_left: rows on the left side
        p_total: positives in the node
        n_total: rows in the node
    """
    q_left = n_left - p_left
    n_right = n_total - n_left
    p_right = p_total - p_left
    q_right = n_right - p_right
    q_total = n_total - p_total
    with np.errstate(divide="ignore", invalid="ignore"):
        score = (p_left * p_left + q_left * q_left) / n_left + (p_right * p_right + q_right * q_right) / n_right
    return (score - (p_total * p_total + q_total * q_total) / n_total) / n_total


def newton_split_gain(g_left: np.ndarray, h_left: np.ndarray, g_total: float, h_total: float, leaf_l2: float) -> np.ndarray:
    """Second-order gain of splitting a node, from gradient and hessian sums."""
    g_right = g_total - g_left
    h_right = h_total - h_left
    with np.errstate(divide="ignore", invalid="ignore"):
        return (
            g_left * g_left / (h_left + leaf_l2)
            + g_right * g_right / (h_right + leaf_l2)
            - g_total * g_total / (h_total + leaf_l2)
        )


def _scan_sorted(
    features: np.ndarray,
    values: np.ndarray,
    stats: Sequence[np.ndarray],
    criterion: Criterion,
    min_samples_leaf: int,
    leaf_l2: float,
) -> Optional[Split]:
    """
    Best split over candidate features whose node values are already sorted.

    ``values`` and every array in ``stats`` are (n_features, m), row r
    holding feature ``features[r]`` in ascending value order.
    """
    m = values.shape[1]
    if m < 2:
        return None
    n_left = np.arange(1, m, dtype=np.float64)
    if criterion == "gini":
        cum_pos = np.cumsum(stats[0], axis=1)
        p_total = float(cum_pos[0, -1])
        gain = gini_split_gain(cum_pos[:, :-1], n_left, p_total, m)
        parent_scale = 1.0
    else:
        cum_g = np.cumsum(stats[0], axis=1)
        cum_h = np.cumsum(stats[1], axis=1)
        g_total, h_total = float(cum_g[0, -1]), float(cum_h[0, -1])
        gain = newton_split_gain(cum_g[:, :-1], cum_h[:, :-1], g_total, h_total, leaf_l2)
        parent_term = g_total * g_total / (h_total + leaf_l2) if h_total + leaf_l2 > 0 else 0.0
        parent_scale = max(1.0, parent_term)

    valid = values[:, :-1] < values[:, 1:]
    valid &= (n_left >= min_samples_leaf) & (m - n_left >= min_samples_leaf)
    valid &= np.isfinite(gain)
    if not valid.any():
        return None
    gain = np.where(valid, gain, -np.inf)
    best = float(gain.max())
    if best <= _GAIN_EPS * parent_scale:
        return None

    # lowest feature slot first, then lowest threshold
    ties = gain >= best - _TIE_RTOL * max(1.0, abs(best))
    row, pos = np.unravel_index(int(np.argmax(ties)), ties.shape)
    lo, hi = float(values[row, pos]), float(values[row, pos + 1])
    threshold = 0.5 * (lo + hi)
    if not lo < threshold:
        threshold = hi
    return Split(feature=int(features[row]), threshold=threshold, gain=float(gain[row, pos]))


def best_split(
    X: np.ndarray,
    targets: np.ndarray,
    criterion: Criterion = "gini",
    hessians: Optional[np.ndarray] = None,
    min_samples_leaf: int = 1,
    leaf_l2: float = 0.0,
    features: Optional[Sequence[int]] = None,
) -> Optional[Split]:
    """
    Find the impurity-maximizing split of one node.

    Args:
        X (np.ndarray): Node rows, shape (m, p)
        targets (np.ndarray): 0/1 labels for "gini", gradients for "newton"
        criterion (str): "gini" (classification) or "newton" (boosting regression)
        hessians (np.ndarray, optional): Per-row hessians, required for "newton"
        min_samples_leaf (int): Smallest admissible child
        leaf_l2 (float): Leaf regularizer in the newton gain
        features (Sequence[int], optional): Candidate feature slots (default: all)

    Returns:
        Optional[Split]: Feature slot, midpoint threshold and gain, or None
        when no split improves the criterion
    """
    X = np.asarray(X, dtype=np.float64)
    feats = np.arange(X.shape[1]) if features is None else np.sort(np.asarray(features, dtype=np.int64))
    if X.shape[0] < 2 or feats.size == 0:
        return None
    order = np.argsort(X[:, feats], axis=0, kind="stable").T
    values = X[order, feats[:, None]]
    if criterion == "gini":
        stats = [np.asarray(targets, dtype=np.float64)[order]]
    else:
        if hessians is None:
            raise ValueError("newton criterion needs hessians")
        stats = [np.asarray(targets, dtype=np.float64)[order], np.asarray(hessians, dtype=np.float64)[order]]
    return _scan_sorted(feats, values, stats, criterion, min_samples_leaf, leaf_l2)


class TreeBuilder:
    """
    Grows one tree over a fixed sample.

    For "gini" trees the leaf value is the positive fraction of the leaf's
    rows; for "newton" trees it is ``-sum(g) / (sum(h) + leaf_l2)``.
    """

    def __init__(
        self,
        criterion: Criterion,
        max_depth: Optional[int] = None,
        min_samples_leaf: int = 1,
        min_samples_split: int = 2,
        mtry: Optional[int] = None,
        leaf_l2: float = 0.0,
        rng: Optional[np.random.Generator] = None,
    ):
        if mtry is not None and rng is None:
            raise ValueError("feature subsampling needs a random generator")
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_samples_split = max(min_samples_split, 2 * min_samples_leaf)
        self.mtry = mtry
        self.leaf_l2 = leaf_l2
        self.rng = rng

    def _leaf_value(self, positions: np.ndarray, targets: np.ndarray, hessians: Optional[np.ndarray]) -> float:
        if self.criterion == "gini":
            return float(np.mean(targets[positions]))
        return float(-np.sum(targets[positions]) / (np.sum(hessians[positions]) + self.leaf_l2))

    def _candidate_features(self, X: np.ndarray, sorted_pos: np.ndarray) -> np.ndarray:
        p = X.shape[1]
        cols = np.arange(p)
        non_constant = X[sorted_pos[:, 0], cols] < X[sorted_pos[:, -1], cols]
        if self.mtry is None:
            return np.flatnonzero(non_constant)
        # visit features in random order, constant ones do not count toward mtry
        perm = self.rng.permutation(p)
        return np.sort(perm[non_constant[perm]][: self.mtry])

    def build(self, X: np.ndarray, targets: np.ndarray, hessians: Optional[np.ndarray] = None) -> DecisionTree:
        """
        Grow a tree on all rows of X.

        Args:
            X (np.ndarray): Sample rows, shape (n, p); duplicates allowed
            targets (np.ndarray): 0/1 labels ("gini") or gradients ("newton")
            hessians (np.ndarray, optional): Hessians for "newton"
        """
        X = np.asarray(X, dtype=np.float64)
        targets = np.asarray(targets, dtype=np.float64)
        n, p = X.shape
        feature: List[int] = []
        threshold: List[float] = []
        left: List[int] = []
        right: List[int] = []
        value: List[float] = []
        n_samples: List[int] = []

        def new_node(positions: np.ndarray) -> int:
            feature.append(LEAF)
            threshold.append(0.0)
            left.append(LEAF)
            right.append(LEAF)
            value.append(self._leaf_value(positions, targets, hessians))
            n_samples.append(int(positions.size))
            return len(feature) - 1

        if n == 0:
            raise ValueError("cannot grow a tree on zero rows")

        root = new_node(np.arange(n))
        if p == 0:
            return self._finish(feature, threshold, left, right, value, n_samples)

        go_left = np.zeros(n, dtype=bool)
        root_sorted = np.argsort(X, axis=0, kind="stable").T
        stack: List[Tuple[int, np.ndarray, int]] = [(root, root_sorted, 0)]

        while stack:
            node_id, sorted_pos, depth = stack.pop()
            positions = sorted_pos[0]
            m = positions.size
            if m < self.min_samples_split or (self.max_depth is not None and depth >= self.max_depth):
                continue
            if self.criterion == "gini":
                node_pos = targets[positions].sum()
                if node_pos == 0 or node_pos == m:
                    continue

            feats = self._candidate_features(X, sorted_pos)
            if feats.size == 0:
                continue
            cand = sorted_pos[feats]
            values = X[cand, feats[:, None]]
            stats = [targets[cand]] if self.criterion == "gini" else [targets[cand], hessians[cand]]
            split = _scan_sorted(feats, values, stats, self.criterion, self.min_samples_leaf, self.leaf_l2)
            if split is None:
                continue

            go_left[positions] = X[positions, split.feature] < split.threshold
            mask = go_left[sorted_pos]
            m_left = int(go_left[positions].sum())
            left_sorted = sorted_pos[mask].reshape(p, m_left)
            right_sorted = sorted_pos[~mask].reshape(p, m - m_left)

            feature[node_id] = split.feature
            threshold[node_id] = split.threshold
            left_id = new_node(left_sorted[0])
            right_id = new_node(right_sorted[0])
            left[node_id] = left_id
            right[node_id] = right_id
            # right pushed first so the left subtree is expanded first
            stack.append((right_id, right_sorted, depth + 1))
            stack.append((left_id, left_sorted, depth + 1))

        return self._finish(feature, threshold, left, right, value, n_samples)

    @staticmethod
    def _finish(feature, threshold, left, right, value, n_samples) -> DecisionTree:
        return DecisionTree(
            feature=np.asarray(feature, dtype=np.int64),
            threshold=np.asarray(threshold, dtype=np.float64),
            left=np.asarray(left, dtype=np.int64),
            right=np.asarray(right, dtype=np.int64),
            value=np.asarray(value, dtype=np.float64),
            n_samples=np.asarray(n_samples, dtype=np.int64),
        )
