"""
Row selection: random under-sampling, stratified train/test split and
stratified k-fold assignment. All index vectors are returned sorted
ascending so downstream row order never depends on the shuffle.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Literal, Tuple

import numpy as np

from ..errors import DegenerateSplit, SingleClassInput, TooFewRowsPerClass
from ..utils.seeding import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    method: Literal["random_under_sampling"] = "random_under_sampling"


@dataclass(frozen=True)
class SplitPlan:
    test_fraction: float
    seed: int
    train_idx: np.ndarray
    test_idx: np.ndarray


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    fold_of: np.ndarray
    seed: int

    def split(self, fold: int) -> Tuple[np.ndarray, np.ndarray]:
        """Return (training positions, held-out positions) for one fold."""
        held = self.fold_of == fold
        return np.flatnonzero(~held), np.flatnonzero(held)


def _class_counts(labels: np.ndarray) -> Dict[int, int]:
    return {c: int((labels == c).sum()) for c in (0, 1)}


def undersample(labels: np.ndarray, cfg: SamplerConfig) -> np.ndarray:
    """
    Balance classes by dropping a random subset of the majority class.

    Args:
        labels (np.ndarray): 0/1 labels of the full dataset
        cfg (SamplerConfig): Sampler seed

    Returns:
        np.ndarray: Retained row indices, sorted ascending

    Raises:
        SingleClassInput: If one class is absent
    """
    labels = np.asarray(labels)
    counts = _class_counts(labels)
    if counts[0] == 0 or counts[1] == 0:
        raise SingleClassInput(present=1 if counts[1] else 0)

    minority = 0 if counts[0] <= counts[1] else 1
    n_min = counts[minority]
    keep_minority = np.flatnonzero(labels == minority)
    majority_idx = np.flatnonzero(labels != minority)
    rng = make_rng(cfg.seed, "undersample")
    keep_majority = rng.choice(majority_idx, size=n_min, replace=False)
    retained = np.sort(np.concatenate([keep_minority, keep_majority]))
    logger.info(f"Under-sampling kept {n_min}/{n_min} of {counts[0]}/{counts[1]} rows")
    return retained


def stratified_split(labels: np.ndarray, test_fraction: float, seed: int) -> SplitPlan:
    """
    Split positions into train and test sets, per class.

    The total test size is round-half-up of ``test_fraction * n``; it is
    distributed over the classes by largest remainder, ties broken by a
    seeded draw, so every class gets floor or ceil of its own quota.

    Raises:
        DegenerateSplit: If a class would end up with no train or no test rows
    """
    labels = np.asarray(labels)
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = make_rng(seed, "split")
    n = labels.shape[0]
    counts = _class_counts(labels)
    total = int(math.floor(test_fraction * n + 0.5))
    quotas = {c: test_fraction * counts[c] for c in (0, 1)}
    n_test = {c: int(math.floor(quotas[c])) for c in (0, 1)}
    tie_order = rng.permutation(2)
    # classes by descending remainder, seeded order among equal remainders
    order = sorted((0, 1), key=lambda c: (-(quotas[c] - n_test[c]), int(tie_order[c])))
    for c in order[: max(0, total - sum(n_test.values()))]:
        n_test[c] += 1

    train_parts, test_parts = [], []
    for c in (0, 1):
        n_train_c = counts[c] - n_test[c]
        if n_test[c] < 1 or n_train_c < 1:
            raise DegenerateSplit(label=c, n_train=n_train_c, n_test=n_test[c])
        members = rng.permutation(np.flatnonzero(labels == c))
        test_parts.append(members[: n_test[c]])
        train_parts.append(members[n_test[c]:])

    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    logger.info(f"Split {n} rows into {train_idx.size} train / {test_idx.size} test (fraction {test_fraction})")
    return SplitPlan(test_fraction=test_fraction, seed=seed, train_idx=train_idx, test_idx=test_idx)


def kfold(labels: np.ndarray, k: int, seed: int) -> FoldAssignment:
    """
    Stratified k-fold assignment.

    Each class is shuffled and dealt round-robin over the folds, the second
    class continuing where the first stopped, so per-fold class counts differ
    by at most one and fold sizes stay balanced. ``k == n`` gives
    leave-one-out.

    Raises:
        TooFewRowsPerClass: If k < 2, or some class has fewer than k rows (except leave-one-out)
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    counts = _class_counts(labels)
    leave_one_out = k == n
    if k < 2 or k > n or (not leave_one_out and min(counts.values()) < k):
        raise TooFewRowsPerClass(k, counts)

    rng = make_rng(seed, "kfold")
    fold_of = np.empty(n, dtype=np.int64)
    offset = 0
    for c in (0, 1):
        members = rng.permutation(np.flatnonzero(labels == c))
        fold_of[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    return FoldAssignment(k=k, fold_of=fold_of, seed=seed)
