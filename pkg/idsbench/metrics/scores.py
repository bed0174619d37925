"""
Evaluation metrics: rank-statistic AUC, thresholded confusion counts,
F1 of the positive class and ROC polylines.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import SingleClassInput

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float = DEFAULT_THRESHOLD

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp else 0.0

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn, "threshold": self.threshold}


@dataclass(frozen=True)
class RocCurve:
    """Points from (0, 0) to (1, 1); ``thresholds[0]`` is +inf."""
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    def __len__(self) -> int:
        return self.fpr.shape[0]

    def area(self) -> float:
        return trapezoid_area(self.fpr, self.tpr)


@dataclass(frozen=True)
class EvalReport:
    model_id: str
    auc: float
    accuracy: float
    f_score: float
    confusion: ConfusionMatrix
    n_pos: int
    n_neg: int

    @property
    def precision(self) -> float:
        return self.confusion.precision

    @property
    def recall(self) -> float:
        return self.confusion.recall

    def to_dict(self) -> dict:
        return {
            "model": self.model_id,
            "auc": self.auc,
            "accuracy": self.accuracy,
            "f_score": self.f_score,
            "precision": self.precision,
            "recall": self.recall,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "confusion": self.confusion.to_dict(),
        }


def _check_inputs(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int64)
    if scores.shape != labels.shape:
        raise ValueError(f"scores {scores.shape} and labels {labels.shape} differ in shape")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    return scores, labels


def _require_both_classes(labels: np.ndarray) -> None:
    present = np.unique(labels)
    if present.size < 2:
        raise SingleClassInput(int(present[0]) if present.size else None)


def auc(scores, labels) -> float:
    """
    Probability that a random positive outscores a random negative, ties
    counted half. Computed from midranks (Mann-Whitney U).

    Raises:
        SingleClassInput: If only one class is present
    """
    scores, labels = _check_inputs(scores, labels)
    _require_both_classes(labels)
    ranks = rankdata(scores, method="average")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def confusion_at(scores, labels, threshold: float = DEFAULT_THRESHOLD) -> ConfusionMatrix:
    """Tally predictions, a score equal to the threshold counts as positive."""
    scores, labels = _check_inputs(scores, labels)
    predicted = scores >= threshold
    actual = labels == 1
    return ConfusionMatrix(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
        threshold=float(threshold),
    )


def f1(confusion: ConfusionMatrix) -> float:
    if confusion.tp == 0:
        return 0.0
    p, r = confusion.precision, confusion.recall
    return 2.0 * p * r / (p + r)


def roc_points(scores, labels) -> RocCurve:
    """
    Sweep a threshold down through every distinct score.

    Raises:
        SingleClassInput: If only one class is present
    """
    scores, labels = _check_inputs(scores, labels)
    _require_both_classes(labels)
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    y = labels[order]
    # last index of every run of tied scores
    ends = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tps = np.cumsum(y)[ends]
    fps = (ends + 1) - tps
    n_pos = tps[-1]
    n_neg = fps[-1]
    fpr = np.r_[0.0, fps / n_neg]
    tpr = np.r_[0.0, tps / n_pos]
    # the lowest threshold already reaches (1, 1)
    thresholds = np.r_[np.inf, s[ends]]
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds)


def trapezoid_area(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def evaluate(scores, labels, model_id: str, threshold: float = DEFAULT_THRESHOLD) -> EvalReport:
    """
    Assemble AUC, accuracy and F-score at the given threshold.

    Args:
        scores: Positive-class probabilities on the test rows
        labels: 0/1 test labels
        model_id (str): Row identifier, e.g. "GBM"
        threshold (float): Decision threshold

    Returns:
        EvalReport: The report row
    """
    scores, labels = _check_inputs(scores, labels)
    confusion = confusion_at(scores, labels, threshold)
    report = EvalReport(
        model_id=model_id,
        auc=auc(scores, labels),
        accuracy=confusion.accuracy,
        f_score=f1(confusion),
        confusion=confusion,
        n_pos=int(np.sum(labels == 1)),
        n_neg=int(np.sum(labels == 0)),
    )
    logger.info(f"{model_id}: AUC={report.auc:.4f} accuracy={report.accuracy:.4f} F={report.f_score:.4f}")
    return report


def pairwise_auc(scores, labels) -> float:
    """O(n_pos * n_neg) reference definition, used to cross-check ``auc``."""
    scores, labels = _check_inputs(scores, labels)
    _require_both_classes(labels)
    pos = scores[labels == 1][:, None]
    neg = scores[labels == 0][None, :]
    wins = float(np.sum(pos > neg)) + 0.5 * float(np.sum(pos == neg))
    return wins / (pos.size * neg.size)
