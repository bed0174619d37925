"""
Family dispatch: train any learner from its spec and score with it.
"""

import logging
import time
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import WidthMismatch
from ..utils.digest import array_digest
from .forest import ForestModel, train_random_forest
from .gbm import GbmModel, train_gbm
from .glm import GlmModel, train_glm
from .mlp import MlpModel, train_mlp
from .specs import LearnerSpec

logger = logging.getLogger(__name__)

ModelRecord = Union[GlmModel, ForestModel, GbmModel, MlpModel]


@dataclass
class TrainedModel:
    """
    A fitted learner with its training metadata.

    ``wall_time`` is informational and is not part of the serialized model.
    """
    spec: LearnerSpec
    model: ModelRecord
    data_digest: str
    wall_time: float = 0.0

    @property
    def family(self) -> str:
        return self.spec.family

    @property
    def width(self) -> int:
        return self.model.width


def train_model(spec: LearnerSpec, X: np.ndarray, y: np.ndarray, workers: int = 1) -> TrainedModel:
    """
    Train the learner described by ``spec``.

    Args:
        spec (LearnerSpec): Family, hyperparameters and seed
        X (np.ndarray): Encoded design matrix
        y (np.ndarray): 0/1 labels
        workers (int): Parallelism cap (forest only); never changes the result

    Returns:
        TrainedModel: The fitted model
    """
    start = time.perf_counter()
    if spec.family == "glm":
        model = train_glm(X, y, spec.params)
    elif spec.family == "random_forest":
        model = train_random_forest(X, y, spec.params, spec.seed, workers=workers)
    elif spec.family == "gbm":
        model = train_gbm(X, y, spec.params)
    else:
        model = train_mlp(X, y, spec.params, spec.seed)
    elapsed = time.perf_counter() - start
    logger.info(f"Trained {spec.family} on {X.shape[0]}x{X.shape[1]} in {elapsed:.2f}s")
    return TrainedModel(spec=spec, model=model, data_digest=array_digest(X, y), wall_time=elapsed)


def predict_proba(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """
    Positive-class probability for every row, in row order.

    Raises:
        WidthMismatch: If X's width differs from the training width
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.width:
        raise WidthMismatch(expected=model.width, got=X.shape[1] if X.ndim == 2 else -1)
    return model.model.predict_proba(X)
