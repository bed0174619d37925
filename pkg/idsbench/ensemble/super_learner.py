"""
Stacked super learner.

Step one cross-fits every candidate over stratified folds to produce
out-of-fold probabilities (the meta-features). Step two trains the meta
learner on those probabilities and refits each candidate on all training
rows for inference.

Seed substreams, all derived from ``SuperLearnerSpec.seed``:

    fold assignment      kfold(y, k, seed)
    candidate j, fold f  derive_seed(seed, "fold", f, j)
    refit of candidate j derive_seed(seed, "refit", j)
    meta learner         derive_seed(seed, "meta")
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from ..errors import CandidateTrainingError, IdsBenchError, InvalidConfig, WidthMismatch
from ..learners.base import TrainedModel, predict_proba, train_model
from ..learners.serialization import FORMAT_VERSION, dumps, model_from_document, model_to_document
from ..learners.specs import LearnerSpec
from ..preprocess.sampling import FoldAssignment, kfold
from ..utils.digest import array_digest
from ..utils.seeding import derive_seed

logger = logging.getLogger(__name__)

CANDIDATE_FAMILIES = ("random_forest", "gbm", "mlp")
CANDIDATE_LABELS = {"random_forest": "RF", "gbm": "GBM", "mlp": "DL"}
META_FAMILY = {"SL1": "mlp", "SL2": "gbm"}
META_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "mlp": {"hidden_layers": [16]},
    "gbm": {"max_depth": 3, "n_rounds": 50},
}


class SuperLearnerSpec(BaseModel):
    """
    Candidates, meta learner, fold count and root seed of a super learner.

    The candidate order is the meta-feature column order.
    """
    model_config = ConfigDict(frozen=True)

    candidates: Tuple[LearnerSpec, ...]
    meta: LearnerSpec
    k: int = 5
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "SuperLearnerSpec":
        if not self.candidates:
            raise ValueError("a super learner needs at least one candidate")
        if any(c.family == "glm" for c in self.candidates):
            raise ValueError("the glm family is not a stacking candidate")
        if self.meta.family not in ("mlp", "gbm"):
            raise ValueError(f"meta learner must be mlp or gbm, got {self.meta.family}")
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        return self

    @property
    def candidate_names(self) -> List[str]:
        return [CANDIDATE_LABELS.get(c.family, c.family) for c in self.candidates]


def default_super_learner_spec(
    name: str,
    seed: int,
    k: int = 5,
    candidate_overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
    meta_overrides: Optional[Mapping[str, Any]] = None,
) -> SuperLearnerSpec:
    """
    Build the SL1 (MLP meta) or SL2 (GBM meta) spec over [RF, GBM, DL].

    Raises:
        InvalidConfig: If the name is unknown or the spec fails validation
        InvalidHyperparameters: If an override is invalid
    """
    if name not in META_FAMILY:
        raise InvalidConfig(f"Unknown super learner {name!r}, expected one of {sorted(META_FAMILY)}")
    candidate_overrides = candidate_overrides or {}
    meta_family = META_FAMILY[name]
    candidates = tuple(LearnerSpec.build(f, candidate_overrides.get(f)) for f in CANDIDATE_FAMILIES)
    meta = LearnerSpec.build(meta_family, {**META_DEFAULTS[meta_family], **dict(meta_overrides or {})})
    try:
        return SuperLearnerSpec(candidates=candidates, meta=meta, k=k, seed=seed)
    except ValidationError as e:
        raise InvalidConfig(f"Invalid super learner {name}: {e}") from e


def fold_candidate_seed(seed: int, fold: int, candidate: int) -> int:
    return derive_seed(seed, "fold", fold, candidate)


def refit_seed(seed: int, candidate: int) -> int:
    return derive_seed(seed, "refit", candidate)


@dataclass(frozen=True)
class MetaFeatures:
    """
    Out-of-fold candidate probabilities.

    ``provenance[i, j]`` is the fold whose held-out set produced
    ``matrix[i, j]``.
    """
    matrix: np.ndarray
    folds: FoldAssignment
    provenance: np.ndarray
    candidate_names: Tuple[str, ...]

    @property
    def width(self) -> int:
        return self.matrix.shape[1]


def _fit_and_score(
    candidate: LearnerSpec, X: np.ndarray, y: np.ndarray, train_pos: np.ndarray, held_pos: np.ndarray,
    fold: int, index: int, seed: int,
) -> Tuple[int, int, np.ndarray]:
    try:
        model = train_model(candidate.with_seed(fold_candidate_seed(seed, fold, index)), X[train_pos], y[train_pos])
        return fold, index, predict_proba(model, X[held_pos])
    except IdsBenchError as e:
        raise CandidateTrainingError(fold, CANDIDATE_LABELS.get(candidate.family, candidate.family), e) from e


def build_meta_features(
    X: np.ndarray,
    y: np.ndarray,
    spec: SuperLearnerSpec,
    folds: Optional[FoldAssignment] = None,
    workers: int = 1,
) -> MetaFeatures:
    """
    Cross-fit every candidate and collect its held-out probabilities.

    Args:
        X (np.ndarray): Encoded training matrix
        y (np.ndarray): 0/1 training labels
        spec (SuperLearnerSpec): Candidates, k and seed
        folds (FoldAssignment): Precomputed folds; by default ``kfold(y, spec.k, spec.seed)``
        workers (int): Concurrent (fold, candidate) tasks; never changes the result

    Returns:
        MetaFeatures: n_train x |candidates| probabilities with their fold provenance

    Raises:
        TooFewRowsPerClass: If the folds cannot be formed
        CandidateTrainingError: If a candidate fails on some fold
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if folds is None:
        folds = kfold(y, spec.k, spec.seed)
    tasks = []
    for f in range(folds.k):
        train_pos, held_pos = folds.split(f)
        for j, candidate in enumerate(spec.candidates):
            tasks.append((candidate, train_pos, held_pos, f, j))
    logger.info(f"Cross-fitting {len(spec.candidates)} candidates over {folds.k} folds ({len(tasks)} tasks, {workers} workers)")

    results = Parallel(n_jobs=workers)(
        delayed(_fit_and_score)(c, X, y, tr, held, f, j, spec.seed) for c, tr, held, f, j in tasks
    )

    matrix = np.empty((X.shape[0], len(spec.candidates)))
    provenance = np.empty((X.shape[0], len(spec.candidates)), dtype=np.int64)
    for f, j, scores in results:
        held = folds.split(f)[1]
        matrix[held, j] = scores
        provenance[held, j] = f
    return MetaFeatures(
        matrix=np.clip(matrix, 0.0, 1.0),
        folds=folds,
        provenance=provenance,
        candidate_names=tuple(spec.candidate_names),
    )


@dataclass
class SuperLearnerModel:
    spec: SuperLearnerSpec
    bases: List[TrainedModel]
    meta: TrainedModel

    @property
    def width(self) -> int:
        return self.bases[0].width

    @property
    def candidate_names(self) -> List[str]:
        return self.spec.candidate_names


def _reusable(model: Optional[TrainedModel], expected: LearnerSpec, digest: str) -> bool:
    return model is not None and model.spec == expected and model.data_digest == digest


def train_super_learner(
    X: np.ndarray,
    y: np.ndarray,
    spec: SuperLearnerSpec,
    meta_features: Optional[MetaFeatures] = None,
    refit_bases: Optional[Sequence[TrainedModel]] = None,
    workers: int = 1,
) -> SuperLearnerModel:
    """
    Train the meta learner on out-of-fold probabilities and refit the bases.

    Args:
        X (np.ndarray): Encoded training matrix
        y (np.ndarray): 0/1 training labels
        spec (SuperLearnerSpec): Super learner definition
        meta_features (MetaFeatures): Reuse meta-features already built with this spec's candidates and seed
        refit_bases (Sequence[TrainedModel]): Full-data bases to reuse; each is used only when its spec
            and training digest match the refit substream of that candidate, otherwise it is retrained
        workers (int): Parallelism cap

    Returns:
        SuperLearnerModel: Refit bases in candidate order plus the meta model
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if meta_features is None:
        meta_features = build_meta_features(X, y, spec, workers=workers)
    if meta_features.width != len(spec.candidates):
        raise WidthMismatch(expected=len(spec.candidates), got=meta_features.width)

    meta = train_model(spec.meta.with_seed(derive_seed(spec.seed, "meta")), meta_features.matrix, y)

    digest = array_digest(X, y)
    bases = []
    for j, candidate in enumerate(spec.candidates):
        expected = candidate.with_seed(refit_seed(spec.seed, j))
        given = refit_bases[j] if refit_bases is not None and j < len(refit_bases) else None
        if _reusable(given, expected, digest):
            bases.append(given)
            continue
        try:
            bases.append(train_model(expected, X, y, workers=workers))
        except IdsBenchError as e:
            raise CandidateTrainingError(None, CANDIDATE_LABELS.get(candidate.family, candidate.family), e) from e
    logger.info(f"Super learner trained: {spec.meta.family} meta over {spec.candidate_names}")
    return SuperLearnerModel(spec=spec, bases=bases, meta=meta)


def predict_super(model: SuperLearnerModel, X: np.ndarray) -> np.ndarray:
    """
    Score X with each refit base in candidate order, then with the meta learner.

    Raises:
        WidthMismatch: If X's width differs from the bases' training width
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.width:
        raise WidthMismatch(expected=model.width, got=X.shape[1] if X.ndim == 2 else -1)
    Z = np.column_stack([np.clip(predict_proba(b, X), 0.0, 1.0) for b in model.bases])
    return predict_proba(model.meta, Z)


def super_to_document(model: SuperLearnerModel) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "family": "super_learner",
        "spec": model.spec.model_dump(mode="json"),
        "candidates": model.candidate_names,
        "bases": [model_to_document(b) for b in model.bases],
        "meta": model_to_document(model.meta),
    }


def super_from_document(document: Mapping[str, Any]) -> SuperLearnerModel:
    if document.get("format_version") != FORMAT_VERSION or document.get("family") != "super_learner":
        raise InvalidConfig("Not a super learner document of a supported version")
    try:
        spec = SuperLearnerSpec.model_validate(document["spec"])
    except ValidationError as e:
        raise InvalidConfig(f"Invalid super learner spec: {e}") from e
    return SuperLearnerModel(
        spec=spec,
        bases=[model_from_document(d) for d in document["bases"]],
        meta=model_from_document(document["meta"]),
    )


def save_super_learner(model: SuperLearnerModel, path: Path) -> None:
    path = Path(path)
    try:
        path.write_text(dumps(super_to_document(model)), encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write super learner to {path}: {e}") from e


def load_super_learner(path: Path) -> SuperLearnerModel:
    return super_from_document(json.loads(Path(path).read_text(encoding="utf-8")))
