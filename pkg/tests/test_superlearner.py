"""
Tests for cross-fitting, stacking and super learner persistence.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from idsbench.ensemble import (
    SuperLearnerModel,
    SuperLearnerSpec,
    build_meta_features,
    default_super_learner_spec,
    fold_candidate_seed,
    load_super_learner,
    predict_super,
    refit_seed,
    save_super_learner,
    train_super_learner,
)
from idsbench.errors import CandidateTrainingError, InvalidConfig, WidthMismatch
from idsbench.learners import DecisionTree, ForestModel, LearnerSpec, TrainedModel, predict_proba, train_model
from idsbench.preprocess import kfold
from idsbench.preprocess.sampling import FoldAssignment

SMALL_CANDIDATES = {
    "random_forest": {"n_trees": 3, "max_depth": 3},
    "gbm": {"n_rounds": 3, "max_depth": 2, "min_samples_leaf": 1},
    "mlp": {"hidden_layers": [3], "epochs": 2, "batch_size": 8},
}
SMALL_META = {"SL1": {"epochs": 5, "hidden_layers": [4]}, "SL2": {"n_rounds": 5, "min_samples_leaf": 2}}


def small_spec(name, seed=3, k=3, **meta):
    return default_super_learner_spec(
        name, seed=seed, k=k, candidate_overrides=SMALL_CANDIDATES, meta_overrides={**SMALL_META[name], **meta}
    )


@pytest.fixture
def tiny_xy():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(12, 3))
    y = np.array([0, 1] * 6, dtype=np.int8)
    return X, y


def test_leave_one_out_meta_features_match_oracle(tiny_xy):
    """Test each meta-feature equals a candidate trained without that row."""
    X, y = tiny_xy
    spec = small_spec("SL1", k=12)
    features = build_meta_features(X, y, spec)

    for i in range(12):
        f = int(features.folds.fold_of[i])
        rest = np.flatnonzero(np.arange(12) != i)
        for j, candidate in enumerate(spec.candidates):
            model = train_model(candidate.with_seed(fold_candidate_seed(spec.seed, f, j)), X[rest], y[rest])
            assert features.matrix[i, j] == predict_proba(model, X[i:i + 1])[0]
            assert features.provenance[i, j] == f


def test_meta_feature_column_reconstruction(separable_xy):
    X, y = separable_xy
    spec = small_spec("SL2")
    features = build_meta_features(X, y, spec)
    train_pos, held_pos = features.folds.split(1)
    for j, candidate in enumerate(spec.candidates):
        model = train_model(candidate.with_seed(fold_candidate_seed(spec.seed, 1, j)), X[train_pos], y[train_pos])
        assert np.array_equal(features.matrix[held_pos, j], predict_proba(model, X[held_pos]))


def test_meta_features_do_not_peek(separable_xy):
    """Test a row's own label never reaches its meta-features, and its fold mates ignore it entirely."""
    X, y = separable_xy
    spec = small_spec("SL1")
    folds = kfold(y, 3, spec.seed)
    fixed = FoldAssignment(k=folds.k, fold_of=folds.fold_of.copy(), seed=folds.seed)
    base = build_meta_features(X, y, spec, folds=fixed)

    i = 7
    y_flip = y.copy()
    y_flip[i] = 1 - y_flip[i]
    flipped = build_meta_features(X, y_flip, spec, folds=fixed)
    assert np.array_equal(base.matrix[i], flipped.matrix[i])

    X_moved = X.copy()
    X_moved[i] += 3.0
    moved = build_meta_features(X_moved, y_flip, spec, folds=fixed)
    mates = np.flatnonzero(fixed.fold_of == fixed.fold_of[i])
    others = mates[mates != i]
    assert np.array_equal(base.matrix[others], moved.matrix[others])


def test_meta_features_shape_and_range(separable_xy):
    X, y = separable_xy
    features = build_meta_features(X, y, small_spec("SL1"))
    assert features.width == 3
    assert features.matrix.shape == (60, 3)
    assert features.candidate_names == ("RF", "GBM", "DL")
    assert np.all((features.matrix >= 0.0) & (features.matrix <= 1.0))


def test_meta_features_independent_of_workers(separable_xy):
    X, y = separable_xy
    spec = small_spec("SL1")
    serial = build_meta_features(X, y, spec, workers=1)
    parallel = build_meta_features(X, y, spec, workers=2)
    assert np.array_equal(serial.matrix, parallel.matrix)


def test_both_super_learners_share_meta_features(separable_xy):
    X, y = separable_xy
    sl1 = build_meta_features(X, y, small_spec("SL1"))
    sl2 = build_meta_features(X, y, small_spec("SL2"))
    assert np.array_equal(sl1.matrix, sl2.matrix)


def test_gbm_meta_without_rounds_predicts_base_rate(separable_xy):
    X, y = separable_xy
    model = train_super_learner(X, y, small_spec("SL2", n_rounds=0))
    assert np.allclose(predict_super(model, X), y.mean(), rtol=0, atol=1e-12)


def test_constant_bases_give_constant_output(separable_xy):
    """Test a stack over candidates that ignore their input is itself constant."""
    X, y = separable_xy
    spec = small_spec("SL1")
    stub = ForestModel(trees=[DecisionTree.constant(0.7)], tree_seeds=[0], mtry=1, width=X.shape[1])
    bases = [TrainedModel(spec=c, model=stub, data_digest="") for c in spec.candidates]
    Z = np.random.default_rng(0).random((30, 3))
    meta = train_model(spec.meta, Z, (Z[:, 0] > 0.5).astype(np.int8))
    model = SuperLearnerModel(spec=spec, bases=bases, meta=meta)

    p = predict_super(model, X)
    assert np.all(p == p[0])
    assert p[0] == pytest.approx(predict_proba(meta, np.array([[0.7, 0.7, 0.7]]))[0], abs=1e-12)


def test_super_learner_structure(separable_xy):
    X, y = separable_xy
    spec = small_spec("SL1")
    model = train_super_learner(X, y, spec)

    assert [b.family for b in model.bases] == ["random_forest", "gbm", "mlp"]
    assert model.meta.family == "mlp"
    assert model.meta.width == 3
    assert [b.spec.seed for b in model.bases] == [refit_seed(spec.seed, j) for j in range(3)]
    p = predict_super(model, X)
    assert p.shape == (60,)
    assert np.all((p >= 0.0) & (p <= 1.0))


def test_refit_bases_are_reused(separable_xy):
    X, y = separable_xy
    sl1_spec, sl2_spec = small_spec("SL1"), small_spec("SL2")
    features = build_meta_features(X, y, sl1_spec)
    sl1 = train_super_learner(X, y, sl1_spec, meta_features=features)
    sl2 = train_super_learner(X, y, sl2_spec, meta_features=features, refit_bases=sl1.bases)

    assert all(a is b for a, b in zip(sl1.bases, sl2.bases))
    assert sl2.meta.family == "gbm"


def test_stale_refit_base_is_retrained(separable_xy):
    X, y = separable_xy
    spec = small_spec("SL1")
    sl1 = train_super_learner(X, y, spec)
    stale = [train_model(b.spec, X[:-2], y[:-2]) for b in sl1.bases]
    retrained = train_super_learner(X, y, spec, refit_bases=stale)

    assert not any(a is b for a, b in zip(stale, retrained.bases))
    assert np.array_equal(predict_super(retrained, X), predict_super(sl1, X))


def test_predict_super_width_mismatch(separable_xy):
    X, y = separable_xy
    model = train_super_learner(X, y, small_spec("SL2"))
    with pytest.raises(WidthMismatch):
        predict_super(model, X[:, :2])


def test_candidate_failure_names_fold_and_candidate(separable_xy):
    X, y = separable_xy
    spec = default_super_learner_spec(
        "SL1", seed=0, k=3, candidate_overrides={**SMALL_CANDIDATES, "random_forest": {"n_trees": 2, "mtry": 10}}
    )
    with pytest.raises(CandidateTrainingError) as exc:
        build_meta_features(X, y, spec)
    assert exc.value.fold == 0
    assert exc.value.candidate == "RF"


def test_spec_validation():
    mlp = LearnerSpec.build("mlp")
    glm = LearnerSpec.build("glm")
    with pytest.raises(ValidationError):
        SuperLearnerSpec(candidates=(glm,), meta=mlp)
    with pytest.raises(ValidationError):
        SuperLearnerSpec(candidates=(), meta=mlp)
    with pytest.raises(ValidationError):
        SuperLearnerSpec(candidates=(mlp,), meta=glm)
    with pytest.raises(ValidationError):
        SuperLearnerSpec(candidates=(mlp,), meta=mlp, k=1)
    with pytest.raises(InvalidConfig):
        default_super_learner_spec("SL3", seed=0)


@pytest.mark.parametrize("name", ["SL1", "SL2"])
def test_super_learner_persistence(separable_xy, tmp_path, name):
    X, y = separable_xy
    model = train_super_learner(X, y, small_spec(name))
    path = tmp_path / f"{name}.json"
    save_super_learner(model, path)
    restored = load_super_learner(path)

    assert restored.spec == model.spec
    assert np.array_equal(predict_super(restored, X), predict_super(model, X))
    save_super_learner(restored, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_text() == path.read_text()
