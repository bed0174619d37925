from .super_learner import (
    CANDIDATE_LABELS,
    MetaFeatures,
    SuperLearnerModel,
    SuperLearnerSpec,
    build_meta_features,
    default_super_learner_spec,
    fold_candidate_seed,
    load_super_learner,
    predict_super,
    refit_seed,
    save_super_learner,
    super_from_document,
    super_to_document,
    train_super_learner,
)

__all__ = [
    'CANDIDATE_LABELS',
    'MetaFeatures',
    'SuperLearnerModel',
    'SuperLearnerSpec',
    'build_meta_features',
    'default_super_learner_spec',
    'fold_candidate_seed',
    'load_super_learner',
    'predict_super',
    'refit_seed',
    'save_super_learner',
    'super_from_document',
    'super_to_document',
    'train_super_learner',
]
