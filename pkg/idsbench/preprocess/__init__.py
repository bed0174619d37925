from .sampling import FoldAssignment, SamplerConfig, SplitPlan, kfold, stratified_split, undersample
from .encoder import EncodedMatrix, EncoderState, encode, fit_encoder

__all__ = [
    'FoldAssignment', 'SamplerConfig', 'SplitPlan', 'kfold', 'stratified_split', 'undersample',
    'EncodedMatrix', 'EncoderState', 'encode', 'fit_encoder',
]
