from .scores import (
    DEFAULT_THRESHOLD,
    ConfusionMatrix,
    EvalReport,
    RocCurve,
    auc,
    confusion_at,
    evaluate,
    f1,
    pairwise_auc,
    roc_points,
    trapezoid_area,
)
from .roc_export import plot_roc_svg, read_roc_csv, write_roc_csv

__all__ = [
    'DEFAULT_THRESHOLD',
    'ConfusionMatrix',
    'EvalReport',
    'RocCurve',
    'auc',
    'confusion_at',
    'evaluate',
    'f1',
    'pairwise_auc',
    'roc_points',
    'trapezoid_area',
    'plot_roc_svg',
    'read_roc_csv',
    'write_roc_csv',
]
