from .schema import (
    MISSING_LEVEL,
    SCENARIO_IDS,
    ColumnRole,
    ColumnSchema,
    ExpectedCounts,
    FeatureKind,
    LabelSpec,
    ScenarioSchema,
    load_scenario_schema,
)
from .csv_loader import (
    DatasetSummary,
    Provenance,
    TabularDataset,
    binarize_labels,
    infer_feature_kinds,
    load_csv,
    summarize,
)

__all__ = [
    'MISSING_LEVEL', 'SCENARIO_IDS', 'ColumnRole', 'ColumnSchema', 'ExpectedCounts', 'FeatureKind',
    'LabelSpec', 'ScenarioSchema', 'load_scenario_schema', 'DatasetSummary', 'Provenance',
    'TabularDataset', 'binarize_labels', 'infer_feature_kinds', 'load_csv', 'summarize',
]
