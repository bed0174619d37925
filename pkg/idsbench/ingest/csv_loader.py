"""
CSV ingestion for the three scenario datasets.

Files are read with every cell as a string token, then typed column by
column according to the scenario schema. Missing or unparseable feature
cells are imputed (0 for numeric/binary, ``__missing__`` for categorical)
and tallied per column.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import (
    EmptySampleWithoutOverrides,
    HeaderMismatch,
    LabelCountMismatch,
    LabelParseFailure,
    MalformedCsv,
    MissingFile,
    UnmappedToken,
)
from ..utils.digest import file_digest
from .schema import MISSING_LEVEL, ColumnRole, ColumnSchema, FeatureKind, LabelSpec, ScenarioSchema

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Provenance:
    path: str
    sha256: str


@dataclass(frozen=True)
class TabularDataset:
    """
    Typed table for one scenario.

    Feature columns are stored column-major: float64 arrays for numeric and
    binary columns, object arrays of tokens for categorical ones. Arrays are
    read-only so a loaded dataset can be shared between readers.
    """
    schema: Tuple[ColumnSchema, ...]
    columns: Dict[str, np.ndarray]
    labels: np.ndarray
    provenance: Provenance
    missing_counts: Dict[str, int] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return int(self.labels.shape[0])

    @property
    def feature_schema(self) -> List[ColumnSchema]:
        return [c for c in self.schema if c.role == ColumnRole.FEATURE]

    @property
    def feature_names(self) -> List[str]:
        return [c.name for c in self.feature_schema]

    def take(self, indices: np.ndarray) -> "TabularDataset":
        """Return a new dataset holding the given rows, in the given order."""
        indices = np.asarray(indices, dtype=np.int64)
        columns = {name: _frozen(values[indices]) for name, values in self.columns.items()}
        return TabularDataset(
            schema=self.schema,
            columns=columns,
            labels=_frozen(self.labels[indices]),
            provenance=self.provenance,
            missing_counts=dict(self.missing_counts),
        )


@dataclass(frozen=True)
class DatasetSummary:
    n_rows: int
    n_features: int
    count_y0: int
    count_y1: int
    missing_counts: Dict[str, int]
    level_counts: Dict[str, Dict[str, int]]

    @property
    def balanced(self) -> int:
        """Rows per class retained by random under-sampling."""
        return min(self.count_y0, self.count_y1)

    def as_table_row(self, use_case: str = "") -> str:
        b = self.balanced
        return (
            f"{use_case:<30} total={self.n_rows:>9,} y=0={self.count_y0:>9,} "
            f"y=1={self.count_y1:>9,} balanced={b}/{b} features={self.n_features}"
        )


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def infer_feature_kinds(
    sample: pd.DataFrame,
    overrides: Optional[Mapping[str, FeatureKind]] = None,
    missing_tokens: Sequence[str] = ("", "?"),
) -> List[ColumnSchema]:
    """
    Type columns from a sample of string tokens.

    A column whose non-missing tokens all parse as numbers is numeric, or
    binary when those numbers are only 0 and 1; anything else is categorical
    with its sorted distinct tokens as levels. Overrides win. A column with
    only missing tokens is typed numeric.

    Args:
        sample (pd.DataFrame): Sample rows, one string token per cell
        overrides (Mapping[str, FeatureKind], optional): Forced kinds by column name
        missing_tokens (Sequence[str]): Tokens read as missing

    Returns:
        List[ColumnSchema]: One feature column schema per sample column

    Raises:
        EmptySampleWithoutOverrides: If the sample is empty and some column is not overridden
    """
    overrides = dict(overrides or {})
    if len(sample) == 0:
        unresolved = [c for c in sample.columns if c not in overrides]
        if unresolved:
            raise EmptySampleWithoutOverrides(unresolved)

    schemas = []
    for name in sample.columns:
        tokens = sample[name].astype(str)
        present = tokens[~tokens.isin(missing_tokens)]
        if name in overrides:
            kind = FeatureKind(overrides[name])
        else:
            kind = _infer_kind(present)
        levels: Tuple[str, ...] = ()
        if kind == FeatureKind.CATEGORICAL:
            levels = tuple(sorted(set(present.tolist())))
        schemas.append(ColumnSchema(name=name, kind=kind, role=ColumnRole.FEATURE, levels=levels))
    return schemas


def _infer_kind(present: pd.Series) -> FeatureKind:
    if present.empty:
        return FeatureKind.NUMERIC
    numbers = pd.to_numeric(present, errors="coerce").to_numpy(dtype=np.float64)
    if not np.isfinite(numbers).all():
        return FeatureKind.CATEGORICAL
    if np.isin(numbers, (0.0, 1.0)).all():
        return FeatureKind.BINARY
    return FeatureKind.NUMERIC


def binarize_labels(raw: Sequence[str], spec: LabelSpec) -> np.ndarray:
    """
    Map raw label tokens to the binary target.

    Args:
        raw (Sequence[str]): Label tokens, one per row
        spec (LabelSpec): Token mapping

    Returns:
        np.ndarray: int8 vector of 0/1 labels

    Raises:
        UnmappedToken: For the first token the spec does not resolve
    """
    tokens = pd.Series(list(raw), dtype=object).astype(str)
    positive = tokens.isin(spec.positive_tokens).to_numpy()
    negative = tokens.isin(spec.negative_tokens).to_numpy()
    if spec.mode == "complement":
        labels = ~negative
        unmapped = (tokens == "").to_numpy()
    else:
        labels = positive
        unmapped = ~(positive | negative)
    if unmapped.any():
        row = int(np.flatnonzero(unmapped)[0])
        raise UnmappedToken(tokens.iloc[row], row)
    return labels.astype(np.int8)


def summarize(dataset: TabularDataset) -> DatasetSummary:
    """Class counts, feature count, missing tallies and categorical level counts."""
    count_y1 = int(dataset.labels.sum()) if dataset.n_rows else 0
    level_counts = {}
    for col in dataset.feature_schema:
        if col.kind != FeatureKind.CATEGORICAL:
            continue
        levels, counts = np.unique(dataset.columns[col.name].astype(str), return_counts=True)
        level_counts[col.name] = {str(l): int(c) for l, c in zip(levels, counts)}
    return DatasetSummary(
        n_rows=dataset.n_rows,
        n_features=len(dataset.feature_schema),
        count_y0=dataset.n_rows - count_y1,
        count_y1=count_y1,
        missing_counts={k: v for k, v in dataset.missing_counts.items()},
        level_counts=level_counts,
    )


def _read_frame(path: Path, header: Optional[int]) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path, header=header, dtype=str, keep_default_na=False, na_filter=False,
            sep=",", quotechar='"', encoding="utf-8",
        )
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise MalformedCsv(str(path), str(e)) from e


def _read_tokens(path: Path, schema: ScenarioSchema) -> pd.DataFrame:
    names = [c.name for c in schema.columns]
    if schema.header:
        try:
            frame = _read_frame(path, 0)
        except pd.errors.EmptyDataError as e:
            raise HeaderMismatch(unexpected=[], absent=names) from e
        frame.columns = [str(c).strip() for c in frame.columns]
        return frame
    try:
        frame = _read_frame(path, None)
    except pd.errors.EmptyDataError:
        return pd.DataFrame({name: pd.Series([], dtype=object) for name in names})
    if frame.shape[1] != len(names):
        positional = [f"<column {i}>" for i in range(frame.shape[1])]
        raise HeaderMismatch(unexpected=positional[len(names):], absent=names[frame.shape[1]:])
    frame.columns = names
    return frame


def _check_header(frame: pd.DataFrame, schema: ScenarioSchema) -> None:
    listed = {c.name for c in schema.columns}
    present = set(frame.columns)
    absent = listed - present
    unexpected = set() if schema.infer_unlisted else present - listed
    if absent or unexpected:
        raise HeaderMismatch(unexpected=unexpected, absent=absent)


def _resolve_columns(frame: pd.DataFrame, schema: ScenarioSchema) -> List[ColumnSchema]:
    declared = {c.name: c for c in schema.columns}
    unlisted = [name for name in frame.columns if name not in declared]
    inferred = {}
    if unlisted:
        inferred = {c.name: c for c in infer_feature_kinds(frame[unlisted], missing_tokens=schema.missing_tokens)}
        logger.info(f"Inferred kinds for {len(unlisted)} unlisted columns")
    return [declared[name] if name in declared else inferred[name] for name in frame.columns]


def _convert_numeric(tokens: pd.Series, missing_tokens: Sequence[str], binary: bool) -> Tuple[np.ndarray, int]:
    values = pd.to_numeric(tokens.where(~tokens.isin(missing_tokens)), errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if binary:
        bad |= ~np.isin(values, (0.0, 1.0))
    values[bad] = 0.0
    return values, int(bad.sum())


def _convert_categorical(tokens: pd.Series, missing_tokens: Sequence[str]) -> Tuple[np.ndarray, int]:
    missing = tokens.isin(missing_tokens).to_numpy()
    values = tokens.to_numpy(dtype=object).copy()
    values[missing] = MISSING_LEVEL
    return values, int(missing.sum())


def _verify_counts(labels: np.ndarray, schema: ScenarioSchema) -> None:
    expected = schema.expected
    if not schema.label_spec.verify_counts or expected is None or expected.count_y1 is None:
        return
    if expected.n_rows is not None and labels.shape[0] != expected.n_rows:
        logger.warning(
            f"Skipping label-count verification: {labels.shape[0]} rows loaded, "
            f"the reference file has {expected.n_rows}"
        )
        return
    observed = {"count_y0": int((labels == 0).sum()), "count_y1": int(labels.sum())}
    wanted = {"count_y0": expected.count_y0, "count_y1": expected.count_y1}
    if observed != wanted:
        raise LabelCountMismatch(expected=wanted, observed=observed)


def load_csv(path: Path, schema: ScenarioSchema) -> TabularDataset:
    """
    Load a scenario CSV file into a typed table.

    Args:
        path (Path): CSV file
        schema (ScenarioSchema): Column kinds/roles and label mapping

    Returns:
        TabularDataset: The typed table with binary labels

    Raises:
        MissingFile: If the file does not exist
        HeaderMismatch: If the header does not match the schema
        LabelParseFailure: If a label token cannot be mapped
        LabelCountMismatch: If the label mapping fails count verification
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))

    digest = file_digest(path)
    logger.info(f"Loading {path} (sha256={digest[:12]})")
    frame = _read_tokens(path, schema)
    _check_header(frame, schema)
    for name in frame.columns:
        frame[name] = frame[name].astype(str).str.strip()

    resolved = _resolve_columns(frame, schema)
    n_rows = len(frame)

    try:
        labels = binarize_labels(frame[schema.label_column].tolist(), schema.label_spec)
    except UnmappedToken as e:
        raise LabelParseFailure(e.row, e.token) from e
    _verify_counts(labels, schema)

    declared = {c.name for c in schema.columns}
    final_schema = []
    columns: Dict[str, np.ndarray] = {}
    missing_counts: Dict[str, int] = {}
    for col in resolved:
        if col.role != ColumnRole.FEATURE:
            final_schema.append(col)
            continue
        tokens = frame[col.name]
        if col.kind == FeatureKind.CATEGORICAL:
            values, n_missing = _convert_categorical(tokens, schema.missing_tokens)
            levels = tuple(sorted(set(values.tolist())))
            # only inferred columns; declared kinds are trusted
            if col.name not in declared and n_rows and len(levels) > schema.max_level_fraction * n_rows:
                logger.warning(
                    f"Dropping high-cardinality column {col.name}: {len(levels)} levels over {n_rows} rows"
                )
                final_schema.append(col.model_copy(update={"role": ColumnRole.DROPPED}))
                continue
            col = col.model_copy(update={"levels": levels})
        else:
            values, n_missing = _convert_numeric(tokens, schema.missing_tokens, col.kind == FeatureKind.BINARY)
        if n_missing:
            logger.warning(f"Column {col.name}: imputed {n_missing} missing or unparseable cells")
        columns[col.name] = _frozen(values)
        missing_counts[col.name] = n_missing
        final_schema.append(col)

    dataset = TabularDataset(
        schema=tuple(final_schema),
        columns=columns,
        labels=_frozen(labels),
        provenance=Provenance(path=str(path), sha256=digest),
        missing_counts=missing_counts,
    )
    logger.info(
        f"Loaded {n_rows} rows, {len(dataset.feature_schema)} features, "
        f"{int(labels.sum()) if n_rows else 0} positives"
    )
    return dataset
