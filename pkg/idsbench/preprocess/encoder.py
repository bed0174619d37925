"""
Feature encoding: z-scored numeric columns, full one-hot categorical
columns, binary columns passed through.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from ..errors import EmptyTrainingSet, SchemaMismatch
from ..ingest import FeatureKind, TabularDataset
from ..utils.digest import array_digest

logger = logging.getLogger(__name__)

# A column whose spread is below this (relative to its mean) is treated as constant
_STD_FLOOR = 1e-12


@dataclass(frozen=True)
class EncoderState:
    """
    Fitted encoding parameters.

    ``columns`` keeps the training feature order with each column's kind;
    ``layout`` names every output slot in order.
    """
    columns: Tuple[Tuple[str, FeatureKind], ...]
    numeric_params: Dict[str, Tuple[float, float]]
    level_slots: Dict[str, Tuple[str, ...]]
    layout: Tuple[str, ...]
    fitted_on: str

    @property
    def width(self) -> int:
        return len(self.layout)


@dataclass(frozen=True)
class EncodedMatrix:
    X: np.ndarray
    y: np.ndarray
    unseen_counts: Dict[str, int] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])


def fit_encoder(train: TabularDataset) -> EncoderState:
    """
    Fit encoding parameters on training rows only.

    Args:
        train (TabularDataset): The training rows

    Returns:
        EncoderState: Parameters and output layout

    Raises:
        EmptyTrainingSet: If there are no training rows
    """
    if train.n_rows == 0:
        raise EmptyTrainingSet()

    columns = []
    numeric_params: Dict[str, Tuple[float, float]] = {}
    level_slots: Dict[str, Tuple[str, ...]] = {}
    layout: List[str] = []
    digest_parts = []
    for col in train.feature_schema:
        values = train.columns[col.name]
        digest_parts.append(values)
        columns.append((col.name, col.kind))
        if col.kind == FeatureKind.NUMERIC:
            mean = float(np.mean(values))
            std = float(np.std(values))
            if std <= _STD_FLOOR * max(1.0, abs(mean)):
                std = 0.0
            numeric_params[col.name] = (mean, std)
            layout.append(col.name)
        elif col.kind == FeatureKind.CATEGORICAL:
            levels = tuple(sorted(set(values.tolist())))
            level_slots[col.name] = levels
            layout.extend(f"{col.name}={level}" for level in levels)
        else:
            layout.append(col.name)

    state = EncoderState(
        columns=tuple(columns),
        numeric_params=numeric_params,
        level_slots=level_slots,
        layout=tuple(layout),
        fitted_on=array_digest(*digest_parts) if digest_parts else array_digest(np.empty(0)),
    )
    logger.info(f"Encoder fitted on {train.n_rows} rows: {len(columns)} columns -> {state.width} slots")
    return state


def encode(state: EncoderState, rows: TabularDataset) -> EncodedMatrix:
    """
    Encode rows with a fitted state, preserving row order.

    Unseen categorical levels produce an all-zero block and are tallied.

    Raises:
        SchemaMismatch: If the rows' feature columns differ from the fitted ones
    """
    observed = tuple((c.name, c.kind) for c in rows.feature_schema)
    if observed != state.columns:
        expected_names = [name for name, _ in state.columns]
        raise SchemaMismatch(f"expected columns {expected_names}, got {[name for name, _ in observed]}")

    n = rows.n_rows
    X = np.zeros((n, state.width), dtype=np.float64)
    unseen_counts: Dict[str, int] = {}
    slot = 0
    for name, kind in state.columns:
        values = rows.columns[name]
        if kind == FeatureKind.NUMERIC:
            mean, std = state.numeric_params[name]
            if std > 0.0:
                X[:, slot] = (values - mean) / std
            slot += 1
        elif kind == FeatureKind.CATEGORICAL:
            levels = state.level_slots[name]
            codes = pd.Categorical(values, categories=list(levels)).codes.astype(np.int64)
            seen = codes >= 0
            X[np.flatnonzero(seen), slot + codes[seen]] = 1.0
            n_unseen = int((~seen).sum())
            if n_unseen:
                unseen_counts[name] = n_unseen
                logger.warning(f"Column {name}: {n_unseen} rows carry levels unseen in training")
            slot += len(levels)
        else:
            X[:, slot] = values
            slot += 1

    if not np.isfinite(X).all():
        raise SchemaMismatch("encoding produced non-finite values")
    return EncodedMatrix(X=X, y=np.asarray(rows.labels, dtype=np.int8).copy(), unseen_counts=unseen_counts)
