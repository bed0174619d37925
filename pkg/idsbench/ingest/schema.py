"""
Scenario schema documents: column kinds and roles, label mapping and the
reference values a scenario is expected to reproduce.
"""

import json
import logging
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import InvalidConfig

logger = logging.getLogger(__name__)

MISSING_LEVEL = "__missing__"
SCENARIO_IDS = ("network", "android", "iot")


class FeatureKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"
    BINARY = "binary"


class ColumnRole(str, Enum):
    FEATURE = "feature"
    LABEL = "label"
    DROPPED = "dropped"


class ColumnSchema(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    kind: FeatureKind = FeatureKind.NUMERIC
    role: ColumnRole = ColumnRole.FEATURE
    # Ordered level list; only meaningful for categorical columns
    levels: Tuple[str, ...] = ()

    @field_validator("levels")
    @classmethod
    def _unique_levels(cls, levels: Tuple[str, ...]) -> Tuple[str, ...]:
        if len(set(levels)) != len(levels):
            raise ValueError("categorical levels must not repeat")
        return levels


class LabelSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    positive_tokens: FrozenSet[str] = frozenset()
    negative_tokens: FrozenSet[str] = frozenset()
    mode: Literal["explicit", "complement"] = "explicit"
    # Check the mapping against the expected class counts when the full file is loaded
    verify_counts: bool = False

    @model_validator(mode="after")
    def _check_tokens(self) -> "LabelSpec":
        overlap = self.positive_tokens & self.negative_tokens
        if overlap:
            raise ValueError(f"tokens mapped to both classes: {sorted(overlap)}")
        if not self.negative_tokens:
            raise ValueError("negative_tokens must not be empty")
        if self.mode == "explicit" and not self.positive_tokens:
            raise ValueError("explicit mode needs positive_tokens")
        return self


class ExpectedCounts(BaseModel):
    n_rows: Optional[int] = None
    count_y0: Optional[int] = None
    count_y1: Optional[int] = None
    n_features: Optional[int] = None
    # retained rows per class after under-sampling
    balanced: Optional[int] = None


class ScenarioSchema(BaseModel):
    """
    Schema document for one scenario CSV file.

    Listed columns are typed as declared. With ``infer_unlisted`` every other
    column found in the header becomes a feature typed by inference.
    """
    model_config = ConfigDict(frozen=True)

    name: str = ""
    columns: List[ColumnSchema]
    header: bool = True
    label_spec: LabelSpec
    missing_tokens: Tuple[str, ...] = ("", "?")
    infer_unlisted: bool = False
    max_level_fraction: float = Field(default=0.5, gt=0.0, le=1.0)
    expected: Optional[ExpectedCounts] = None
    reference_results: Dict[str, Dict[str, float]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_columns(self) -> "ScenarioSchema":
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        labels = [c.name for c in self.columns if c.role == ColumnRole.LABEL]
        if len(labels) != 1:
            raise ValueError(f"exactly one label column required, found {labels}")
        if not self.header and self.infer_unlisted:
            raise ValueError("header-less files need every column listed positionally")
        return self

    @property
    def label_column(self) -> str:
        return next(c.name for c in self.columns if c.role == ColumnRole.LABEL)

    @classmethod
    def from_file(cls, path: Path) -> "ScenarioSchema":
        try:
            with open(path, "r", encoding="utf-8") as f:
                document = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidConfig(f"Cannot read schema {path}: {e}") from e
        return cls.from_document(document, source=str(path))

    @classmethod
    def from_document(cls, document: dict, source: str = "<document>") -> "ScenarioSchema":
        try:
            return cls.model_validate(document)
        except ValidationError as e:
            raise InvalidConfig(f"Invalid scenario schema {source}: {e}") from e


def load_scenario_schema(scenario_id: str) -> ScenarioSchema:
    """
    Load one of the shipped scenario schemas.

    Args:
        scenario_id (str): One of "network", "android", "iot"

    Returns:
        ScenarioSchema: The parsed schema

    Raises:
        InvalidConfig: If the scenario id is unknown
    """
    if scenario_id not in SCENARIO_IDS:
        raise InvalidConfig(f"Unknown scenario {scenario_id!r}, expected one of {SCENARIO_IDS}")
    text = resources.files("idsbench.ingest").joinpath("scenarios", f"{scenario_id}.json").read_text(encoding="utf-8")
    logger.debug(f"Loaded shipped schema for scenario {scenario_id}")
    return ScenarioSchema.from_document(json.loads(text), source=f"{scenario_id}.json")
