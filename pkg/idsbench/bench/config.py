"""
Run configuration for one scenario.

Values resolve as: model defaults < JSON config file < command-line flags.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..ensemble.super_learner import default_super_learner_spec
from ..errors import InvalidConfig
from ..ingest.schema import ScenarioSchema, load_scenario_schema
from ..learners.specs import FAMILIES, LearnerSpec

logger = logging.getLogger(__name__)

SUPER_LEARNERS = (("SL1", "sl1_meta"), ("SL2", "sl2_meta"))
META_OVERRIDE_KEYS = tuple(key for _, key in SUPER_LEARNERS)


class ScenarioConfig(BaseModel):
    """
    Everything needed to reproduce one benchmark run.

    ``schema_file`` replaces the shipped schema of the scenario when set.
    ``overrides`` maps a learner family (or ``sl1_meta`` / ``sl2_meta``) to
    hyperparameter values.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Literal["network", "android", "iot"]
    data: Path
    schema_file: Optional[Path] = None
    seed: int = Field(default=42, ge=0)
    test_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    k: int = Field(default=5, ge=2)
    overrides: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    out: Path = Path("results")
    workers: int = Field(default=1, ge=1)

    @field_validator("overrides")
    @classmethod
    def _known_override_keys(cls, value: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
        unknown = sorted(set(value) - set(FAMILIES) - set(META_OVERRIDE_KEYS))
        if unknown:
            raise ValueError(f"unknown override keys {unknown}")
        return value

    def load_schema(self) -> ScenarioSchema:
        """
        Raises:
            InvalidConfig: If the schema file is unreadable or invalid
        """
        if self.schema_file is not None:
            return ScenarioSchema.from_file(self.schema_file)
        return load_scenario_schema(self.scenario)

    def learner_spec(self, family: str, seed: int = 0) -> LearnerSpec:
        return LearnerSpec.build(family, self.overrides.get(family), seed=seed)

    def resolved(self) -> Dict[str, Any]:
        """The config with every default materialized, as stored in the manifest."""
        document = self.model_dump(mode="json")
        document["learners"] = {f: self.learner_spec(f).params.model_dump(mode="json") for f in FAMILIES}
        return document


def read_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidConfig(f"Cannot read config file {path}: {e}") from e
    if not isinstance(document, dict):
        raise InvalidConfig(f"Config file {path} must hold a JSON object")
    return document


def resolve_config(flags: Mapping[str, Any], config_file: Optional[Path] = None) -> ScenarioConfig:
    """
    Merge the config file and the command-line flags into one validated record.

    Args:
        flags: Flag values; ``None`` means the flag was not given
        config_file (Path): Optional JSON config file

    Returns:
        ScenarioConfig: The resolved config

    Raises:
        InvalidConfig: If the merged values fail validation
        InvalidHyperparameters: If a learner override is invalid
    """
    merged: Dict[str, Any] = read_config_file(config_file) if config_file else {}
    merged.update({key: value for key, value in flags.items() if value is not None})
    try:
        config = ScenarioConfig.model_validate(merged)
    except ValidationError as e:
        raise InvalidConfig(f"Invalid run configuration: {e}") from e
    for family in FAMILIES:
        config.learner_spec(family)
    for name, key in SUPER_LEARNERS:
        default_super_learner_spec(name, 0, config.k, config.overrides, config.overrides.get(key))
    logger.debug(f"Resolved config: {config.model_dump(mode='json')}")
    return config
