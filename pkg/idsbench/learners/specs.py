"""
Learner families and their hyperparameters.

Defaults follow the benchmark's documented choices; any field can be
overridden per scenario through the run config.
"""

from typing import Any, Dict, List, Literal, Mapping, Optional, Type, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..errors import InvalidHyperparameters

Family = Literal["glm", "random_forest", "gbm", "mlp"]
FAMILIES = ("glm", "random_forest", "gbm", "mlp")


class _Params(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class GlmParams(_Params):
    l2: float = Field(default=1e-4, ge=0.0)
    learning_rate: float = Field(default=0.1, gt=0.0, le=1.0)
    n_iter: int = Field(default=500, ge=0)


class ForestParams(_Params):
    n_trees: int = Field(default=100, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    min_samples_leaf: int = Field(default=1, ge=1)
    min_samples_split: int = Field(default=2, ge=2)
    # None means ceil(sqrt(p))
    mtry: Optional[int] = Field(default=None, ge=1)
    bootstrap: bool = True
    # None means n
    sample_size: Optional[int] = Field(default=None, ge=1)


class GbmParams(_Params):
    n_rounds: int = Field(default=100, ge=0)
    max_depth: int = Field(default=5, ge=1)
    shrinkage: float = Field(default=0.1, ge=0.0, le=1.0)
    min_samples_leaf: int = Field(default=10, ge=1)
    min_samples_split: int = Field(default=2, ge=2)
    leaf_l2: float = Field(default=1.0, ge=0.0)


class MlpParams(_Params):
    hidden_layers: List[int] = Field(default_factory=lambda: [64, 64])
    batch_size: int = Field(default=128, ge=1)
    epochs: int = Field(default=20, ge=0)
    learning_rate: float = Field(default=0.01, gt=0.0, le=1.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    l2: float = Field(default=1e-4, ge=0.0)

    @model_validator(mode="after")
    def _positive_widths(self) -> "MlpParams":
        if any(width < 1 for width in self.hidden_layers):
            raise ValueError("hidden layer widths must be positive")
        return self


PARAMS_BY_FAMILY: Dict[str, Type[_Params]] = {
    "glm": GlmParams,
    "random_forest": ForestParams,
    "gbm": GbmParams,
    "mlp": MlpParams,
}

AnyParams = Union[GlmParams, ForestParams, GbmParams, MlpParams]


class LearnerSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    params: AnyParams
    seed: int = 0

    @model_validator(mode="before")
    @classmethod
    def _coerce_params(cls, data: Any) -> Any:
        if isinstance(data, Mapping):
            family = data.get("family")
            params = data.get("params") or {}
            if family in PARAMS_BY_FAMILY and isinstance(params, Mapping):
                data = dict(data, params=PARAMS_BY_FAMILY[family].model_validate(dict(params)))
        return data

    @model_validator(mode="after")
    def _params_match_family(self) -> "LearnerSpec":
        if not isinstance(self.params, PARAMS_BY_FAMILY[self.family]):
            raise ValueError(f"params of type {type(self.params).__name__} do not belong to {self.family}")
        return self

    @classmethod
    def build(cls, family: str, overrides: Optional[Mapping[str, Any]] = None, seed: int = 0) -> "LearnerSpec":
        """
        Build a spec from the family defaults plus overrides.

        Raises:
            InvalidHyperparameters: If the family is unknown or a value fails validation
        """
        if family not in PARAMS_BY_FAMILY:
            raise InvalidHyperparameters(family, f"unknown family, expected one of {FAMILIES}")
        try:
            params = PARAMS_BY_FAMILY[family].model_validate(dict(overrides or {}))
        except ValidationError as e:
            raise InvalidHyperparameters(family, str(e)) from e
        return cls(family=family, params=params, seed=seed)

    def with_seed(self, seed: int) -> "LearnerSpec":
        return self.model_copy(update={"seed": int(seed)})
