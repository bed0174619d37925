"""
Versioned JSON documents for trained models.

Floats are written with Python's shortest round-trip repr, so a
deserialized model predicts bit-identically to the original.
"""

import json
from pathlib import Path
from typing import Any, Dict

from ..errors import InvalidConfig
from .base import TrainedModel
from .forest import ForestModel
from .gbm import GbmModel
from .glm import GlmModel
from .mlp import MlpModel
from .specs import LearnerSpec

FORMAT_VERSION = 1

_RECORDS = {
    "glm": GlmModel,
    "random_forest": ForestModel,
    "gbm": GbmModel,
    "mlp": MlpModel,
}


def model_to_document(model: TrainedModel) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "family": model.family,
        "spec": model.spec.model_dump(mode="json"),
        "training_digest": model.data_digest,
        "parameters": model.model.to_dict(),
    }


def model_from_document(document: Dict[str, Any]) -> TrainedModel:
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise InvalidConfig(f"Unsupported model format version {version!r}")
    family = document["family"]
    if family not in _RECORDS:
        raise InvalidConfig(f"Unknown model family {family!r}")
    return TrainedModel(
        spec=LearnerSpec.model_validate(document["spec"]),
        model=_RECORDS[family].from_dict(document["parameters"]),
        data_digest=document["training_digest"],
    )


def dumps(document: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed separators."""
    return json.dumps(document, sort_keys=True, indent=1, allow_nan=False)


def serialize(model: TrainedModel) -> str:
    return dumps(model_to_document(model))


def deserialize(text: str) -> TrainedModel:
    return model_from_document(json.loads(text))


def save_model(model: TrainedModel, path: Path) -> None:
    path = Path(path)
    try:
        path.write_text(serialize(model), encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write model to {path}: {e}") from e


def load_model(path: Path) -> TrainedModel:
    return deserialize(Path(path).read_text(encoding="utf-8"))
