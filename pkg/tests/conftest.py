"""
Shared fixtures: small synthetic scenario files and typed tables.
"""

import numpy as np
import pytest

from idsbench.ingest.schema import ScenarioSchema
from tests.helpers import SYNTHETIC_SCHEMA, write_synthetic_csv


@pytest.fixture
def synthetic_schema():
    return ScenarioSchema.from_document(SYNTHETIC_SCHEMA)


@pytest.fixture
def synthetic_csv(tmp_path):
    return write_synthetic_csv(tmp_path / "traffic.csv")


@pytest.fixture
def separable_xy():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(60, 4))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(np.int8)
    return X, y
