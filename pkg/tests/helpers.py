"""
Test helpers: synthetic scenario rows and in-memory typed tables.
"""

from pathlib import Path

import numpy as np

from idsbench.ingest.csv_loader import Provenance, TabularDataset
from idsbench.ingest.schema import ColumnRole, ColumnSchema, FeatureKind


def make_dataset(features, labels):
    """Build a TabularDataset from {name: (kind, values)} without a file."""
    schema = []
    columns = {}
    for name, (kind, values) in features.items():
        kind = FeatureKind(kind)
        if kind == FeatureKind.CATEGORICAL:
            values = np.asarray(values, dtype=object)
            levels = tuple(sorted(set(values.tolist())))
        else:
            values = np.asarray(values, dtype=np.float64)
            levels = ()
        schema.append(ColumnSchema(name=name, kind=kind, role=ColumnRole.FEATURE, levels=levels))
        columns[name] = values
    schema.append(ColumnSchema(name="label", kind=FeatureKind.BINARY, role=ColumnRole.LABEL))
    return TabularDataset(
        schema=tuple(schema),
        columns=columns,
        labels=np.asarray(labels, dtype=np.int8),
        provenance=Provenance(path="<memory>", sha256=""),
    )


def synthetic_rows(n, seed=0):
    """Rows of a traffic-like table whose label depends on bytes and protocol."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        proto = ["tcp", "udp", "icmp"][rng.integers(0, 3)]
        attack = rng.random() < 0.4
        src_bytes = rng.normal(800.0 if attack else 200.0, 120.0)
        duration = rng.exponential(2.0)
        flag = int(rng.random() < (0.8 if attack else 0.2))
        if proto == "icmp" and rng.random() < 0.5:
            attack = True
        rows.append((f"{duration:.4f}", proto, f"{src_bytes:.2f}", str(flag), "attack" if attack else "normal"))
    return rows


SYNTHETIC_SCHEMA = {
    "name": "synthetic traffic",
    "header": True,
    "columns": [
        {"name": "duration", "kind": "numeric", "role": "feature"},
        {"name": "protocol", "kind": "categorical", "role": "feature"},
        {"name": "src_bytes", "kind": "numeric", "role": "feature"},
        {"name": "flag", "kind": "binary", "role": "feature"},
        {"name": "outcome", "kind": "categorical", "role": "label"},
    ],
    "label_spec": {"negative_tokens": ["normal"], "mode": "complement"},
    "reference_results": {
        "GBM": {"auc": 0.99, "accuracy": 0.95, "f_score": 0.95},
    },
}


def write_synthetic_csv(path: Path, n: int = 120, seed: int = 0) -> Path:
    lines = ["duration,protocol,src_bytes,flag,outcome"]
    lines += [",".join(r) for r in synthetic_rows(n, seed)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
