"""
Tests for scenario schemas and CSV ingestion.
"""

import numpy as np
import pandas as pd
import pytest

from idsbench.errors import (
    EmptySampleWithoutOverrides,
    HeaderMismatch,
    InvalidConfig,
    LabelCountMismatch,
    LabelParseFailure,
    MalformedCsv,
    MissingFile,
    UnmappedToken,
)
from idsbench.ingest import (
    MISSING_LEVEL,
    ColumnRole,
    FeatureKind,
    LabelSpec,
    ScenarioSchema,
    binarize_labels,
    infer_feature_kinds,
    load_csv,
    load_scenario_schema,
    summarize,
)


@pytest.fixture
def explicit_schema():
    return ScenarioSchema.from_document({
        "columns": [
            {"name": "bytes", "kind": "numeric"},
            {"name": "proto", "kind": "categorical"},
            {"name": "syn", "kind": "binary"},
            {"name": "note", "kind": "categorical", "role": "dropped"},
            {"name": "class", "kind": "categorical", "role": "label"},
        ],
        "label_spec": {"positive_tokens": ["S"], "negative_tokens": ["B"]},
    })


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_types_columns(tmp_path, explicit_schema):
    """Test that declared kinds, roles and labels come through."""
    path = write(tmp_path / "d.csv", "bytes,proto,syn,note,class\n10,tcp,1,x,S\n20,udp,0,y,B\n30,tcp,1,z,S\n")
    ds = load_csv(path, explicit_schema)

    assert ds.n_rows == 3
    assert ds.feature_names == ["bytes", "proto", "syn"]
    assert ds.labels.tolist() == [1, 0, 1]
    assert ds.columns["bytes"].tolist() == [10.0, 20.0, 30.0]
    assert ds.columns["proto"].tolist() == ["tcp", "udp", "tcp"]
    assert "note" not in ds.columns
    assert len(ds.provenance.sha256) == 64


def test_load_csv_substitutes_missing(tmp_path, explicit_schema):
    """Test missing numeric cells become 0 and missing categories a dedicated level."""
    path = write(tmp_path / "d.csv", "bytes,proto,syn,note,class\n?,,1,x,S\n5,tcp,abc,y,B\n")
    ds = load_csv(path, explicit_schema)

    assert ds.columns["bytes"].tolist() == [0.0, 5.0]
    assert ds.columns["proto"].tolist() == [MISSING_LEVEL, "tcp"]
    assert ds.columns["syn"].tolist() == [1.0, 0.0]
    assert ds.missing_counts == {"bytes": 1, "proto": 1, "syn": 1}


def test_loaded_arrays_are_read_only(tmp_path, explicit_schema):
    path = write(tmp_path / "d.csv", "bytes,proto,syn,note,class\n1,tcp,1,x,S\n2,udp,0,y,B\n")
    ds = load_csv(path, explicit_schema)
    with pytest.raises(ValueError):
        ds.columns["bytes"][0] = 3.0


def test_header_only_file(tmp_path, explicit_schema):
    """Test a header-only file gives an empty table with the schema intact."""
    path = write(tmp_path / "d.csv", "bytes,proto,syn,note,class\n")
    ds = load_csv(path, explicit_schema)
    summary = summarize(ds)

    assert ds.n_rows == 0
    assert ds.feature_names == ["bytes", "proto", "syn"]
    assert (summary.n_rows, summary.count_y0, summary.count_y1) == (0, 0, 0)


def test_missing_file(tmp_path, explicit_schema):
    with pytest.raises(MissingFile) as exc:
        load_csv(tmp_path / "absent.csv", explicit_schema)
    assert "absent.csv" in exc.value.path


def test_header_mismatch_lists_columns(tmp_path, explicit_schema):
    """Test unexpected and absent columns are both reported."""
    path = write(tmp_path / "d.csv", "bytes,proto,syn,extra,class\n1,tcp,1,9,S\n")
    with pytest.raises(HeaderMismatch) as exc:
        load_csv(path, explicit_schema)
    assert exc.value.unexpected == ["extra"]
    assert exc.value.absent == ["note"]


def test_headerless_column_count_mismatch(tmp_path):
    schema = ScenarioSchema.from_document({
        "header": False,
        "columns": [{"name": "a"}, {"name": "b"}, {"name": "y", "role": "label", "kind": "categorical"}],
        "label_spec": {"negative_tokens": ["normal"], "mode": "complement"},
    })
    path = write(tmp_path / "d.csv", "1,2,normal,7\n")
    with pytest.raises(HeaderMismatch):
        load_csv(path, schema)


def test_load_csv_is_pure(tmp_path, explicit_schema):
    """Test loading the same bytes twice gives equal tables and digests."""
    path = write(tmp_path / "d.csv", "bytes,proto,syn,note,class\n1,tcp,1,x,S\n?,udp,0,y,B\n3,,1,z,S\n")
    first = load_csv(path, explicit_schema)
    second = load_csv(path, explicit_schema)

    assert first.schema == second.schema
    assert first.provenance.sha256 == second.provenance.sha256
    assert first.missing_counts == second.missing_counts
    assert np.array_equal(first.labels, second.labels)
    for name in first.feature_names:
        assert first.columns[name].tolist() == second.columns[name].tolist()


def test_empty_file_with_header_expected(tmp_path, explicit_schema):
    path = write(tmp_path / "d.csv", "")
    with pytest.raises(HeaderMismatch) as exc:
        load_csv(path, explicit_schema)
    assert exc.value.absent == sorted(["bytes", "proto", "syn", "note", "class"])
    assert exc.value.exit_code == 3


def test_row_with_extra_fields(tmp_path, explicit_schema):
    path = write(tmp_path / "d.csv", "bytes,proto,syn,note,class\n1,tcp,1,x,S\n2,udp,0,y,B,7,8\n")
    with pytest.raises(MalformedCsv) as exc:
        load_csv(path, explicit_schema)
    assert exc.value.path == str(path)
    assert "saw 7" in exc.value.detail


def test_invalid_utf8(tmp_path, explicit_schema):
    path = tmp_path / "d.csv"
    path.write_bytes(b"bytes,proto,syn,note,class\n1,tcp,1,\xff\xfe,S\n")
    with pytest.raises(MalformedCsv) as exc:
        load_csv(path, explicit_schema)
    assert exc.value.exit_code == 3


def test_label_parse_failure_reports_row_and_token(tmp_path, explicit_schema):
    path = write(tmp_path / "d.csv", "bytes,proto,syn,note,class\n1,tcp,1,x,S\n2,tcp,1,x,Q\n")
    with pytest.raises(LabelParseFailure) as exc:
        load_csv(path, explicit_schema)
    assert exc.value.row == 1
    assert exc.value.token == "Q"


def test_label_count_verification(tmp_path):
    """Test a full-size file whose label mapping disagrees with the expected counts."""
    schema = ScenarioSchema.from_document({
        "columns": [{"name": "a"}, {"name": "class", "role": "label", "kind": "categorical"}],
        "label_spec": {"positive_tokens": ["S"], "negative_tokens": ["B"], "verify_counts": True},
        "expected": {"n_rows": 4, "count_y0": 1, "count_y1": 3},
    })
    path = write(tmp_path / "d.csv", "a,class\n1,S\n2,B\n3,S\n4,B\n")
    with pytest.raises(LabelCountMismatch) as exc:
        load_csv(path, schema)
    assert exc.value.observed == {"count_y0": 2, "count_y1": 2}


def test_label_count_verification_skipped_on_partial_file(tmp_path, caplog):
    schema = ScenarioSchema.from_document({
        "columns": [{"name": "a"}, {"name": "class", "role": "label", "kind": "categorical"}],
        "label_spec": {"positive_tokens": ["S"], "negative_tokens": ["B"], "verify_counts": True},
        "expected": {"n_rows": 100, "count_y0": 50, "count_y1": 50},
    })
    path = write(tmp_path / "d.csv", "a,class\n1,S\n2,B\n")
    ds = load_csv(path, schema)
    assert ds.n_rows == 2
    assert "Skipping label-count verification" in caplog.text


def test_unlisted_columns_are_inferred(tmp_path):
    schema = ScenarioSchema.from_document({
        "infer_unlisted": True,
        "columns": [{"name": "class", "role": "label", "kind": "categorical"}],
        "label_spec": {"positive_tokens": ["S"], "negative_tokens": ["B"]},
    })
    path = write(
        tmp_path / "d.csv",
        "perm_a,api,size,class\n1,get,0.5,S\n0,put,17,B\n1,get,3,B\n0,get,2,S\n1,put,8,B\n0,get,1,S\n",
    )
    ds = load_csv(path, schema)
    kinds = {c.name: c.kind for c in ds.feature_schema}
    assert kinds == {"perm_a": FeatureKind.BINARY, "api": FeatureKind.CATEGORICAL, "size": FeatureKind.NUMERIC}


def test_high_cardinality_column_dropped(tmp_path, caplog):
    """Test an inferred categorical column with a level per row is dropped."""
    schema = ScenarioSchema.from_document({
        "infer_unlisted": True,
        "columns": [{"name": "class", "role": "label", "kind": "categorical"}],
        "label_spec": {"positive_tokens": ["S"], "negative_tokens": ["B"]},
    })
    lines = ["host,a,class"] + [f"10.0.0.{i},{i},{'S' if i % 2 else 'B'}" for i in range(10)]
    path = write(tmp_path / "d.csv", "\n".join(lines) + "\n")
    ds = load_csv(path, schema)

    roles = {c.name: c.role for c in ds.schema}
    assert roles["host"] == ColumnRole.DROPPED
    assert ds.feature_names == ["a"]
    assert "high-cardinality" in caplog.text


def test_binarize_complement():
    spec = LabelSpec(negative_tokens=frozenset({"normal"}), mode="complement")
    assert binarize_labels(["normal", "neptune", "smurf", "normal"], spec).tolist() == [0, 1, 1, 0]


def test_binarize_all_positive():
    spec = LabelSpec(positive_tokens=frozenset({"1"}), negative_tokens=frozenset({"0"}))
    assert binarize_labels(["1", "1", "1"], spec).tolist() == [1, 1, 1]


def test_binarize_is_idempotent():
    spec = LabelSpec(negative_tokens=frozenset({"normal"}), mode="complement")
    once = binarize_labels(["normal", "neptune", "normal", "smurf"], spec)
    identity = LabelSpec(positive_tokens=frozenset({"1"}), negative_tokens=frozenset({"0"}))
    assert binarize_labels([str(v) for v in once], identity).tolist() == once.tolist()


def test_binarize_unmapped_token():
    spec = LabelSpec(positive_tokens=frozenset({"1"}), negative_tokens=frozenset({"0"}))
    with pytest.raises(UnmappedToken) as exc:
        binarize_labels(["0", "1", "2"], spec)
    assert (exc.value.row, exc.value.token) == (2, "2")


def test_label_spec_rejects_overlap():
    with pytest.raises(ValueError):
        LabelSpec(positive_tokens=frozenset({"a"}), negative_tokens=frozenset({"a"}))


def test_infer_feature_kinds():
    """Test the numeric, binary and categorical inference rules."""
    sample = pd.DataFrame({
        "protocol_type": ["tcp", "udp", "icmp"],
        "flag": ["0", "1", "1"],
        "src_bytes": ["0", "0.17", "5491"],
        "empty": ["", "?", ""],
    })
    schemas = {s.name: s for s in infer_feature_kinds(sample)}

    assert schemas["protocol_type"].kind == FeatureKind.CATEGORICAL
    assert schemas["protocol_type"].levels == ("icmp", "tcp", "udp")
    assert schemas["flag"].kind == FeatureKind.BINARY
    assert schemas["src_bytes"].kind == FeatureKind.NUMERIC
    assert schemas["empty"].kind == FeatureKind.NUMERIC


def test_infer_overrides_win():
    sample = pd.DataFrame({"port": ["80", "443"]})
    schemas = infer_feature_kinds(sample, overrides={"port": FeatureKind.CATEGORICAL})
    assert schemas[0].kind == FeatureKind.CATEGORICAL
    assert schemas[0].levels == ("443", "80")


def test_infer_empty_sample_needs_overrides():
    sample = pd.DataFrame({"a": pd.Series([], dtype=object), "b": pd.Series([], dtype=object)})
    with pytest.raises(EmptySampleWithoutOverrides) as exc:
        infer_feature_kinds(sample, overrides={"a": FeatureKind.NUMERIC})
    assert exc.value.columns == ["b"]


@pytest.mark.parametrize("scenario_id", ["network", "android", "iot"])
def test_shipped_schemas_load(scenario_id):
    schema = load_scenario_schema(scenario_id)
    assert schema.expected is not None
    assert set(schema.reference_results) == {"LR", "RF", "GBM", "DL", "SL1", "SL2"}


def test_network_schema_lists_41_features():
    schema = load_scenario_schema("network")
    features = [c for c in schema.columns if c.role == ColumnRole.FEATURE]
    assert len(features) == 41
    assert schema.header is False
    assert schema.label_column == "label"
    assert schema.expected.count_y0 == 13449
    assert schema.expected.count_y1 == 11743


def test_unknown_scenario():
    with pytest.raises(InvalidConfig):
        load_scenario_schema("satellite")


def test_schema_requires_one_label():
    with pytest.raises(InvalidConfig):
        ScenarioSchema.from_document({"columns": [{"name": "a"}], "label_spec": {"negative_tokens": ["0"], "mode": "complement"}})


def test_summarize_counts(synthetic_csv, synthetic_schema):
    ds = load_csv(synthetic_csv, synthetic_schema)
    summary = summarize(ds)

    assert summary.n_rows == 120
    assert summary.n_features == 4
    assert summary.count_y0 + summary.count_y1 == 120
    assert summary.count_y1 == int(np.sum(ds.labels))
    assert summary.balanced == min(summary.count_y0, summary.count_y1)
    assert sum(summary.level_counts["protocol"].values()) == 120
