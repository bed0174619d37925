"""
Tests for the idsbench command line and its exit codes.
"""

import json

import pytest

from main import build_parser, main
from tests.helpers import SYNTHETIC_SCHEMA, write_synthetic_csv


@pytest.fixture
def cli_files(tmp_path):
    data = write_synthetic_csv(tmp_path / "traffic.csv", n=80, seed=2)
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps(SYNTHETIC_SCHEMA), encoding="utf-8")
    return data, schema


def schema_with_counts(tmp_path, **expected):
    path = tmp_path / "counted.json"
    path.write_text(json.dumps({**SYNTHETIC_SCHEMA, "expected": expected}), encoding="utf-8")
    return path


def test_parser_flags():
    args = build_parser().parse_args(["run", "--scenario", "iot", "--data", "d.csv", "--test-fraction", "0.3", "--dry-run"])
    assert args.command == "run"
    assert args.test_fraction == 0.3
    assert args.dry_run
    assert args.seed is None


def test_inspect_prints_summary(cli_files, capsys):
    data, schema = cli_files
    assert main(["inspect-data", "--data", str(data), "--scenario", "network", "--schema", str(schema)]) == 0
    out = capsys.readouterr().out
    assert "80" in out
    assert "missing cells: none" in out


def test_inspect_count_mismatch_exits_5(cli_files, tmp_path, capsys):
    data, _ = cli_files
    schema = schema_with_counts(tmp_path, n_rows=81)
    code = main([
        "inspect-data", "--data", str(data), "--scenario", "network",
        "--schema", str(schema), "--expect-paper-counts",
    ])
    assert code == 5
    assert "count mismatch n_rows: expected 81, observed 80" in capsys.readouterr().out


def test_inspect_counts_match(cli_files, tmp_path, capsys):
    data, _ = cli_files
    schema = schema_with_counts(tmp_path, n_rows=80, n_features=4)
    code = main([
        "inspect-data", "--data", str(data), "--scenario", "network",
        "--schema", str(schema), "--expect-paper-counts",
    ])
    assert code == 0
    assert "counts match" in capsys.readouterr().out


def test_inspect_missing_file_exits_3(tmp_path):
    assert main(["inspect-data", "--data", str(tmp_path / "absent.csv"), "--scenario", "iot"]) == 3


def test_run_dry_run(cli_files, tmp_path):
    data, schema = cli_files
    out = tmp_path / "results"
    code = main([
        "run", "--scenario", "network", "--data", str(data), "--schema", str(schema),
        "--out", str(out), "--dry-run",
    ])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["dry_run"] is True
    assert manifest["config"]["seed"] == 42


def test_run_invalid_flag_exits_2(cli_files, tmp_path):
    data, _ = cli_files
    code = main(["run", "--scenario", "network", "--data", str(data), "--k", "1", "--out", str(tmp_path)])
    assert code == 2


def test_run_then_plot(cli_files, tmp_path, capsys):
    data, schema = cli_files
    config = tmp_path / "run.json"
    config.write_text(json.dumps({
        "overrides": {
            "glm": {"n_iter": 50},
            "random_forest": {"n_trees": 4, "max_depth": 4},
            "gbm": {"n_rounds": 5, "max_depth": 2, "min_samples_leaf": 2},
            "mlp": {"hidden_layers": [4], "epochs": 3},
            "sl1_meta": {"epochs": 5},
            "sl2_meta": {"n_rounds": 5, "min_samples_leaf": 2},
        },
    }), encoding="utf-8")
    out = tmp_path / "results"
    code = main([
        "run", "--scenario", "network", "--data", str(data), "--schema", str(schema),
        "--config", str(config), "--k", "3", "--out", str(out),
    ])
    assert code == 0
    assert "Gradient Boosting" in capsys.readouterr().out

    (out / "roc_all.svg").unlink()
    assert main(["plot", "--in", str(out)]) == 0
    assert (out / "roc_all.svg").is_file()
    assert "Rendered 6 curves" in capsys.readouterr().out


def test_run_unwritable_out_exits_3(cli_files, tmp_path):
    data, schema = cli_files
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    code = main([
        "run", "--scenario", "network", "--data", str(data), "--schema", str(schema),
        "--out", str(blocker / "out"), "--dry-run",
    ])
    assert code == 3


def test_inspect_malformed_csv_exits_3(cli_files, tmp_path):
    _, schema = cli_files
    data = tmp_path / "ragged.csv"
    data.write_text("duration,protocol,src_bytes,flag,outcome\n1,tcp,2,0,normal\n1,tcp,2,0,normal,9,9\n", encoding="utf-8")
    assert main(["inspect-data", "--data", str(data), "--scenario", "network", "--schema", str(schema)]) == 3
