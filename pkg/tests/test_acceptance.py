"""
Full-size scenario runs against the public datasets.

Each test is skipped unless its file is present under data/ in the
repository root: data/network.csv, data/android.csv, data/iot.csv.
"""

from pathlib import Path

import pytest

from idsbench.bench import resolve_config, run_scenario
from idsbench.ingest import load_csv, load_scenario_schema, summarize
from main import count_differences

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
SCENARIOS = ("network", "android", "iot")

pytestmark = pytest.mark.slow


def dataset(scenario_id):
    path = DATA_DIR / f"{scenario_id}.csv"
    if not path.is_file():
        pytest.skip(f"{path} not present")
    return path


@pytest.fixture(scope="module")
def results(tmp_path_factory):
    cache = {}

    def run(scenario_id):
        if scenario_id not in cache:
            path = dataset(scenario_id)
            out = tmp_path_factory.mktemp(scenario_id)
            config = resolve_config({"scenario": scenario_id, "data": path, "out": out, "workers": 4})
            table, _ = run_scenario(config)
            cache[scenario_id] = {r.model_id: r for r in table.rows}
        return cache[scenario_id]

    return run


@pytest.mark.parametrize("scenario_id", SCENARIOS)
def test_dataset_counts(scenario_id):
    schema = load_scenario_schema(scenario_id)
    summary = summarize(load_csv(dataset(scenario_id), schema))
    assert count_differences(schema, summary) == {}


@pytest.mark.parametrize("scenario_id", SCENARIOS)
def test_ordering(results, scenario_id):
    rows = results(scenario_id)
    base = {i: rows[i].auc for i in ("LR", "RF", "GBM", "DL")}
    assert base["LR"] == min(base.values())
    assert base["GBM"] == max(base.values())
    for sl in ("SL1", "SL2"):
        assert rows[sl].auc >= max(base.values()) - 0.002


def test_network(results):
    rows = results("network")
    assert rows["GBM"].auc >= 0.999
    assert rows["GBM"].accuracy >= 0.990
    assert rows["RF"].auc >= 0.998
    assert rows["SL2"].accuracy >= rows["GBM"].accuracy - 0.002


def test_android(results):
    rows = results("android")
    assert 0.993 <= rows["GBM"].auc <= 1.0
    assert rows["SL1"].auc >= 0.993
    assert all(rows["SL1"].auc >= rows[i].auc - 0.002 for i in ("LR", "RF", "GBM", "DL"))


def test_iot(results):
    rows = results("iot")
    assert rows["GBM"].auc >= 0.995
    assert abs(rows["LR"].auc - 0.8747) <= 0.05
    assert rows["SL2"].auc >= 0.995
    assert rows["SL2"].accuracy >= 0.985
