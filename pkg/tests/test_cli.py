import csv
import json

import pytest

import fuzzyprox
from fuzzyprox import cli, sweep
from fuzzyprox.distance import HausdorffEstimate
from fuzzyprox.errors import InvalidParameterError
from fuzzyprox.sweep import (
    CONSTANT_EVALUATIONS,
    CSV_COLUMNS,
    SweepConfig,
    emit_report,
    load_reports,
    run_sweep,
)

TINY = dict(n_min=1, n_max=2, pairs=((1, 2), (1, 1)), family_size=8, samples=2)


@pytest.fixture(scope="module")
def tiny_result():
    before = CONSTANT_EVALUATIONS["count"]
    result = run_sweep(SweepConfig(**TINY))
    return result, CONSTANT_EVALUATIONS["count"] - before


def test_config_validation():
    for bad in (dict(n_min=0), dict(n_min=3, n_max=2), dict(n_max=17), dict(format="xml"),
                dict(pairs=((1, 20),)), dict(samples=0)):
        with pytest.raises(InvalidParameterError):
            SweepConfig(**bad)


def test_config_pairs_and_levels():
    cfg = SweepConfig(n_min=2, n_max=3)
    assert cfg.pair_list() == [(2, 2), (2, 3), (3, 3)]
    cfg = SweepConfig(n_min=1, n_max=2, pairs=((4, 4), (2, 2), (2, 2)))
    assert cfg.pair_list() == [(2, 2), (4, 4)]
    assert cfg.levels() == [1, 2, 4]
    assert cfg.exact_degree(5) == 7


def test_constants_computed_once_per_level(tiny_result):
    result, count = tiny_result
    assert count == 2
    assert sorted(result.constants) == [1, 2]
    assert abs(result.constants[1].delta - 2 / 3) < 1e-3


def test_reports_sorted_and_consistent(tiny_result):
    result, _ = tiny_result
    assert [(r.m, r.n) for r in result.reports] == [(1, 1), (1, 2)]
    assert not result.truncated
    for r in result.reports:
        assert r.consistent and r.empirical_hausdorff > 0


def test_csv_layout(tiny_result, tmp_path):
    result, _ = tiny_result
    path = tmp_path / "out.csv"
    emit_report(result.reports[:1], "csv", path)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 2
    assert float(rows[1][CSV_COLUMNS.index("certified_bound")]) == result.reports[0].certified_bound


def test_json_roundtrip(tiny_result, tmp_path):
    result, _ = tiny_result
    path = tmp_path / "out.json"
    emit_report(result, "json", path)
    doc = json.loads(path.read_text())
    assert doc["version"] == fuzzyprox.__version__
    assert doc["config"]["family_size"] == 8
    assert load_reports(path) == result.reports


def test_emit_errors(tiny_result, tmp_path):
    result, _ = tiny_result
    with pytest.raises(InvalidParameterError):
        emit_report([], "csv", tmp_path / "x.csv")
    with pytest.raises(InvalidParameterError):
        emit_report(result, "csv", tmp_path / "missing" / "x.csv")


def test_time_budget_truncates():
    result = run_sweep(SweepConfig(n_min=1, n_max=1, family_size=4, samples=1, time_budget=0.0))
    assert result.truncated and result.reports == []


def test_sweep_is_deterministic(tiny_result, tmp_path):
    result, _ = tiny_result
    again = run_sweep(SweepConfig(**TINY))
    emit_report(result, "json", tmp_path / "a.json")
    emit_report(again, "json", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_cli_sweep(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code = cli.main(["sweep", "--n-min", "1", "--n-max", "1", "--family-size", "4", "--samples", "1",
                     "--out", str(out), "--format", "csv"])
    assert code == 0
    assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)


def test_cli_consistency_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(sweep, "hausdorff_estimate", lambda *a, **k: HausdorffEstimate(99.0, (99.0,), 0))
    code = cli.main(["sweep", "--n-min", "1", "--n-max", "1", "--family-size", "4", "--samples", "1",
                     "--out", str(tmp_path / "s.json"), "--format", "json"])
    assert code == 3


def test_cli_constants_and_verify(capsys):
    assert cli.main(["constants", "--n", "1", "--family-size", "8"]) == 0
    assert "delta=0.66" in capsys.readouterr().out
    assert cli.main(["verify", "--n", "1", "--family-size", "8"]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    assert cli.main(["verify", "--n", "1", "--family-size", "8", "--gamma", "0.001"]) == 2


def test_cli_rejects_bad_input(capsys):
    assert cli.main(["sweep", "--n-min", "3", "--n-max", "1", "--out", "x.csv"]) == 1
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--n-min", "1", "--n-max", "2", "--pairs", "1-2", "--out", "x"])
