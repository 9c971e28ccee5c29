import csv
import json

import numpy as np
import pytest

from tbw_autoland.cli import build_parser, main
from tbw_autoland.io import (
    METRIC_COLUMNS, read_history_csv, read_learning_curve_csv, read_metrics_csv,
    write_history_csv, write_learning_curve_csv, write_metrics_csv,
)
from tbw_autoland.rl import QTable
from tbw_autoland.scenarios import HISTORY_COLUMNS, ScenarioConfig, evaluate


@pytest.fixture(scope="module")
def di_run():
    return evaluate(ScenarioConfig(controller="di"))


def test_history_round_trip(tmp_path, di_run):
    path = write_history_csv(tmp_path / "history.csv", di_run.history)
    with open(path) as fh:
        assert next(csv.reader(fh)) == list(HISTORY_COLUMNS)
    back = read_history_csv(path)
    for c in HISTORY_COLUMNS:
        assert np.array_equal(back[c], di_run.history[c])


def test_metrics_round_trip_and_order(tmp_path, di_run):
    other = evaluate(ScenarioConfig(kind="model_uncertainty", controller="di"), keep_history=False)
    a = write_metrics_csv(tmp_path / "a.csv", [other, di_run])
    b = write_metrics_csv(tmp_path / "b.csv", [di_run, other])
    assert a.read_text() == b.read_text()
    rows = read_metrics_csv(a)
    assert [r["kind"] for r in rows] == ["ideal", "model_uncertainty"]
    assert rows[0]["TE_theta_deg"] == di_run.TE_theta and rows[0]["landed"] is True
    assert list(rows[0]) == list(METRIC_COLUMNS)


def test_learning_curve(tmp_path):
    returns = np.arange(250, dtype=float)
    path = write_learning_curve_csv(tmp_path / "lc.csv", returns)
    assert np.array_equal(read_learning_curve_csv(path), returns)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert float(rows[-1]["moving_average_100"]) == pytest.approx(np.mean(returns[-100:]))
    assert list(rows[0]) == ["episode", "return", "moving_average_100"]


def test_parser_knows_every_subcommand():
    sub = build_parser()._subparsers._group_actions[0].choices
    assert set(sub) == {"trim", "train", "evaluate", "sweep", "compare"}


def test_cli_trim(capsys):
    assert main(["trim", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["V"] == 160.0 and out["thrust_N"] > 0 and len(out["phugoid"]) == 2


def test_cli_train_evaluate_compare(tmp_path, capsys):
    table = tmp_path / "fql.qt"
    assert main(["train", "--method", "fql", "--episodes", "3", "--seed", "1", "--out", str(table)]) == 0
    assert QTable.load(table).values.shape == (29, 8, 21)
    assert len(read_learning_curve_csv(tmp_path / "learning_curve.csv")) == 3
    assert json.loads((tmp_path / "fql_manifest.json").read_text())["seed"] == 1

    run_dir = tmp_path / "run"
    code = main(["evaluate", "--scenario", "ideal", "--controller", "fql", "--table", str(table),
                 "--outdir", str(run_dir)])
    assert code in (0, 2)
    for name in ("history.csv", "metrics.csv", "manifest.json"):
        assert (run_dir / name).exists()

    di_dir = tmp_path / "di"
    assert main(["evaluate", "--scenario", "ideal", "--controller", "di", "--outdir", str(di_dir)]) == 0
    out_dir = tmp_path / "cmp"
    assert main(["compare", "--metrics", str(run_dir / "metrics.csv"), str(di_dir / "metrics.csv"),
                 "--outdir", str(out_dir)]) == 0
    text = (out_dir / "comparison.txt").read_text()
    assert "ideal" in text and "TE_theta" in text
    with open(out_dir / "comparison.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 3


def test_cli_evaluate_with_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    ScenarioConfig(duration=2.0).save(cfg)
    assert main(["evaluate", "--scenario", "ideal", "--controller", "di", "--config", str(cfg),
                 "--outdir", str(tmp_path)]) == 0
    rows = read_metrics_csv(tmp_path / "metrics.csv")
    assert rows[0]["elapsed_s"] == pytest.approx(2.0)


def test_cli_sweep(tmp_path):
    cfg = tmp_path / "cfg.json"
    ScenarioConfig(kind="sweep", duration=0.5).save(cfg)
    assert main(["sweep", "--controller", "di", "--config", str(cfg), "--outdir", str(tmp_path)]) == 0
    assert len(read_metrics_csv(tmp_path / "metrics.csv")) == 81


def test_cli_rejects_bad_scenario():
    with pytest.raises(SystemExit):
        main(["evaluate", "--scenario", "storm", "--controller", "di"])
