import json

import numpy as np
import pytest

from momineq.cli import main


@pytest.fixture
def zero_csv(tmp_path):
    path = tmp_path / "zero.csv"
    np.savetxt(path, np.zeros((10, 3)), delimiter=",")
    return path


def test_test_command_on_zero_data(zero_csv, capsys, tmp_path):
    assert main(["test", "--data", str(zero_csv), "--p", "3", "--method", "SN-1S",
                 "--out", str(tmp_path / "o")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["reject"] is False and out["statistic"] == 0.0 and out["critical_value"] > 0
    saved = json.loads((tmp_path / "o" / "test_outcome.json").read_text())
    assert saved == out


def test_test_command_bootstrap_needs_seed(zero_csv, capsys):
    assert main(["test", "--data", str(zero_csv), "--p", "3", "--method", "MB-1S"]) == 2
    assert "--seed" in capsys.readouterr().err


def test_test_command_lasso(tmp_path, capsys):
    path = tmp_path / "noise.csv"
    np.savetxt(path, np.random.default_rng(0).normal(size=(100, 4)) - 1.0, delimiter=",")
    assert main(["test", "--data", str(path), "--p", "4", "--method", "MB-Lasso:C=2,B=100",
                 "--seed", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["retained"] == 0 and out["reject"] is False


@pytest.mark.parametrize("argv, token", [
    (["test", "--method", "QQ-1S"], "QQ-1S"),
    (["simulate", "--design", "15", "--seed", "1"], "15"),
    (["simulate", "--design", "3", "--seed", "-4"], "-4"),
    (["simulate", "--design", "3", "--seed", "1", "--errors", "cauchy"], "cauchy"),
    (["simulate", "--design", "3", "--seed", "1", "--method", "SN-2S:beta=0.5"], "SN-2S"),
    (["simulate", "--design", "3", "--seed", "1", "--method", "SN-1S:gamma=2"], "gamma"),
])
def test_validation_errors_exit_two(argv, token, zero_csv, capsys):
    if argv[0] == "test":
        argv = argv + ["--data", str(zero_csv), "--p", "3"]
    assert main(argv) == 2
    assert token in capsys.readouterr().err


def test_missing_data_file(tmp_path, capsys):
    assert main(["test", "--data", str(tmp_path / "nope.csv"), "--p", "1",
                 "--method", "SN-1S"]) == 2


def test_simulate_single_replication_is_deterministic(tmp_path):
    argv = ["simulate", "--design", "3", "--p", "200", "--R", "1", "--B", "100",
            "--seed", "17", "--method", "SN-1S,MB-1S,MB-Lasso:C=2"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    a = (tmp_path / "a" / "simulation_rejection.csv").read_bytes()
    assert a == (tmp_path / "b" / "simulation_rejection.csv").read_bytes()
    lines = a.decode().splitlines()
    assert len(lines) == 2
    assert lines[0] == "design,errors,p,rho,R,SN-1S,MB-1S,MB-Lasso(C=2)"


def test_simulate_from_config(tmp_path):
    cfg = {"design": [8], "p": [30], "rho": [0.5], "R": 2, "B": 100, "seed": 3,
           "method": ["SN-2S:beta=0.001", "EB-H:beta=0.001"]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "simulation.json").read_text())
    assert report["R"] == 2 and report["cells"][0]["rho"] == 0.5
    assert [m["label"] for m in report["methods"]] == ["SN-2S(beta=0.1%)", "EB-H(beta=0.1%)"]


def test_diagnose_default_grid(tmp_path, capsys):
    assert main(["diagnose", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "heatmap.csv").read_text().splitlines()
    assert len(lines) == 1 + 100 * 101
    assert main(["diagnose", "--out", str(tmp_path / "s"), "--steps-p", "5",
                 "--steps-M", "4"]) == 0
    assert len((tmp_path / "s" / "heatmap.csv").read_text().splitlines()) == 21


def test_confset_command(tmp_path):
    np.savetxt(tmp_path / "a.csv", np.zeros((20, 2)), delimiter=",")
    np.savetxt(tmp_path / "b.csv", np.column_stack([np.ones(20), np.zeros(20)]), delimiter=",")
    cfg = {"method": "MB-1S", "B": 100, "seed": 5, "p": 2,
           "grid": [{"theta": 0.0, "data": "a.csv"}, {"theta": 1.0, "data": "b.csv"},
                    {"theta": 2.0, "data": "missing.csv"}]}
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["confset", "--config", str(tmp_path / "cfg.json"),
                 "--out", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "confset.csv").read_text().splitlines()
    assert rows[0] == "index,theta,statistic,critical_value,reject,in_set,error"
    assert rows[1].split(",")[5] == "1"
    assert rows[2].split(",")[5] == "0"
    assert "FileNotFoundError" in rows[3]


def test_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["diagnose", "--config", str(path)]) == 2
    assert main(["diagnose", "--config", str(tmp_path / "none.json")]) == 2


def test_runtime_failure_exit_one(zero_csv, monkeypatch, capsys):
    import momineq.cli as cli

    def boom(*a, **k):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli, "run_method", boom)
    assert main(["test", "--data", str(zero_csv), "--p", "3", "--method", "SN-1S"]) == 1
    assert "disk on fire" in capsys.readouterr().err
