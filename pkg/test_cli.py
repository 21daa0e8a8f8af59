"""命令行入口与退出码"""

import json

import pytest

from main import EXIT_CONFIG, EXIT_IO, EXIT_OK, main

SMALL_CONFIG = """\
experiment:
  algorithm: "1+lambda"
  fitness: dlb
  n: 10
  budget: 20000
  repetitions: 4
  master_seed: 5
  trajectory_stride: 2000
params:
  lambda: 2
output:
  dir: results/small
run:
  workers: 2
"""


@pytest.fixture
def config_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = tmp_path / "small.yaml"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    return path


def test_run_writes_results(config_path, tmp_path):
    assert main(["run", "--config", str(config_path)]) == EXIT_OK
    out = tmp_path / "results" / "small"
    assert (out / "runs.csv").exists()
    assert (out / "trajectory.csv").exists()
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["runs"] == 4


def test_run_twice_is_byte_identical(config_path, tmp_path):
    assert main(["run", "--config", str(config_path), "--out", "a"]) == EXIT_OK
    assert main(["run", "--config", str(config_path), "--out", "b"]) == EXIT_OK
    for name in ("runs.csv", "trajectory.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_override_changes_seed_column(config_path, tmp_path):
    assert main(["run", "--config", str(config_path), "--seed", "11", "--out", "s"]) == EXIT_OK
    rows = (tmp_path / "s" / "runs.csv").read_text(encoding="utf-8").splitlines()[1:]
    assert all(row.split(",")[6] == "11" for row in rows)


def test_missing_config_exits_with_config_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["run", "--config", "absent.yaml"]) == EXIT_CONFIG


def test_invalid_config_exits_with_config_error(config_path):
    config_path.write_text(SMALL_CONFIG.replace("repetitions: 4", "repetitions: 0"), encoding="utf-8")
    assert main(["run", "--config", str(config_path)]) == EXIT_CONFIG


def test_unwritable_output_exits_with_io_error(config_path, tmp_path):
    (tmp_path / "taken").write_text("x")
    assert main(["run", "--config", str(config_path), "--out", "taken/res"]) == EXIT_IO


def test_summarize_rewrites_summary(config_path, tmp_path):
    assert main(["run", "--config", str(config_path), "--out", "r"]) == EXIT_OK
    (tmp_path / "r" / "summary.json").unlink()
    assert main(["summarize", "--in", "r"]) == EXIT_OK
    assert (tmp_path / "r" / "summary.json").exists()


def test_summarize_missing_directory(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["summarize", "--in", "nowhere"]) == EXIT_IO


def test_verify_prints_json(capsys):
    assert main(["verify", "--trials", "200", "--seed", "3"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    names = {c["name"] for c in report["checks"]}
    assert "theta_200_1000_0.1" in names
    assert "trap_frequency" in names
