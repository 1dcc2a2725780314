import json

import pytest
from click.testing import CliRunner

from qsdcsim.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_run_happy_path(runner, tmp_path):
    out = tmp_path / "transcript.json"
    result = runner.invoke(main, [
        "run", "--n-users", "2", "--mode", "partial",
        "--message", "100111", "--seed", "7", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "decoded: 100111" in result.output
    data = json.loads(out.read_text())
    assert data["header"]["seed"] == 7
    assert data["final"]["u2"] == "100111"


def test_run_usage_error_exit_2(runner, tmp_path):
    result = runner.invoke(main, [
        "run", "--n-users", "1", "--seed", "1",
        "--out", str(tmp_path / "t.json")])
    assert result.exit_code == 2


def test_run_missing_seed_is_usage_error(runner, tmp_path):
    result = runner.invoke(main, ["run", "--out", str(tmp_path / "t.json")],
                           env={"QSDC_SEED": None})
    assert result.exit_code == 2


def test_seed_env_fallback(runner, tmp_path):
    out = tmp_path / "t.json"
    result = runner.invoke(main, ["run", "--message", "10", "--out", str(out)],
                           env={"QSDC_SEED": "33"})
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text())["header"]["seed"] == 33


def test_run_masquerade_alarm_exit_1(runner, tmp_path):
    result = runner.invoke(main, [
        "run", "--attack", "masquerade", "--message", "10", "--seed", "4",
        "--out", str(tmp_path / "t.json")])
    assert result.exit_code == 1
    assert "ALARM" in result.output


def test_run_intercept_trials_reports_three_sigma(runner, tmp_path):
    result = runner.invoke(main, [
        "run", "--attack", "intercept", "--trials", "2000", "--seed", "3",
        "--out", str(tmp_path / "t.json")])
    assert result.exit_code == 1
    assert "symbol_error_rate" in result.output
    assert "3-sigma" in result.output


def test_run_same_seed_identical_transcripts(runner, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        result = runner.invoke(main, [
            "run", "--n-users", "3", "--message", "101101",
            "--seed", "55", "--out", str(path)])
        assert result.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_curves_writes_csvs(runner, tmp_path):
    csv_dir = tmp_path / "curves"
    result = runner.invoke(main, ["curves", "--csv-dir", str(csv_dir)])
    assert result.exit_code == 0, result.output
    assert (csv_dir / "fig2a.csv").exists()
    assert (csv_dir / "fig2de.csv").exists()
    assert "[PASS]" in result.output
    assert "[FAIL]" not in result.output


def test_tables_writes_report(runner, tmp_path):
    out = tmp_path / "tables"
    result = runner.invoke(main, ["tables", "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "decode_tables.json").read_text())
    assert report["ok"] is True
    assert "status: PASS" in (out / "conformance.txt").read_text()
