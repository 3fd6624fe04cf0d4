"""Experiment configs, report serialization, and the command line."""

import json

import pytest

from bergman_lab import UsageError
from bergman_lab.cli import main
from bergman_lab.experiments import (
    ExperimentConfig,
    cmd_kernel_check,
    rows_to_csv,
    rows_to_json,
    run_selected,
    worker_count,
    write_report,
)

CSV_HEADER = "experiment,k,quantity,measured,reference,provenance,tolerance,pass,source"


def small_config(**overrides):
    base = dict(quad=(48, 96), k_list=(1, 2), seed=42)
    base.update(overrides)
    return ExperimentConfig.from_mapping(base)


def test_config_validation_catches_bad_settings():
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"n": 5})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"k_list": []})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"k_list": [0]})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"n": 3, "quad": [48, 96]})  # needs 3 entries
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"basis_degree": 16})  # below mode 33
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"format": "yaml"})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"seed": -1})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"mystery_knob": 1})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"tolerances": {"no_such": 1e-6}})
    with pytest.raises(UsageError):
        ExperimentConfig.from_mapping({"tolerances": {"identity": -1.0}})


def test_config_tolerance_overrides_merge():
    cfg = ExperimentConfig.from_mapping({"tolerances": {"identity": 1e-3}})
    assert cfg.tolerances["identity"] == 1e-3
    assert cfg.tolerances["kernel_symmetry"] == 1e-13


def test_kernel_rows_shape_and_pass():
    rows = run_selected(small_config(), ("kernel",))
    assert all(r.experiment == "kernel" for r in rows)
    assert all(r.passed for r in rows)
    assert [r.quantity for r in rows] == sorted(r.quantity for r in rows)
    paper_rows = [r for r in rows if r.provenance == "paper"]
    assert paper_rows and all(r.source for r in paper_rows)


def test_reports_are_byte_deterministic():
    cfg = small_config()
    a = rows_to_csv(cmd_kernel_check(cfg))
    b = rows_to_csv(cmd_kernel_check(cfg))
    assert a == b
    assert a.splitlines()[0] == CSV_HEADER


def test_json_mirrors_csv_rows():
    cfg = small_config()
    rows = cmd_kernel_check(cfg)
    parsed = json.loads(rows_to_json(rows))
    assert len(parsed) == len(rows)
    for obj, row in zip(parsed, rows):
        assert list(obj) == ["experiment", "k", "quantity", "measured",
                             "reference", "provenance", "tolerance", "pass",
                             "source"]
        assert obj["measured"] == pytest.approx(row.measured, abs=0.0)
        assert obj["pass"] is row.passed
    # 17 significant digits survive the round trip exactly
    text = rows_to_json(rows)
    center = next(r for r in rows if r.quantity == "center_value[n=2]")
    assert format(center.measured, ".17g") in text


def test_run_selected_rejects_unknown_experiment():
    with pytest.raises(UsageError):
        run_selected(small_config(), ("kernel", "mystery"))


def test_run_selected_merges_and_sorts():
    cfg = small_config()
    rows = run_selected(cfg, ("counterexample", "kernel"))
    names = [r.experiment for r in rows]
    assert names == sorted(names)
    ks = [r.k for r in rows if r.experiment == "counterexample"]
    assert ks == sorted(ks, key=lambda k: -1 if k is None else k)


def test_worker_count_reads_environment(monkeypatch):
    monkeypatch.delenv("BERGMAN_LAB_THREADS", raising=False)
    assert worker_count() >= 1
    monkeypatch.setenv("BERGMAN_LAB_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("BERGMAN_LAB_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("BERGMAN_LAB_THREADS", "many")
    with pytest.raises(UsageError):
        worker_count()
    monkeypatch.setenv("BERGMAN_LAB_THREADS", "-2")
    with pytest.raises(UsageError):
        worker_count()


def test_write_report_validates_format(tmp_path):
    rows = cmd_kernel_check(small_config())
    with pytest.raises(UsageError):
        write_report(rows, None, "xml")
    out = tmp_path / "r.json"
    text = write_report(rows, str(out), "json")
    assert out.read_text() == text


def test_cli_writes_csv_and_exits_zero(tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = main(["--experiment", "kernel", "--out", str(out), "--seed", "42"])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert all(line.split(",")[7] == "true" for line in lines[1:])
    assert "0 failed" in capsys.readouterr().err


def test_cli_exit_one_on_failing_row(tmp_path, capsys):
    # an unreachable tolerance turns a passing measurement into a failed row
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(
        {"tolerances": {"kernel_harmonicity": 1e-15}, "seed": 42}))
    code = main(["--config", str(cfg_file), "--experiment", "kernel",
                 "--out", str(tmp_path / "r.csv")])
    assert code == 1
    assert "FAIL kernel" in capsys.readouterr().err


def test_cli_exit_two_on_bad_usage(tmp_path, capsys):
    assert main(["--experiment", "kernel", "--n", "5"]) == 2
    assert main(["--experiment", "kernel", "--k", "a,b"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == 2
    missing = tmp_path / "nope.json"
    assert main(["--config", str(missing)]) == 2
    listy = tmp_path / "list.json"
    listy.write_text("[1, 2]")
    assert main(["--config", str(listy)]) == 2
    capsys.readouterr()


def test_cli_flags_override_config(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"format": "json", "seed": 42}))
    code = main(["--config", str(cfg_file), "--experiment", "kernel",
                 "--format", "csv"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == CSV_HEADER


def test_cli_stdout_json_parses(capsys):
    code = main(["--experiment", "kernel", "--format", "json", "--seed", "7"])
    assert code == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["experiment"] for r in rows} == {"kernel"}
