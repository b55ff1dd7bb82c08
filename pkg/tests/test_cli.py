import json
import subprocess
import sys

import jsonschema
import pytest

from raqm.cli import load_schema, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def validate(doc, name):
    jsonschema.validate(doc, load_schema(name))


def test_bell_small(tmp_path, capsys):
    code, out, _ = run(capsys, "bell", "--runs", "300", "--seed", "3", "--out", str(tmp_path))
    assert code == 0
    assert "exact statistic: 3/2" in out
    report = json.loads((tmp_path / "bell_report.json").read_text(encoding="utf-8"))
    validate(report, "bell_report")
    assert report["master_seed"] == 3
    lines = (tmp_path / "bell_runs.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 900
    for line in lines[:50]:
        validate(json.loads(line), "bell_run")
    header = (tmp_path / "bell_correlation.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "ensemble,exact_cos,runs,empirical_Co,exact_Co"


def test_bell_csv_format(tmp_path, capsys):
    code, _, _ = run(capsys, "bell", "--runs", "50", "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    header = (tmp_path / "bell_runs.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "run_id,ensemble,xi_seed,jitter_seed,exact_cos,alice,bob,position"


@pytest.mark.parametrize("argv", [
    ["bell", "--runs", "0"],
    ["bell", "--runs", "ten"],
    ["bell", "--tolerance", "0"],
    ["bell", "--nominals", "0,1/6"],
    ["bell", "--seed", "-1"],
    ["mz", "--window", "0"],
    ["mz", "--window", "abc"],
    ["triangle", "2/1", "0", "0"],
    ["triangle", "1/2", "x", "0"],
    ["collapse", "10x1"],
    ["collapse"],
    ["mi-diagnostic", "--runs", "999"],
])
def test_usage_errors_exit_2(tmp_path, capsys, argv):
    code, _, err = run(capsys, *argv, *(["--out", str(tmp_path)] if argv[0] == "bell" else []))
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nosuch"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bell", "--format", "xml"])
    assert exc.value.code == 2


def test_infeasible_exit_3(tmp_path, capsys):
    code, _, err = run(capsys, "bell", "--L", "4", "--tolerance", "1/1000000", "--nominals", "0,1/5,2/5",
                       "--runs", "2", "--out", str(tmp_path))
    assert code == 3 and "run 0" in err


def test_mz(capsys):
    code, out, _ = run(capsys, "mz", "--nominal", "0", "--window", "1/100")
    doc = json.loads(out)
    validate(doc, "census")
    assert code == 0 and doc["census"] == {"total": 73, "doubly_rational": 1}
    code, out, _ = run(capsys, "mz", "--nominal", "1/10", "--window", "1/100")
    assert json.loads(out)["census"]["doubly_rational"] == 0


def test_triangle(capsys):
    code, out, _ = run(capsys, "triangle", "3/5", "5/13", "1/4")
    doc = json.loads(out)
    validate(doc, "triangle")
    assert code == 0 and doc["defined"] and doc["cos_AC"] == "3/13"
    code, out, _ = run(capsys, "triangle", "1/2", "1/2", "359/720")
    doc = json.loads(out)
    validate(doc, "triangle")
    assert code == 1 and doc["obstruction"] == "NonNivenAngle"


def test_collapse(tmp_path, capsys):
    code, out, _ = run(capsys, "collapse", "10011010", "--out", str(tmp_path))
    assert code == 0 and "steps: 7" in out
    doc = json.loads((tmp_path / "collapse.json").read_text(encoding="utf-8"))
    validate(doc, "collapse")
    assert doc["steps"][-1] == "1"
    assert "steps: 0" in run(capsys, "collapse", "1")[1]
    code, out, _ = run(capsys, "collapse", "--L", "64", "--m", "20", "--n", "5", "--seed", "8")
    assert code == 0 and "steps: 63" in out
    run(capsys, "collapse", "1101", "--format", "csv", "--out", str(tmp_path))
    assert (tmp_path / "collapse.csv").read_text(encoding="utf-8").splitlines()[0] == "step,word,length"


def test_mi_diagnostic(capsys):
    code, out, _ = run(capsys, "mi-diagnostic", "--seed", "1")
    doc = json.loads(out)
    validate(doc, "mi_report")
    assert code == 0 and doc["runs"] == 1000 and doc["defined"] == 0


def test_quaternion_check(capsys):
    code, out, _ = run(capsys, "quaternion-check", "--levels", "4,8,16")
    doc = json.loads(out)
    validate(doc, "quaternion_check")
    assert code == 0 and doc["all_hold"]
    code, _, _ = run(capsys, "quaternion-check", "--levels", "6")
    assert code == 2


def test_config_file_and_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# test config\nruns = 40\nseed = 11\nL = 360\n", encoding="utf-8")
    monkeypatch.setenv("RAQM_SEED", "99")
    run(capsys, "bell", "--config", str(cfg), "--out", str(tmp_path / "a"))
    doc = json.loads((tmp_path / "a" / "bell_report.json").read_text(encoding="utf-8"))
    assert (doc["master_seed"], doc["runs_per_ensemble"], doc["L"]) == (11, 40, 360)
    run(capsys, "bell", "--config", str(cfg), "--seed", "12", "--out", str(tmp_path / "b"))
    doc = json.loads((tmp_path / "b" / "bell_report.json").read_text(encoding="utf-8"))
    assert doc["master_seed"] == 12


def test_env_seed_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RAQM_SEED", "77")
    run(capsys, "bell", "--runs", "10", "--out", str(tmp_path))
    doc = json.loads((tmp_path / "bell_report.json").read_text(encoding="utf-8"))
    assert doc["master_seed"] == 77


def test_bad_config_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("runs 40\n", encoding="utf-8")
    assert run(capsys, "bell", "--config", str(cfg))[0] == 2
    assert run(capsys, "bell", "--config", str(tmp_path / "missing.conf"))[0] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "raqm", "triangle", "3/5", "5/13", "1/6"],
        capture_output=True, text=True, cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["cos_AC"] == "3/5"


def test_schemas_are_valid():
    for name in ("bell_report", "bell_run", "census", "triangle", "collapse", "mi_report", "quaternion_check"):
        jsonschema.Draft202012Validator.check_schema(load_schema(name))
