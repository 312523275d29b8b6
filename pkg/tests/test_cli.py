import hashlib
import json

import pytest

from cantornormal.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_digits_csv_example(capsys):
    code, out, _ = run_cli(capsys, "digits", "--seq", "constant:2", "--count", "6",
                           "--format", "csv")
    assert code == 0
    assert out == "1,0\n2,1\n3,0\n4,1\n5,0\n6,1\n"


def test_digits_raw_and_json(capsys):
    code, out, _ = run_cli(capsys, "digits", "--seq", "periodic:2,3", "--count", "4",
                           "--format", "raw")
    assert code == 0
    assert out == "0\n0\n1\n1\n"
    code, out, _ = run_cli(capsys, "digits", "--seq", "constant:2", "--count", "3",
                           "--format", "json")
    assert json.loads(out)["digits"] == [0, 1, 0]


def test_digits_oracle_check(capsys):
    code, out, _ = run_cli(capsys, "digits", "--seq", "preset:iterated-log",
                           "--count", "500", "--format", "raw", "--oracle-check", "13")
    assert code == 0
    assert len(out.splitlines()) == 500


def test_stats_example(capsys):
    code, out, _ = run_cli(capsys, "stats", "--seq", "constant:2", "--source",
                           "construct", "--blocks", "all:1", "--checkpoints", "24")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "block,n,observed,expected_num,expected_den,ratio"
    assert lines[1] == "0,24,12,12,1,1.0"
    assert lines[2] == "1,24,12,12,1,1.0"


def test_stats_from_file(capsys, tmp_path):
    path = tmp_path / "digits.json"
    path.write_text(json.dumps({"digits": [0, 1, 0, 1, 0, 1]}))
    code, out, _ = run_cli(capsys, "stats", "--seq", "constant:2", "--source",
                           f"file:{path}", "--blocks", "0,1", "--checkpoints", "4")
    assert code == 0
    assert out.splitlines()[1].startswith("0-1,4,2,")


def test_value_proven_digits(capsys):
    code, out, _ = run_cli(capsys, "value", "--seq", "constant:2", "--target", "xq",
                           "--base", "10", "--digits", "3")
    assert code == 0
    assert out == "0.333 (base 10)\n"


def test_value_exact_prefix(capsys):
    code, out, _ = run_cli(capsys, "value", "--seq", "constant:2", "--target", "xq",
                           "--exact", "4")
    assert code == 0
    assert out == "5/16 +/- 1/16\n"


def test_discrepancy_report(capsys):
    code, out, _ = run_cli(capsys, "discrepancy", "--seq", "constant:2",
                           "--checkpoints", "100,1000", "--depth", "fixed:16")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,d_star,d_extreme,max_eps"
    assert len(lines) == 3
    # spec'd alias for the sqrt-depth default is accepted
    code, out2, _ = run_cli(capsys, "discrepancy", "--seq", "constant:2",
                            "--checkpoints", "100", "--depth", "paper")
    assert code == 0


def test_construct_targets(capsys):
    for target in ("xq", "nq-not-dnq", "rnq-not-nq", "rnq-dnq-not-nq"):
        code, out, _ = run_cli(capsys, "construct", "--seq", "preset:log",
                               "--target", target, "--count", "32", "--format", "raw")
        assert code == 0, target
        assert len(out.splitlines()) == 32


def test_diagnose_trend(capsys):
    code, out, _ = run_cli(capsys, "diagnose", "--seq", "constant:2", "--block", "0",
                           "--checkpoints", "100,1000", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["increasing_trend"] is True
    assert data["label"] == "heuristic"


def test_argument_error_exit_code(capsys):
    code, _, err = run_cli(capsys, "digits", "--seq", "bogus:2", "--count", "4")
    assert code == 2
    assert "error[argument]" in err


def test_scan_bound_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("CANTORNORMAL_SCAN_BOUND", "30")
    code, _, err = run_cli(capsys, "digits", "--seq", "constant:2", "--count", "30")
    assert code == 3
    assert "error[scan-bound]" in err


def test_manifest_determinism(capsys, tmp_path):
    m1, m2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ("stats", "--seq", "periodic:2,3", "--blocks", "all:1",
            "--checkpoints", "50,500")
    code, out1, _ = run_cli(capsys, *args, "--manifest", str(m1))
    assert code == 0
    code, out2, _ = run_cli(capsys, *args, "--manifest", str(m2))
    assert out1 == out2
    d1 = json.loads(m1.read_text())
    d2 = json.loads(m2.read_text())
    assert d1 == d2
    assert d1["output_sha256"] == hashlib.sha256(out1.encode()).hexdigest()
    assert d1["version"]


def test_construct_manifest_records_graph_and_clamps(capsys, tmp_path):
    m = tmp_path / "m.json"
    code, _, _ = run_cli(capsys, "construct", "--seq", "preset:log", "--target",
                         "rnq-dnq-not-nq", "--count", "16", "--manifest", str(m))
    assert code == 0
    data = json.loads(m.read_text())
    assert data["parameters"]["clamp_events"] == 0
    assert data["parameters"]["graph"]["op"] == "schedule-patch"
