import json

import pytest

from halfline_nls.cli import main, worker_count
from halfline_nls.config import ConfigError
from halfline_nls.io import csv_body, read_csv, read_snapshot

QUICK = """\
[problem]
s = 2.0
p = 2.0
r = 2.0
k = 0.0
lambda = {lam}
T = {T}
u0 = {{ family = "{family}", amplitude = 1.0 }}

[numerics]
L = 20.0
n = 256
dt = 2e-3
seed = 5

[sweep]
amplitude = [1.0]

[estimates]
s = 1.0
T_list = [1.0]
n_pairs = 5
refine = false
"""


def _config(tmp_path, lam=0.0, T=0.02, family="gaussian"):
    path = tmp_path / "run.toml"
    path.write_text(QUICK.format(lam=lam, T=T, family=family))
    return str(path)


def test_solve_bundled_linear(tmp_path, capsys):
    out = tmp_path / "solve"
    assert main(["solve", "linear", "--T", "0.02", "--out-dir", str(out)]) == 0
    cols, rows = read_csv(out / "diagnostics.csv")
    assert cols == ["t", "hs_norm", "mass", "boundary_residual"]
    assert float(rows[-1][0]) == pytest.approx(0.02)
    values, meta = read_snapshot(out / "field.hlns")
    assert values.shape == (len(rows), 256)
    assert meta["dt"] == pytest.approx(1e-3)
    assert "status=completed" in capsys.readouterr().out


def test_rerun_reproduces_csv_bodies(tmp_path):
    cfg = _config(tmp_path)
    for name in ("a", "b"):
        assert main(["solve", cfg, "--out-dir", str(tmp_path / name)]) == 0
    assert csv_body(tmp_path / "a" / "diagnostics.csv") == csv_body(tmp_path / "b" / "diagnostics.csv")
    assert (tmp_path / "a" / "field.hlns").read_bytes() == (tmp_path / "b" / "field.hlns").read_bytes()


def test_flags_override_config(tmp_path):
    out = tmp_path / "o"
    assert main(["solve", _config(tmp_path), "--n", "384", "--dt", "4e-3", "--out-dir", str(out)]) == 0
    text = (out / "diagnostics.csv").read_text()
    assert "# n = 384" in text
    assert "# dt = 0.004" in text
    assert read_snapshot(out / "field.hlns")[0].shape[1] == 384


def test_missing_key_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text(QUICK.format(lam=0.0, T=0.02, family="gaussian").replace("s = 2.0\n", "", 1))
    assert main(["solve", str(path), "--out-dir", str(tmp_path / "x")]) == 2
    err = capsys.readouterr().err
    assert "problem.s" in err
    assert "bad.toml:1" in err


def test_bad_override_exits_2(tmp_path):
    assert main(["solve", _config(tmp_path), "--s", "1.5", "--out-dir", str(tmp_path / "x")]) == 2


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["integrate", "linear"])
    assert exc.value.code == 2


def test_numerical_failure_exits_3_with_dump(tmp_path, capsys):
    # exp(-x) violates the homogeneous Neumann law at the corner
    out = tmp_path / "fail"
    assert main(["solve", _config(tmp_path, family="exponential"), "--out-dir", str(out)]) == 3
    dump = json.loads((out / "failure.json").read_text())
    assert dump["error"] == "CompatibilityError"
    assert dump["problem"]["lambda"] == 0.0
    assert "CompatibilityError" in capsys.readouterr().err


def test_blowup_scan_rows(tmp_path, monkeypatch):
    monkeypatch.setenv("HALFLINE_NLS_THREADS", "1")
    out = tmp_path / "scan"
    cfg = _config(tmp_path, lam=1.0, T=0.01, family="robin-wave")
    assert main(["blowup-scan", cfg, "--out-dir", str(out)]) == 0
    cols, rows = read_csv(out / "blowup_scan.csv")
    assert cols[:4] == ["r", "lambda", "amplitude", "status"]
    assert len(rows) == 1
    assert rows[0][3] == "completed"
    assert float(rows[0][4]) == pytest.approx(0.01)


def test_verify_subcommands_write_reports(tmp_path):
    for command in ("verify-linear", "verify-estimates"):
        out = tmp_path / command
        assert main([command, _config(tmp_path), "--out-dir", str(out)]) == 0
        cols, rows = read_csv(out / "summary.csv")
        assert cols[0] == "name" and cols[-1] == "stable"
        assert len(rows) >= 2
        assert read_csv(out / "ratios.csv")[0] == ["check", "member", "T", "ratio"]


def test_compare_oracle_bundled_nonlinear(tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare-oracle", "nonlinear", "--out-dir", str(out)]) == 0
    text = (out / "compare_oracle.csv").read_text()
    sup = float(next(line for line in text.splitlines() if line.startswith("# sup_l2_difference")).split("=")[1])
    assert sup < 1e-3


def test_worker_count(monkeypatch):
    monkeypatch.setenv("HALFLINE_NLS_THREADS", "3")
    assert worker_count(10) == 3
    assert worker_count(2) == 2
    monkeypatch.setenv("HALFLINE_NLS_THREADS", "zero")
    with pytest.raises(ConfigError):
        worker_count(4)
    monkeypatch.setenv("HALFLINE_NLS_THREADS", "0")
    with pytest.raises(ConfigError):
        worker_count(4)
    monkeypatch.delenv("HALFLINE_NLS_THREADS")
    assert worker_count(1) == 1
