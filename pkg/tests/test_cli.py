import json
import os
import subprocess
import sys

import pytest

from saddlenode import __version__
from saddlenode.cli import main
from saddlenode.fields import LoudParams
from saddlenode.period import period_scan, period_scan_csv
from saddlenode.dulac import slope_scan
from saddlenode.fields import build_loud_unfolding


def _body(path):
    lines = path.read_text().splitlines(keepends=True)
    assert lines[0] == f"# saddlenode {__version__}\n"
    assert lines[1].startswith("# config=")
    return json.loads(lines[1][len("# config="):]), "".join(lines[2:])


def test_period_scan_minimal(tmp_path):
    out = tmp_path / "p.csv"
    code = main(["period-scan", "--D", "-0.5", "--F", "0.05", "--u0-min", "0.2",
                 "--u0-max", "0.8", "--n", "4", "--workers", "1", "--out", str(out)])
    assert code == 0
    config, body = _body(out)
    assert config["u0_grid"] == pytest.approx([0.2, 0.4, 0.6, 0.8])
    assert config["integrator"]["rel_tol"] == 1e-10
    # same numbers as the in-process API
    a = LoudParams(-0.5, 0.05)
    assert body == period_scan_csv(a, period_scan(a, config["u0_grid"], workers=1))


def test_period_scan_rerun_identical(tmp_path):
    args = ["period-scan", "--D", "-0.3", "--F", "-0.1", "--n", "3", "--workers", "1"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_period_scan_partial_failure(tmp_path, monkeypatch):
    import saddlenode.period as period
    from saddlenode.errors import OrbitNotClosedError

    real = period.orbit_period

    def flaky(a, u0, config=None, derivative=True):
        if u0 > 0.5:
            raise OrbitNotClosedError("forced", status="BLOWUP")
        return real(a, u0, config, derivative)

    monkeypatch.setattr(period, "orbit_period", flaky)
    out = tmp_path / "x.csv"
    code = main(["period-scan", "--D", "-0.5", "--F", "0.05", "--n", "2", "--workers", "1",
                 "--out", str(out)])
    assert code == 2
    rows = out.read_text().splitlines()[3:]
    assert rows[0].endswith(",OK") and rows[1].endswith(",ORBIT_NOT_CLOSED")


@pytest.mark.parametrize("argv", [
    ["period-scan", "--D", "0.5", "--F", "0.0"],
    ["period-scan", "--D", "-0.5", "--F", "0.0", "--u0-min", "0.0"],
    ["period-scan", "--D", "-0.5"],
    ["dulac-scan", "--D-grid=-0.5", "--F-grid", "0", "--s-grid", "1.5"],
    ["verify", "--checks", "bogus"],
    ["critical-periods", "--window", "0.9"],
    ["critical-periods", "--D0", "-0.98"],
])
def test_config_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_dulac_scan_matches_api_and_fit(tmp_path):
    out, fit = tmp_path / "d.csv", tmp_path / "fit.json"
    code = main(["dulac-scan", "--D-grid=-0.5", "--F-grid=0,0.05",
                 "--s-grid", "0.1,0.05,0.025,0.0125", "--workers", "1",
                 "--out", str(out), "--fit", str(fit)])
    assert code == 0
    config, body = _body(out)
    assert config["s_grid"] == [0.1, 0.05, 0.025, 0.0125]
    params = [LoudParams(-0.5, 0.0), LoudParams(-0.5, 0.05)]
    assert body == slope_scan(build_loud_unfolding, params, config["s_grid"], workers=1).to_csv()
    doc = json.loads(fit.read_text())
    assert doc["artifact_version"] == __version__
    assert [f["F"] for f in doc["fits"]] == [0.0, 0.05]
    assert all(set(f) >= {"c0", "c1", "stable", "remainder_profile"} for f in doc["fits"])


def test_dulac_scan_partial_failure(tmp_path):
    code = main(["dulac-scan", "--D-grid=-0.5", "--F-grid=0", "--s-grid", "0.1,0.0001",
                 "--workers", "1", "--out", str(tmp_path / "d.csv")])
    assert code == 2
    assert "STEP_UNDERFLOW" in (tmp_path / "d.csv").read_text()


def test_verify_table(capsys):
    assert main(["verify", "--points", "1"]) == 0
    text = capsys.readouterr().out
    assert "pullback" in text and "PASS" in text and "FAIL" not in text


def test_verify_seed_reproducible(tmp_path):
    for name in ("a", "b"):
        assert main(["verify", "--points", "5", "--seed", "4",
                     "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_verify_threshold_failure(monkeypatch):
    import saddlenode.checks as checks
    monkeypatch.setattr(checks, "PULLBACK_TOL", 0.0)
    monkeypatch.setattr("saddlenode.cli.run_checks",
                        lambda names, points, seed: [checks.check_pullback(1, seed)])
    assert main(["verify", "--checks", "pullback", "--points", "1"]) == 3


def test_critical_periods_report(tmp_path):
    out = tmp_path / "c.json"
    code = main(["critical-periods", "--D0=-0.5", "--n-u", "8", "--workers", "1",
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) >= {"artifact_version", "config", "D0", "delta", "window", "violations",
                        "inconclusive", "cells"}
    assert doc["config"]["window"] == [0.95, 0.995]
    assert doc["violations"] == 0 and len(doc["cells"]) == 9
    assert all(c["critical_periods"] == [] for c in doc["cells"])


def test_critical_periods_empty_window(tmp_path):
    out = tmp_path / "c.json"
    assert main(["critical-periods", "--window", "0.97,0.97", "--workers", "1",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert all(c["critical_periods"] == [] for c in doc["cells"])


def test_console_entry_point_and_worker_determinism(tmp_path):
    # byte-identical output for 1 and 2 worker processes
    outs = []
    for workers in ("1", "2"):
        out = tmp_path / f"w{workers}.csv"
        env = dict(os.environ, SADDLENODE_WORKERS=workers)
        proc = subprocess.run([sys.executable, "-m", "saddlenode", "period-scan", "--D", "-0.5",
                               "--F", "0.05", "--n", "4", "--out", str(out)],
                              env=env, capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
