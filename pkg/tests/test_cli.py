import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from safe_horizon.cli import main
from safe_horizon.ellipse import min_ellipse_params
from safe_horizon.sim.model import fmt

CONFIG = str(Path(__file__).resolve().parents[1] / "configs" / "outage_6robots.ini")


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_ellipse_command(tmp_path):
    assert main(["ellipse", "--t", "10", "1", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "ellipse_params.csv")
    assert rows[0] == {"t": "10", "A": "0.01", "B": "0.01"}
    A, B = min_ellipse_params(1.0)
    assert rows[1] == {"t": "1", "A": fmt(A), "B": fmt(B)}
    ring = read_rows(tmp_path / "ellipse_t1.csv")
    assert len(ring) == 257 and ring[0] == ring[-1]


@pytest.mark.parametrize("bad", ["0", "-1", "abc"])
def test_ellipse_rejects_bad_time(tmp_path, bad, capsys):
    assert main(["ellipse", "--t", bad, "--out", str(tmp_path)]) == 2
    assert "--t" in capsys.readouterr().err


def test_hull_and_jaccard(tmp_path, capsys):
    assert main(["hull", "--t", "2", "--out", str(tmp_path)]) == 0
    ring = read_rows(tmp_path / "hull_t2.csv")
    assert ring[0] == ring[-1]
    assert (tmp_path / "kset_t2.csv").exists()
    assert main(["jaccard", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "jaccard.csv")
    assert float(rows[-1]["t"]) == 25 and float(rows[-1]["dj_hull_ellipse"]) < 0.02
    assert "t=25 " in capsys.readouterr().out


def test_safetime(tmp_path):
    assert main(["safetime", "--config", CONFIG, "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "safetime.csv")
    assert len(rows) == 6
    assert all(0 <= float(r["horizon"]) <= 3 for r in rows)


def test_simulate_reproduction(tmp_path):
    out, base = tmp_path / "h", tmp_path / "b"
    assert main(["simulate", "--config", CONFIG, "--out", str(out)]) == 0
    assert main(["simulate", "--config", CONFIG, "--baseline", "--out", str(base)]) == 0
    s = json.loads((out / "summary.json").read_text())
    b = json.loads((base / "summary.json").read_text())
    assert s["collisions"] == 0 and b["collisions"] == 0
    assert all(o["distance"] > 0 for o in s["outages"])
    assert all(o["distance"] == 0 for o in b["outages"])
    assert not b["use_horizons"]


def test_simulate_is_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", "--config", CONFIG, "--seed", "5", "--out", str(tmp_path / d)]) == 0
    for name in ("simulation_log.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_simulate_errors(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "missing.ini"), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nduration = x\n[robot.0]\npose = 0, 0, 0\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "scenario.duration" in capsys.readouterr().err


def test_simulate_reports_collision(tmp_path):
    # two robots started on top of each other count as a collision
    cfg = tmp_path / "clash.ini"
    cfg.write_text("[scenario]\nduration = 0.2\n[robot.0]\npose = 0, 0, 0\n[robot.1]\npose = 0, 0, 1\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SAFE_HORIZON_OUT", str(tmp_path / "env"))
    assert main(["ellipse", "--t", "2"]) == 0
    assert (tmp_path / "env" / "ellipse_params.csv").exists()
    assert main(["ellipse", "--t", "2", "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "ellipse_params.csv").exists()


def test_verify_suites(capsys):
    assert main(["verify", "ellipse"]) == 0
    assert main(["verify", "jaccard"]) == 0
    out = capsys.readouterr().out
    assert "PASS jaccard.hull-ellipse at t=25" in out
    assert "FAIL" not in out


def test_verify_theorem3_is_deterministic(capsys):
    assert main(["verify", "theorem3", "--runs", "5", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert main(["verify", "theorem3", "--runs", "5", "--seed", "7"]) == 0
    assert capsys.readouterr().out == first


def test_unknown_suite_and_module_entry_point():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2
    proc = subprocess.run([sys.executable, "-m", "safe_horizon", "ellipse", "--t", "0"], capture_output=True)
    assert proc.returncode == 2
