import subprocess
import sys

import pytest

from ncdomain import acceptance
from ncdomain.cli import run


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_weights_table(capsys, data_dir):
    code, out, _ = call(capsys, "weights", data_dir / "f.sym", "--max-len", 2)
    assert code == 0
    assert "12 2" in out.splitlines()
    assert "tol=" in out


def test_weights_oracle(capsys, data_dir):
    code, out, _ = call(capsys, "weights", data_dir / "g.sym", "--max-len", 3, "--oracle")
    assert code == 0
    assert "12 1.5 1.5" in out
    assert "residual 0.000e+00" in out


def test_iso_flagship(capsys, data_dir):
    code, out, _ = call(capsys, "iso", data_dir / "f.sym", data_dir / "g.sym", "--dmax", 2,
                        "--res", 10001)
    assert code == 2
    assert "verdict: Obstructed" in out
    assert "normalization f: c = (1, 1)" in out
    assert "sunada: sigma = (1, 2), s = (1, 1)" in out
    assert "zeros in [0,1]: 0, 1" in out
    assert "violated by 0.183503" in out
    assert "ASSUMPTION" in out and "tol=1e-09" in out


def test_iso_candidate_and_all(capsys, data_dir):
    code, out, _ = call(capsys, "iso", data_dir / "linear.sym", data_dir / "scaled_linear.sym", "--all")
    assert code == 0
    assert "verdict: CandidateFound" in out
    assert out.count("sunada: sigma") == 2


def test_disk(capsys, data_dir):
    code, out, _ = call(capsys, "disk", data_dir / "linear.sym")
    assert code == 0 and out.splitlines()[0] == "true"
    code, out, _ = call(capsys, "disk", data_dir / "scaled_linear.sym")
    assert "witness: c = (1.4142135623730951, 1.7320508075688772)" in out
    code, out, _ = call(capsys, "disk", data_dir / "f.sym")
    assert out.strip() == "false"


def test_member(capsys, data_dir):
    code, out, _ = call(capsys, "member", data_dir / "f.sym", "--tuple", data_dir / "point.tuple")
    assert code == 0 and out.strip() == "Interior margin=0.8664 tol=1e-09"
    code, out, _ = call(capsys, "member", data_dir / "f.sym", "--tuple", data_dir / "point.tuple",
                        "--tol", 0.9)
    assert out.startswith("Boundary")


def test_slice_csv(tmp_path, capsys, data_dir):
    target = tmp_path / "points.csv"
    code, _, _ = call(capsys, "slice", data_dir / "f.sym", "--axes", "1,2", "--res", 5, "--out", target)
    lines = target.read_text().splitlines()
    assert code == 0
    assert lines[1] == "x,y"
    assert lines[2] == "0.0,1.0" and lines[-1] == "1.0,0.0"


def test_shifts_file(tmp_path, capsys, data_dir):
    target = tmp_path / "w.txt"
    code, out, _ = call(capsys, "shifts", data_dir / "f.sym", "--max-len", 2, "--out", target)
    assert code == 0 and "dim 7" in out
    lines = target.read_text().splitlines()
    assert lines[0] == "7 2 2" and lines[1] == "W 1 3"
    assert "4 2 0.7071067811865476 0.0" in lines


def test_norm(capsys, data_dir):
    code, out, _ = call(capsys, "norm", data_dir / "f.sym", "--poly", data_dir / "x1x2.poly",
                        "--max-len", 3)
    assert code == 0
    assert "2 0.7071067811865476 0.7071067811865476" in out
    assert "ok" in out


def test_poisson(capsys, data_dir):
    code, out, _ = call(capsys, "poisson", data_dir / "linear.sym", "--tuple",
                        data_dir / "contraction.tuple", "--max-len", 12)
    assert code == 0
    rho = {line.split()[0]: float(line.split()[1]) for line in out.splitlines() if line.startswith("rho")}
    assert rho["rho1"] <= 1e-9 and rho["rho2"] <= 1e-9


@pytest.mark.parametrize("argv, expected", [
    (["weights", "{d}/f.sym"], 64),
    (["bogus"], 64),
    (["weights", "{d}/f.sym", "--max-len", "2", "--tol", "-1"], 64),
    (["slice", "{d}/f.sym", "--axes", "1,1"], 64),
    (["weights", "{d}/missing.sym", "--max-len", "2"], 66),
    (["member", "{d}/f.sym", "--tuple", "{d}/f.sym"], 65),
    (["poisson", "{d}/f.sym", "--tuple", "{t}/far.tuple"], 65),
    (["iso", "{d}/f.sym", "{t}/three.sym"], 65),
])
def test_exit_codes(argv, expected, capsys, data_dir, tmp_path):
    (tmp_path / "far.tuple").write_text("n=2 k=1\n0.9\n0.9\n")
    (tmp_path / "three.sym").write_text("n=3\n1 1\n2 1\n3 1\n")
    code, _, err = call(capsys, *(a.format(d=data_dir, t=tmp_path) for a in argv))
    assert code == expected
    assert err


def test_output_is_deterministic(capsys, data_dir):
    argv = ["iso", data_dir / "f.sym", data_dir / "g.sym", "--dmax", 3, "--res", 2001]
    first = call(capsys, *argv)
    assert call(capsys, *argv) == first


def test_console_script(data_dir):
    proc = subprocess.run([sys.executable, "-m", "ncdomain.cli", "iso", str(data_dir / "f.sym"),
                           str(data_dir / "g.sym"), "--dmax", "2", "--res", "10001"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "Obstructed" in proc.stdout


def test_selftest_reports_failure(monkeypatch, capsys):
    failing = acceptance.CriterionResult(99, "forced", False, "measured x")
    monkeypatch.setattr(acceptance, "CRITERIA", [lambda: failing])
    code, out, _ = call(capsys, "selftest")
    assert code == 1
    assert "[FAIL] 99. forced: measured x" in out
