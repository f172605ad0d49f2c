import os
import subprocess

import pytest

CLI = os.environ.get("SHAPEFLOW_CLI", "shapeflow")


def run(*args, cwd=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


@pytest.fixture
def square(tmp_path):
    p = tmp_path / "square.txt"
    p.write_text("0 0 AB\n1 0 BC\n1 1 CD\n0 1 DA\n")
    return p


def test_report(square):
    r = run("report", square)
    assert r.returncode == 0, r.stderr
    assert r.stdout.startswith("# shapeflow ")
    cols, data = rows(r.stdout)
    assert abs(float(data[0][cols.index("T")]) - 0.035144) < 1e-4


def test_sides(square):
    r = run("sides", square)
    assert r.returncode == 0, r.stderr
    cols, data = rows(r.stdout)
    vals = [float(d[2]) for d in data]
    assert [d[0] for d in data] == ["AB", "BC", "CD", "DA"]
    assert max(vals) - min(vals) < 1e-6 * max(vals)


def test_scan_columns_and_svg(tmp_path):
    out, svg = tmp_path / "scan.csv", tmp_path / "scan.svg"
    r = run("scan", "thm1_1", "--t-steps", 2, "--no-fd", "--out", out, "--svg", svg)
    assert r.returncode == 0, r.stderr
    cols, data = rows(out.read_text())
    assert cols == "t,area,T,lambda1,T_norm,lambda1_norm,dTnorm_dt,dTnorm_dt_fd,dLnorm_dt,proof_form,flag".split(",")
    assert all(float(d[cols.index("dTnorm_dt")]) > 0 for d in data)
    assert svg.read_text().startswith("<svg")


def test_hypothesis_violation_exit_code():
    r = run("scan", "thm1_1", "--vertices", 0, 0, 1, 0, 0.5, 0.8660254037844386)
    assert r.returncode == 2
    assert "HypothesisViolated" in r.stderr


def test_io_and_config_errors(tmp_path):
    assert run("report", tmp_path / "missing.txt").returncode == 3
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    assert run("--config", bad, "css").returncode == 3


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# css settings\ns = 0.7\nt-steps = 2\n")
    r = run("--config", cfg, "css", "--t-steps", 3)
    assert r.returncode == 0, r.stderr
    cols, data = rows(r.stdout)
    assert len(data) == 3
    assert all(d[0] == "0.7" for d in data)


def test_flow_csv_is_reproducible(tmp_path):
    args = ("flow", "imcf", "--body", "circle", "--a", 1, "--grid-n", 64, "--t-max", 0.02, "--no-fem")
    a, b = run(*args), run(*args)
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout
    cols, data = rows(a.stdout)
    assert cols == "t,area,perimeter,T,deficit,lemma51,isoper,rho_min".split(",")


def test_bad_body_grid():
    r = run("flow", "csf", "--grid-n", 100, "--no-fem")
    assert r.returncode == 2
