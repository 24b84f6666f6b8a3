from __future__ import annotations

import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from twistgeom.cli.config import RunConfig, build_config, read_config_file
from twistgeom.cli.main import main
from twistgeom.cli.report import Check, Report, check, jsonable
from twistgeom.errors import ConfigError


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TWISTGEOM_REPORT", raising=False)
    return tmp_path


def _report(path):
    return json.loads(path.read_text())


# ----------------------------------------------------------------- config

def test_defaults():
    c = build_config(None, {})
    assert (c.m, c.N, c.derivative, c.seed) == (2, 16, "spectral", 0)
    assert (c.tol_algebraic, c.tol_derivative, c.tol_relative) == (1e-12, 1e-10, 1e-8)


def test_precedence_file_env_flag(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nN = 8\nseed=3  # trailing\nreport = file.json\ntolerance = 1e-6\n")
    monkeypatch.setenv("TWISTGEOM_REPORT", "env.json")
    c = build_config(str(cfg), {"seed": 5, "tol_algebraic": 1e-9})
    assert c.N == 8 and c.seed == 5 and c.report == "env.json"
    assert c.tol_algebraic == 1e-9 and c.tol_derivative == 1e-6
    assert build_config(str(cfg), {"report": "flag.json"}).report == "flag.json"


@pytest.mark.parametrize("text", ["bogus = 1\n", "N = eight\n", "just words\n", "include_m3 = maybe\n"])
def test_bad_config_files(tmp_path, text):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ConfigError):
        read_config_file(p)


@pytest.mark.parametrize("override", [{"m": 4}, {"N": 2}, {"L": -1.0}, {"tol_relative": -1e-3},
                                      {"tol_algebraic": math.nan}, {"suites": ("clifford", "nope")}])
def test_invalid_values(override):
    with pytest.raises(ConfigError):
        build_config(None, override)


def test_zero_tolerance_is_allowed():
    assert build_config(None, {"tolerance": 0.0}).tol_relative == 0.0


def test_echo_omits_paths():
    e = RunConfig().echo()
    assert "report" not in e and "out_dir" not in e and e["suites"][0] == "clifford"


# ----------------------------------------------------------------- report

def test_check_semantics():
    assert check("a", "x", 1e-13, 1e-12).passed
    assert not check("a", "x", math.nan, 1.0).passed
    assert not check("a", "x", 2.0, 1.0).passed
    assert check("a", "x", -3.0, 5.0).max_abs_error == 3.0


def test_jsonable_complex_and_rounding():
    out = jsonable({"z": 1 + 2j, "x": np.float64(0.1) + np.float64(0.2), "v": np.arange(2)})
    assert out["z"] == {"re": 1.0, "im": 2.0}
    assert out["x"] == 0.3 and out["v"] == [0, 1]


def test_report_serialisation_is_stable():
    r = Report("verify", {"seed": 0}, [check("n", "anchor", 0.5, 1.0)], {"s": -1})
    d = json.loads(r.dumps())
    assert d["summary"] == {"total": 1, "failed": 0, "pass": True}
    assert d["schema_version"] == 1 and d["tool"] == "twistgeom"
    assert r.dumps() == r.dumps()


# ------------------------------------------------------------------- runs

def test_verify_subset_passes_and_is_deterministic(workdir):
    args = ["verify", "--suites", "clifford,geometry", "--N", "8"]
    assert main(args + ["--report", "a.json"]) == 0
    assert main(args + ["--report", "b.json"]) == 0
    a, b = (workdir / "a.json").read_bytes(), (workdir / "b.json").read_bytes()
    assert a == b
    d = json.loads(a)
    assert d["summary"]["pass"] and d["summary"]["total"] == len(d["checks"])
    for c in d["checks"]:
        assert set(c) == {"name", "paper_anchor", "max_abs_error", "tolerance", "pass", "notes"}
        assert c["paper_anchor"]
    assert d["pinned_signs"]["grading_product_sign"] == -1
    assert d["pinned_signs"]["hodge_kappa"]["m2"]["kappa"] == {"re": 0.0, "im": -1.0}


def test_verify_zero_tolerance_fails(workdir, capsys):
    assert main(["verify", "--suites", "geometry", "--N", "8", "--tolerance", "0"]) == 1
    assert "FAIL" in capsys.readouterr().out
    d = _report(workdir / "twistgeom_report.json")
    assert not d["summary"]["pass"] and d["summary"]["failed"] > 0


def test_env_report_path(workdir, monkeypatch):
    monkeypatch.setenv("TWISTGEOM_REPORT", str(workdir / "env.json"))
    assert main(["verify", "--suites", "clifford"]) == 0
    assert (workdir / "env.json").exists()


def test_include_m3_adds_checks(workdir):
    main(["verify", "--suites", "clifford", "--report", "two.json"])
    main(["verify", "--suites", "clifford", "--include-m3", "--report", "three.json"])
    n2 = len(_report(workdir / "two.json")["checks"])
    n3 = len(_report(workdir / "three.json")["checks"])
    assert n3 > n2


def test_torsion_coexact_csv(workdir):
    assert main(["torsion", "--f", "sin(x1)", "--N", "8"]) == 0
    rows = list(csv.DictReader(open(workdir / "torsion.csv")))
    assert len(rows) == 8 ** 4
    x1 = np.array([float(r["x1"]) for r in rows])
    k023 = np.array([float(r["K_023_re"]) for r in rows])
    assert np.max(np.abs(k023 - np.cos(x1) / 6)) <= 1e-12
    assert max(abs(float(r["K_012_re"])) for r in rows) <= 1e-12


def test_torsion_from_h(workdir):
    assert main(["torsion", "--h", "exp(0.1*sin(x0))", "--N", "16"]) == 0
    d = _report(workdir / "twistgeom_report.json")
    assert d["summary"]["pass"]


def test_torsion_constant_h_is_trivial(workdir):
    assert main(["torsion", "--h", "2", "--N", "8"]) == 0
    rows = list(csv.DictReader(open(workdir / "torsion.csv")))
    assert all(float(v) == 0.0 for r in rows[:50] for k, v in r.items() if k.startswith(("omega", "K_")))


@pytest.mark.parametrize("argv", [
    ["torsion", "--h", "sin(x0)", "--N", "8"],
    ["torsion", "--f", "sin(x0", "--N", "8"],
    ["torsion", "--f", "1/(2-2)", "--N", "8"],
    ["torsion", "--f", "foo(x0)"],
    ["fermionic", "--R", "0,1"],
    ["fermionic", "--R", "0", "--f", "1,2"],
    ["spectral", "--f", "0,0,0,0", "--lambda", "8", "--cutoff", "2"],
    ["spectral", "--f", "0,0,0,0", "--lambda", "4,5,6"],
    ["verify", "--suites", "nope"],
    ["verify", "--N", "2"],
    ["verify", "--tolerance", "-1"],
    ["verify", "--config", "/nonexistent.cfg"],
])
def test_usage_errors_exit_2(argv, workdir, capsys):
    assert main(argv) == 2
    assert "twistgeom" in capsys.readouterr().err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["torsion"])
    assert exc.value.code == 2


def test_fit_conditioning_message(workdir, capsys):
    main(["spectral", "--lambda", "8", "--cutoff", "2"])
    assert "fit-conditioning error" in capsys.readouterr().err


@pytest.mark.parametrize("R,sig", [("0", "lorentzian"), ("1", "euclidean")])
def test_fermionic_single_gamma(R, sig, workdir):
    assert main(["fermionic", "--R", R, "--f", "1,0.5,sin(x2),0", "--N", "8"]) == 0
    d = _report(workdir / "twistgeom_report.json")
    assert d["results"]["signature"] == sig
    assert d["results"]["symmetry_ratio"]["re"] == -1.0
    assert (workdir / "fermionic.csv").exists()


def test_fermionic_three_gammas(workdir):
    assert main(["fermionic", "--R", "0,1,2", "--N", "8"]) == 0
    d = _report(workdir / "twistgeom_report.json")
    assert all(c["pass"] for c in d["checks"])


def test_spectral_flat(workdir):
    assert main(["spectral", "--f", "1,0,0,0", "--lambda", "2,2.4,2.8,3.2,3.6,4", "--cutoff", "12"]) == 0
    d = _report(workdir / "twistgeom_report.json")
    assert abs(d["results"]["heat"]["a0"] - 4 * math.pi ** 2) < 1e-9
    rows = list(csv.reader(open(workdir / "spectral.csv")))
    assert rows[0] == ["lambda", "trace"] and len(rows) == 7


def test_out_dir(tmp_path, workdir):
    out = tmp_path / "out"
    out.mkdir()
    assert main(["torsion", "--f", "cos(x0)", "--N", "8", "--out-dir", str(out)]) == 0
    assert (out / "torsion.csv").exists()


def test_console_entry_point(workdir):
    r = subprocess.run([sys.executable, "-m", "twistgeom.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("twistgeom ")
