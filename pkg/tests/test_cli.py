import io
import json
import os
import subprocess
import sys

import pytest

from algebroidkit.cli import main, run_command
from conftest import FIXTURES


def run(*argv):
    return run_command(argv)


def fx(name):
    return os.path.join(FIXTURES, name)


# -- exit-code contract --------------------------------------------------------------

@pytest.mark.parametrize("name", ["tr2.lad", "so3.lad", "stokes_tx.lad", "chart2.lad", "heis.lad"])
def test_check_good_fixtures(name):
    code, out, _ = run("check", fx(name))
    assert code == 0
    assert "violation" not in out


def test_check_reports_jacobi_triple():
    code, out, _ = run("check", fx("broken_jacobi.lad"))
    assert code == 1
    assert "jacobi violation at (e1, e2, e3): residual -e3" in out


@pytest.mark.parametrize("name, where", [
    ("duplicate_name.lad", ":2:6: error: name already bound"),
    ("syntax_error.lad", ":1:28: error: unexpected"),
    ("antisymmetry.lad", ":1:29: error: antisymmetry violation"),
])
def test_parse_errors_exit_2(name, where):
    code, out, err = run("check", fx(name))
    assert code == 2
    assert out == ""
    assert err.startswith(fx(name) + where)


def test_expected_set_in_diagnostic():
    _, _, err = run("check", fx("syntax_error.lad"))
    assert "(expected one of: ',', ';')" in err


@pytest.mark.parametrize("argv", [
    ("betti", "so3.lad", "nope"),
    ("betti", "tr2.lad", "TR2"),
    ("d", "so3.lad", "cycle"),
    ("check", "missing.lad"),
    ("integrate", "so3.lad", "--k", "1", "top"),
])
def test_usage_errors_exit_3(argv):
    argv = [fx(a) if a.endswith(".lad") else a for a in argv]
    code, _, err = run(*argv)
    assert code == 3
    assert err


def test_argparse_errors_exit_3():
    assert run()[0] == 3
    assert run("betti")[0] == 3
    assert run("fuzz", "--suite", "nope", "--seed", "1", "--trials", "1")[0] == 3


# -- commands ------------------------------------------------------------------------

def test_betti():
    code, out, _ = run("betti", fx("so3.lad"), "so3")
    assert code == 0 and out.strip() == "1 0 0 1"


def test_stokes_text():
    code, out, _ = run("stokes", fx("stokes_tx.lad"), "--k", "1", "omega")
    assert code == 0
    lines = out.splitlines()
    assert "integral_of_d: {(dx) = -1/2}" in lines
    assert "d_of_integral: {(dx) = 1/2}" in lines
    assert "face_sum: 0" in lines
    assert lines[-1] == "residual: 0"


def test_stokes_rlinear():
    code, out, _ = run("stokes", fx("stokes_tx.lad"), "--k", "1", "nu", "--sections", "x*dx")
    assert code == 0 and out.splitlines()[-1] == "residual: 0"
    code, out, _ = run("stokes", fx("stokes_tx.lad"), "--k", "1", "nu")
    assert code == 0 and "on (dx): residual 0" in out


def test_integrate_d_wedge_pullback():
    assert run("integrate", fx("stokes_tx.lad"), "--k", "1", "omega")[1].strip() == "{() = 1/2*x}"
    assert run("d", fx("so3.lad"), "eps1")[1].strip() == "{(e2,e3) = -1}"
    assert run("wedge", fx("tr2.lad"), "alpha", "alpha")[1].strip() == "0"
    code, out, _ = run("pullback", fx("tr2.lad"), "parabola", "alpha")
    assert code == 0
    # x2^2 ds + (x1 x2 - 1/2)(2 s ds) along s |-> (s, s^2)
    assert out.splitlines() == ["{(ds) = 3*s^4 - s}", "commutes with d: yes"]


def test_homotopy_check():
    code, out, _ = run("homotopy-check", fx("heis.lad"), "gauge", "theta")
    assert code == 0
    assert "theta: h = 0; residual 0" in out
    code, out, _ = run("homotopy-check", fx("heis.lad"), "gauge")
    assert code == 0
    assert "eps(e1,e2): h = {(e2) = 1}; residual 0" in out


def test_homotopy_check_rejects_non_homotopy(tmp_path):
    src = tmp_path / "bad.lad"
    src.write_text("algebroid R { base x; frame dx; anchor dx = dx; }\n"
                   "homotopy h : prolong(1, R) -> R { dt1 -> 0; dx -> t1*dx; }\n")
    code, out, err = run("homotopy-check", str(src), "h")
    assert code == 1
    assert "anchor violation at (dx, x): residual t1 - 1" in out
    assert run("check", str(src))[0] == 1


# -- JSON ------------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ("check", "so3.lad"), ("check", "broken_jacobi.lad"),
    ("betti", "so3.lad", "so3"), ("stokes", "stokes_tx.lad", "--k", "1", "omega"),
    ("homotopy-check", "heis.lad", "gauge", "theta"), ("d", "so3.lad", "eps1"),
    ("fuzz", "--suite", "d2", "--seed", "1", "--trials", "3"),
])
def test_json_schema(argv):
    argv = [fx(a) if a.endswith(".lad") else a for a in argv]
    for args in (("--json",) + tuple(argv), tuple(argv) + ("--json",)):
        code, out, _ = run(*args)
        doc = json.loads(out)
        assert doc["schema"] == 1
        assert doc["command"] == argv[0]
        if "ok" in doc:
            assert doc["ok"] == (code == 0)


def test_json_check_violation():
    code, out, _ = run("--json", "check", fx("broken_jacobi.lad"))
    doc = json.loads(out)
    v = doc["entities"][0]["violations"][0]
    assert code == 1 and v == {"kind": "jacobi", "indices": ["e1", "e2", "e3"], "residual": "-e3"}


def test_json_parse_error():
    code, out, err = run("--json", "check", fx("syntax_error.lad"))
    assert code == 2
    doc = json.loads(out)
    assert doc["schema"] == 1 and doc["error"]["line"] == 1 and doc["error"]["column"] == 28
    assert doc["error"]["expected"] == ["','", "';'"]
    assert err.startswith(fx("syntax_error.lad") + ":1:28")


# -- fuzz --------------------------------------------------------------------------------

def test_fuzz_byte_identical_across_runs_and_threads():
    base = ("fuzz", "--suite", "d2", "--seed", "7", "--trials", "100")
    a = run(*base)
    b = run(*base)
    c = run(*base, "--threads", "4")
    assert a[0] == 0
    assert a[1] == b[1] == c[1]
    assert a[1].splitlines()[-1] == "summary: 100 passed, 0 failed"


def test_main_writes_to_given_streams():
    out, err = io.StringIO(), io.StringIO()
    assert main(["betti", fx("so3.lad"), "so3"], stdout=out, stderr=err) == 0
    assert out.getvalue() == "1 0 0 1\n" and err.getvalue() == ""


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "algebroidkit", "betti", fx("so3.lad"), "so3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "1 0 0 1"
