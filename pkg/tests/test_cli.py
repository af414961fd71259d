"""Command-line contract: exit codes, report schema and golden JSON.

Golden reports live in tests/golden/. Regenerate them with
``RACAHKIT_REGEN_GOLDEN=1 pytest tests/test_cli.py`` after an intended change.
"""
import csv
import io
import json
import os
from pathlib import Path

import pytest

from racahkit import cli

GOLDEN = Path(__file__).parent / "golden"
REP = ["verify-rep", "--dim", "4", "--rho", "-0.875", "--d", "15.828125",
       "--e1", "1.35687255859375", "--e2", "-2.54937744140625", "--q", "34.1339054107666"]

CASES = {
    "verify_rep": REP,
    "overlap": ["overlap", "--alpha", "0.5", "--beta", "1.25", "--gamma", "-4", "--delta", "-6.75",
                "--N", "3"],
    "couple": ["couple", "--nu1", "0.7", "--nu2", "1.3", "--nu3", "0.9", "--quanta", "3"],
    "couple_half": ["couple", "--nu1", "0.5", "--nu2", "0.5", "--nu3", "0.5", "--quanta", "1"],
    "oscillator": ["oscillator", "--k1", "0.5", "--k2", "1.5", "--level", "5"],
    "oscillator_equal": ["oscillator", "--k1", "0.75", "--k2", "0.75", "--level", "4"],
}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def report(argv):
    code, out, _ = run(argv + ["--json"])
    return code, json.loads(out)


def stable(data):
    data = dict(data)
    data.pop("wall_time_ms")
    return data


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, data = report(CASES[name])
    assert code == cli.EXIT_OK
    path = GOLDEN / f"{name}.json"
    if os.environ.get("RACAHKIT_REGEN_GOLDEN"):
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(json.dumps(stable(data), sort_keys=True, indent=2) + "\n")
    want = json.loads(path.read_text())
    got = stable(data)
    assert got.keys() == want.keys()
    assert got["command"] == want["command"]
    assert got["parameters"] == want["parameters"]
    assert got["adopted_conventions"] == want["adopted_conventions"]
    assert [(c["name"], c["tolerance"], c["pass"]) for c in got["checks"]] == \
           [(c["name"], c["tolerance"], c["pass"]) for c in want["checks"]]
    for g, w in zip(got["checks"], want["checks"]):
        # residuals are rounding-level numbers; allow BLAS-order differences
        assert g["residual"] == pytest.approx(w["residual"], rel=1e-2, abs=1e-14)


@pytest.mark.parametrize("name", sorted(CASES))
def test_json_deterministic(name):
    a = run(CASES[name] + ["--json"])[1]
    b = run(CASES[name] + ["--json"])[1]
    assert stable(json.loads(a)) == stable(json.loads(b))
    strip = [line for line in a.splitlines() if "wall_time_ms" not in line]
    assert strip == [line for line in b.splitlines() if "wall_time_ms" not in line]


def test_schema():
    _, data = report(CASES["couple"])
    assert set(data) == {"command", "parameters", "checks", "adopted_conventions", "wall_time_ms"}
    assert isinstance(data["wall_time_ms"], int)
    for c in data["checks"]:
        assert set(c) == {"name", "residual", "tolerance", "pass"}
        assert c["pass"] == (c["residual"] <= c["tolerance"])
    assert data["adopted_conventions"]


def test_json_sorted_and_indented():
    out = run(CASES["oscillator"] + ["--json"])[1]
    data = json.loads(out)
    assert out == json.dumps(data, sort_keys=True, indent=2) + "\n"


def test_json_file_and_table(tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(CASES["oscillator"] + ["--json", str(path)])
    assert code == 0
    assert "PASS" in out and "FAIL" not in out
    assert json.loads(path.read_text())["command"] == "oscillator"


def test_failing_check_exit_code():
    code, data = report(CASES["oscillator"] + ["--tol", "0"])
    assert code == cli.EXIT_CHECK_FAILED
    assert not all(c["pass"] for c in data["checks"])


def test_lambda_zero_is_domain_error():
    argv = list(REP)
    argv[argv.index("--rho") + 1] = "1.0"
    code, _, err = run(argv)
    assert code == cli.EXIT_DOMAIN
    assert "V_n denominator" in err


def test_bad_truncation_is_domain_error():
    code, _, err = run(["overlap", "--alpha", "0.5", "--beta", "1.25", "--gamma", "-3.5",
                        "--delta", "-6.75", "--N", "3"])
    assert code == cli.EXIT_DOMAIN
    assert "truncation" in err


def test_block_out_of_range():
    code, _, err = run(CASES["couple"] + ["--block", "4"])
    assert code == cli.EXIT_DOMAIN
    assert "0 <= j <= N" in err


def test_oscillator_rejects_k_minus_one():
    code, _, err = run(["oscillator", "--k1", "-1", "--k2", "0.5", "--level", "2"])
    assert code == cli.EXIT_DOMAIN and "k > -1" in err


def test_alpha2_tagged_for_equal_k():
    _, data = report(CASES["oscillator_equal"])
    names = [c["name"] for c in data["checks"]]
    assert any("alpha2" in n and "zero" in n for n in names)
    _, other = report(CASES["oscillator"])
    assert not any("alpha2" in c["name"] for c in other["checks"])


def test_half_weight_spectrum_in_report():
    _, data = report(CASES["couple_half"])
    checks = {c["name"]: c for c in data["checks"]}
    assert {"c4_eigenvalue_j0", "c4_multiplicity_j0", "c4_eigenvalue_j1"} <= set(checks)
    assert data["adopted_conventions"]["overlap_j0"].startswith("skipped")


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["overlap", "--alpha", "x", "--beta", "1", "--gamma", "-4", "--delta", "-6", "--N", "3"],
    ["oscillator", "--k1", "0.5"],
])
def test_usage_errors(argv):
    assert run(argv)[0] == cli.EXIT_USAGE


def test_overlap_csv(tmp_path):
    path = tmp_path / "t.csv"
    code, _, _ = run(CASES["overlap"] + ["--csv", str(path)])
    assert code == 0
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:2] == ["n", "x"] and rows[0][-1] == "abs_diff"
    assert len(rows) - 1 == 16
    assert path.read_bytes().count(b"\r\n") == 17


def test_console_entry_point():
    from importlib.metadata import entry_points
    eps = entry_points(group="console_scripts")
    assert any(ep.name == "racahkit" and ep.value == "racahkit.cli:run" for ep in eps)
