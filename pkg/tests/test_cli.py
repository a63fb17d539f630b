import json
import math
import subprocess
import sys

import pytest

from twistlat.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def strip_timing(report):
    report = dict(report)
    report.pop("timing", None)
    for s in report.get("suites", []):
        s.pop("seconds", None)
    return report


def test_no_command_prints_usage(capsys):
    code, report, err = run(capsys)
    assert code == 2 and report is None and "usage" in err


def test_console_script_usage():
    proc = subprocess.run([sys.executable, "-m", "twistlat.cli"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_constants_pair(capsys):
    code, report, _ = run(capsys, "constants", "--input", "example-6.2", "--lambda", "Lambda0", "--mu", "alpha1")
    assert code == 0 and report["pass"]
    re, im = report["C"]
    assert abs(complex(re, im) - complex(math.cos(math.pi / 3), -math.sin(math.pi / 3))) < 1e-10
    assert report["lambda"] == [0, 0, 1] and report["mu"] == [1, 0, 0]
    assert abs(report["c"][0] + 1 / 6) < 1e-14


def test_constants_table(capsys):
    code, report, _ = run(capsys, "constants", "--input", "example-6.1")
    assert code == 0
    assert {r["name"] for r in report["records"]} == {"B_oracle", "C_from_B", "C_reference"}
    assert len(report["C_table"]) == 16


def test_tolerance_override_can_fail(capsys):
    code, report, _ = run(capsys, "constants", "--input", "example-6.2", "--lambda", "Lambda0", "--mu", "alpha1",
                          "--tol", "1e-30")
    assert code == 1 and not report["pass"]


def test_reports_are_deterministic(capsys):
    args = ("group-check", "--input", "example-6.2", "--seed", "4")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert json.dumps(strip_timing(first)) == json.dumps(strip_timing(second))


def test_decompose_and_cocycle(capsys):
    code, report, _ = run(capsys, "decompose", "--input", "example-6.2")
    assert code == 0 and report["nilpotency_index"] == 3
    code, report, _ = run(capsys, "cocycle", "--input", "example-6.2")
    assert code == 0 and report["eta"] == [1, 1, -1]


def test_fock_build(capsys):
    code, report, _ = run(capsys, "fock-build", "--input", "example-6.2")
    assert code == 0 and report["basis_size"] == 945
    code, report, _ = run(capsys, "fock-build", "--input", "example-6.2", "--cutoff", "1")
    assert report["basis_size"] == 27 + 81


def test_vertexop_table(capsys):
    code, report, _ = run(capsys, "vertexop", "--input", "hyperbolic-identity", "--lambda", "e1", "--order", "2")
    assert code == 0 and report["table"]
    assert all(row["j"] == 0 for row in report["table"])


def test_specfun_selftest_needs_no_input(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, report, _ = run(capsys, "specfun-selftest", "--out", str(out))
    assert code == 0 and report is None
    assert json.loads(out.read_text())["pass"]


@pytest.mark.parametrize("text, fragment", [
    ('{"gram": [[1, 0], [0', "line 1"),
    ('{"phi": [[1]]}', "'gram'"),
    ('{"gram": [[2]], "phi": [[1]], "rank": 2}', "rank"),
    ('{"gram": [[0, 1], [1, 0]], "phi": [[1, 0], [0, 1]], "epsilon": [[1, 1], [1, 1]]}', "epsilon"),
])
def test_bad_input(capsys, tmp_path, text, fragment):
    path = tmp_path / "doc.json"
    path.write_text(text)
    code, report, err = run(capsys, "decompose", "--input", str(path))
    assert code == 2 and report is None and fragment in err


def test_missing_input(capsys):
    code, _, err = run(capsys, "constants")
    assert code == 2 and "--input" in err


def test_verify_all_example_a(capsys):
    code, report, _ = run(capsys, "verify", "--input", "example-6.1", "--suite", "all")
    assert code == 0 and report["pass"]
    names = {r["name"] for r in report["records"]}
    assert {"C_reference", "associativity", "heisenberg", "phi_equivariance", "exponential_product",
            "scalar_locality"} <= names
    table = {(row["lambda"], row["mu"]): complex(*row["C"]) for row in report["C_table"]}
    assert abs(table["lambda1", "lambda3"] - complex(math.cos(math.pi / 6), math.sin(math.pi / 6))) < 1e-10
