import json
import subprocess
import sys

import pytest

from softspr.cli import main

T1 = "(((1,2),3),4);"
T2 = "(((4,3),2),1);"
REPORT_KEYS = {"schema", "method", "distance", "components", "cuts", "invocations", "elapsed_ms", "bounds"}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_distance_identical_trees(capsys, tmp_path):
    path = tmp_path / "a.nwk"
    path.write_text("((1,2),(3,4));\n")
    code, out, _ = run(capsys, "distance", str(path), str(path), "--json")
    rep = json.loads(out)
    assert code == 0
    assert set(rep) == REPORT_KEYS and rep["schema"] == 1
    assert rep["distance"] == 0 and len(rep["components"]) == 1


def test_distance_fpt_json(capsys):
    code, out, _ = run(capsys, "distance", T1, T2, "--json")
    rep = json.loads(out)
    assert code == 0 and rep["method"] == "fpt"
    assert rep["distance"] == 2 and len(rep["components"]) == 3
    assert rep["bounds"] is None and rep["invocations"] > 0


def test_distance_approx_bounds(capsys):
    code, out, _ = run(capsys, "distance", "--method", "approx", T1, T2, "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["bounds"] == {"lower": 1, "upper": rep["distance"]}


def test_distance_oracle_and_size_guard(capsys):
    code, out, _ = run(capsys, "distance", "--method", "oracle", T1, T2, "--json")
    assert code == 0 and json.loads(out)["distance"] == 2
    big = "(" + ",".join(str(i) for i in range(50)) + ");"
    code, _, err = run(capsys, "distance", "--method", "oracle", big, big)
    assert code == 2 and "bound" in err


def test_budget_exhausted_exit_code(capsys):
    code, _, err = run(capsys, "distance", "--k-max", "1", T1, T2)
    assert code == 2 and "budget" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("distance", "(1,2);", "(1,3);"),
        ("distance", "((1,2);", "(1,2);"),
        ("distance", "missing-file", "(1,2);"),
        ("distance", "--method", "nope", "(1,2);", "(1,2);"),
        ("nosuchcommand",),
    ],
)
def test_input_errors_exit_one(capsys, argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    assert code == 1


def test_witness_round_trip_through_validate(capsys, tmp_path):
    forest = tmp_path / "f.txt"
    code, _, _ = run(capsys, "distance", T1, T2, "--forest", str(forest))
    assert code == 0
    assert forest.read_text().splitlines()[0] == "ρ;"
    code, out, _ = run(capsys, "validate", str(forest), T1, T2)
    assert code == 0 and out.strip() == "valid"


@pytest.mark.parametrize(
    "lines, reason",
    [
        (["(1,2);", "2;", "3;"], "containment"),
        (["((1,3),2);"], "triple"),
    ],
)
def test_validate_reports_reason(capsys, tmp_path, lines, reason):
    forest = tmp_path / "f.txt"
    forest.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "validate", str(forest), "((1,2),3);", "((1,2),3);", "--json")
    rep = json.loads(out)
    assert code == 1
    assert rep == {"schema": 1, "valid": False, "reason": reason, "components": len(lines)}


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", T1, T2, "--json")
    assert code == 0
    assert json.loads(out) == {"schema": 1, "ecut": 2, "spr_bfs": 2}


def test_trace_logs_cuts(capsys):
    code, _, err = run(capsys, "distance", "--trace", T1, T2)
    assert code == 0
    assert err.count("cut ") == 2


def test_selftest_is_deterministic(capsys):
    code, first, _ = run(capsys, "selftest", "--leaves", "3")
    assert code == 0 and "FAIL" not in first
    code, second, _ = run(capsys, "selftest", "--leaves", "4", "--samples", "40", "--seed", "3")
    code2, third, _ = run(capsys, "selftest", "--leaves", "4", "--samples", "40", "--seed", "3")
    assert code == code2 == 0 and second == third


def test_threads_flag_keeps_output(capsys):
    args = ("distance", "((1,2),((3,4),5),6);", "((1,(3,5)),((2,4),6));", "--json")
    _, one, _ = run(capsys, *args)
    _, two, _ = run(capsys, *args, "--threads", "2")
    one, two = json.loads(one), json.loads(two)
    assert one["distance"] == two["distance"]
    assert sorted(one["components"]) == sorted(two["components"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "softspr", "distance", "((1,2),3);", "((1,3),2);", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["distance"] == 1
