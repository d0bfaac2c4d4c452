"""Command-line interface tests: exit codes, determinism, output files."""

import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from critfpp.cli import main


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def test_help_exits_zero():
    code, out, _ = run(["--help"])
    assert code == 0


def test_unknown_flag_is_usage_error():
    code, _, _ = run(["geodesic", "--seed", "1", "--bogus"])
    assert code == 1


def test_missing_subcommand_is_usage_error():
    code, _, _ = run([])
    assert code == 1


def test_geodesic_smoke():
    code, out, _ = run(["geodesic", "--seed", "1", "--R", "6"])
    assert code == 0
    payload = json.loads(out.splitlines()[-1])
    assert payload["path"][0] == [0, 0]
    assert payload["N"] == len(payload["path"]) - 1


def test_sample_and_circuits(tmp_path):
    g = tmp_path / "grid.json"
    code, out, _ = run(["sample", "--seed", "3", "--R", "4", "--json", str(g)])
    assert code == 0 and "open fraction" in out
    assert json.loads(g.read_text())["R"] == 4

    c = tmp_path / "circ.json"
    code, out, _ = run(
        ["circuits", "--seed", "3", "--R", "6", "--dump-circuits", str(c)]
    )
    assert code == 0 and out.splitlines()[-1].startswith("L=")
    json.loads(c.read_text())


def test_verify_passes_and_dumps(tmp_path):
    p = tmp_path / "cons.json"
    code, out, _ = run(
        ["verify", "--seed", "2", "--R", "8", "--dump-construction", str(p)]
    )
    assert code == 0
    blob = json.loads(p.read_text())
    assert all(blob["verify"].values())


def test_repeat_runs_byte_identical():
    a = run(["geodesic", "--seed", "5", "--R", "6"])
    b = run(["geodesic", "--seed", "5", "--R", "6"])
    assert a == b


def test_threads_do_not_change_output():
    base = ["arms", "--query", "3arm-edge", "--b", "3", "--samples", "300", "--seed", "4"]
    a = run(base)
    b = run(base + ["--threads", "4"])
    assert a == b and a[0] == 0


def test_corrlen_smoke():
    code, out, _ = run(["corrlen", "--seed", "0", "--p", "1.0", "--samples", "100"])
    assert code == 0 and "L_hat(1.0) = 1" in out


def test_scaling_writes_csv(tmp_path):
    out_csv = tmp_path / "s.csv"
    argv = [
        "scaling",
        "--seed",
        "1",
        "--experiment",
        "scaling-NR",
        "--radii",
        "2,4",
        "--samples",
        "40",
        "--pi3-samples",
        "200",
        "--construction-samples",
        "2",
        "--out",
        str(out_csv),
    ]
    code, out, _ = run(argv)
    assert code == 0
    text = out_csv.read_text()
    assert text.startswith("R,mean_NR,")
    first = text
    code, _, _ = run(argv)
    assert code == 0 and out_csv.read_text() == first


def test_bad_distribution_is_usage_error():
    code, _, err = run(["geodesic", "--seed", "1", "--R", "4", "--dist", "wat"])
    assert code == 1
