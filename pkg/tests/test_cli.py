import io
import json
import subprocess
import sys

import pytest

from singres.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_polyhedron_json():
    code, out, _ = call("polyhedron", "--poly", "x1^2 + x2^3")
    assert code == 0
    doc = json.loads(out)
    assert doc["normals"] == [[0, 1], [1, 0], [3, 2]] and doc["offsets"] == [0, 0, 6]


def test_fan_json_and_dot():
    code, out, _ = call("fan", "--poly", "x1^2 + x2^3")
    doc = json.loads(out)
    assert code == 0 and len(doc["cones"]) == 4 and doc["dets"] == [1, 1, 1, 1] and doc["fan_property"]
    code, out, _ = call("fan", "--poly", "x1^2 + x2^3", "--format", "dot")
    assert code == 0 and out.startswith("graph fan {") and out.count("--") == 3


def test_transform():
    code, out, _ = call("transform", "--poly", "x1^2 + x2^3", "--matrix", "[[3,1],[2,1]]",
                        "--vertex", "[2,0]", "--exceptional", "[1]")
    doc = json.loads(out)
    assert code == 0
    assert doc["exceptional_exponent"] == [6]
    assert [t["e"] for t in doc["partial"]["terms"]] == [[0, 2], [0, 3]]


def test_prepare():
    code, out, _ = call("prepare", "--poly", "x1^2 + x1^2*x2 + x2^3", "--tau", "6")
    doc = json.loads(out)
    assert code == 0 and doc["multiply_back"] and doc["weierstrass"]["height"] == 2


def test_resolve_formats():
    code, out, _ = call("resolve", "--poly", "x1^2 + x2^3")
    doc = json.loads(out)
    assert code == 0 and len(doc["nodes"]) == 3 and doc["all_resolved"] and doc["ledger"]["ok"]
    code, out, _ = call("resolve", "--poly", "x1^2 + x2^3", "--format", "text")
    assert code == 0 and "all resolved: True" in out
    code, out, _ = call("resolve", "--poly", "x1^2 + x2^3", "--format", "dot")
    assert out.startswith("digraph resolution {")


def test_resolve_user_points():
    code, out, _ = call("resolve", "--poly", "x1^2 + x2^3", "--policy", "user-points", "--points", "[[\"-1\"]]")
    assert code == 0 and json.loads(out)["all_resolved"]


def test_partition_and_check():
    code, out, _ = call("partition", "--poly", "x1^2 + x2^3 + x3^4", "--samples", "200")
    assert code == 0 and json.loads(out)["all_covered"]
    code, out, _ = call("check", "--poly", "x1^2 + x2^3")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and all(doc["checks"].values())


def test_input_file(tmp_path):
    path = tmp_path / "germ.txt"
    path.write_text("x1^2 + x2^3\n")
    code, out, _ = call("polyhedron", "--input", str(path))
    assert code == 0 and json.loads(out)["vertices"] == [[0, 3], [2, 0]]


@pytest.mark.parametrize(
    "argv",
    [
        ["polyhedron"],
        ["polyhedron", "--poly", "x1^^2"],
        ["polyhedron", "--poly", "x1^2", "--format", "dot"],
        ["transform", "--poly", "x1^2", "--matrix", "[[1"],
        ["frobnicate", "--poly", "x1"],
        ["polyhedron", "--input", "/nonexistent/germ.txt"],
    ],
)
def test_usage_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == "" and "error" in err


def test_domain_errors_exit_1():
    code, _, err = call("resolve", "--poly", "x1^2 + x2^2 + x3^2 + x4^2")
    assert code == 1 and "UnsupportedDimensionError" in err
    code, _, _ = call("resolve", "--poly", "1 + x1")
    assert code == 1


def test_output_is_byte_deterministic():
    runs = [call("resolve", "--poly", "x1^2 + x2*x3")[1] for _ in range(2)]
    assert runs[0] == runs[1]
    pretty = call("fan", "--poly", "x1^2 + x2^3", "--pretty")[1]
    assert json.loads(pretty) == json.loads(call("fan", "--poly", "x1^2 + x2^3")[1])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "singres", "polyhedron", "--poly", "x1^2 + x2^3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 2
