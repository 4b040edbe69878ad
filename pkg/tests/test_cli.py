from __future__ import annotations

import json

import numpy as np
import pytest

from shiftspace.cli import decode_array, encode_array, run

R_ZINV = '{"p":[1,0,1],"q":[0,1]}'


def _run(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_xmatrix_example(capsys):
    code, out, _ = _run(capsys, ["xmatrix", "--r", R_ZINV, "--j", "identity"])
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "xmatrix"
    assert np.allclose(doc["result"]["X"], [[1, 0], [0, -1]], atol=1e-12)
    assert doc["result"]["J0"] == [[1.0, 0.0], [0.0, -1.0]]


def test_verify_paper(capsys):
    code, out, _ = _run(capsys, ["verify-paper"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5 and all(line.startswith("PASS") for line in lines)


@pytest.mark.parametrize("argv", [
    ["xmatrix", "--bogus", "1"],
    ["frobnicate"],
    [],
    ["xmatrix", "--r", "{not json"],
    ["decompose", "--r", R_ZINV],
    ["cuntz-check", "--r", "[0,0,1]", "--degree", "-3"],
    ["xmatrix", "--r", R_ZINV, "--j", "[[0,2],[0.5,0]]"],
])
def test_usage_errors(capsys, argv):
    code, _, err = _run(capsys, argv)
    assert code == 1
    assert "error" in err


def test_error_names_the_flag(capsys):
    _, _, err = _run(capsys, ["kernel", "--family", "theta-line", "--grid", "[[0.1,0.5]]"])
    assert "--theta" in err


def test_validation_failure_exit_code(capsys):
    code, out, _ = _run(capsys, ["stein", "--size", "3", "--tolerance", "1e-30"])
    assert code == 2
    assert json.loads(out)["ok"] is False


def test_numerical_error_exit_code(capsys):
    code, out, _ = _run(capsys, ["resolvent", "--r", "[0,0,1]", "--f", "[1,1]", "--alpha", "0"])
    assert code == 2
    assert json.loads(out)["result"]["error"] == "DegenerateAlpha"


@pytest.mark.parametrize("argv", [
    ["xmatrix", "--r", R_ZINV],
    ["roots", "--p", "[-1,0,0,1]"],
    ["preimages", "--r", "[0,0,1]", "--alpha", "[0.25,0.1]"],
    ["resolvent", "--r", R_ZINV, "--f", '{"poly":[1,2,3]}', "--alpha", "0.5", "--beta", "[0.1,0.2]", "--seed", "4"],
    ["decompose", "--r", R_ZINV, "--f", '{"poly":[0,1]}', "--nodes", "512"],
    ["cuntz-check", "--r", "[0,0,1]", "--degree", "12"],
    ["stein", "--size", "3", "--seed", "7"],
    ["kernel", "--family", "hardy", "--r", R_ZINV, "--grid", "[[0.3,1.2],[-0.5,0.9]]"],
    ["kernel", "--family", "invariant", "--r", "[0,0,1]", "--grid", "[[0.1,0.2],[-0.3,0.1]]", "--j", "[1,-1]"],
    ["kernel", "--family", "theta-circle", "--r", "[0,1]", "--theta", '{"p":[-0.3,1],"q":[1,-0.3]}',
     "--grid", "[[0.1,0.2]]"],
    ["interp", "--r", "[0,0,1]", "--points", "[0.5,-0.5]", "--weights", "[1,2]", "--gamma", "1"],
])
def test_input_round_trip_and_determinism(capsys, tmp_path, argv):
    code, first, _ = _run(capsys, argv)
    assert code == 0, first
    code2, second, _ = _run(capsys, argv)
    assert second == first
    path = tmp_path / "out.json"
    path.write_text(first)
    code3, third, _ = _run(capsys, [argv[0], "--input", str(path)])
    assert code3 == 0
    assert third == first


def test_input_of_wrong_command(capsys, tmp_path):
    _, first, _ = _run(capsys, ["xmatrix", "--r", R_ZINV])
    path = tmp_path / "x.json"
    path.write_text(first)
    code, _, err = _run(capsys, ["stein", "--input", str(path)])
    assert code == 1 and "xmatrix" in err


def test_output_file(capsys, tmp_path):
    path = tmp_path / "res.json"
    code, out, _ = _run(capsys, ["xmatrix", "--r", R_ZINV, "--output", str(path)])
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["ok"] is True


def test_decompose_reports_witness(capsys):
    _, out, _ = _run(capsys, ["decompose", "--r", R_ZINV, "--f", '{"poly":[0,1]}'])
    taylor = json.loads(out)["result"]["taylor"]
    assert abs(taylor[0][1][0] - 1) < 1e-8 and abs(taylor[1][0][0] + 1) < 1e-8


def test_array_codec():
    for a in (np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[1 + 2j, 0], [3j, -1]])):
        assert np.array_equal(decode_array(encode_array(a), 2), a)
    assert np.array_equal(decode_array(encode_array(np.array([1j, 2.0])), 1), np.array([1j, 2.0]))


def test_log_level_env(capsys, monkeypatch):
    monkeypatch.setenv("SHIFTSPACE_LOG", "debug")
    code, _, _ = _run(capsys, ["roots", "--p", "[1,1]"])
    assert code == 0
