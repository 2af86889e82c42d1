from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from dimerlab.cli import run
from dimerlab.quiver import parse_quiver, validate

from .conftest import FIXTURES


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], stdout=out)
    return code, out.getvalue()


def test_certify_example1_exit_zero():
    code, out = call("certify", FIXTURES / "example1.quiver")
    assert code == 0
    assert "verdict: NonnoetherianNCCR" in out


def test_matchings_conifold():
    code, out = call("matchings", FIXTURES / "conifold.quiver", "--json")
    data = json.loads(out)["result"]["matchings"]
    assert code == 0 and len(data) == 4 and all(m["simple"] for m in data)


def test_validate_broken_exit_three():
    code, out = call("validate", FIXTURES / "broken.quiver")
    assert code == 3
    assert "arrow in exactly one +face and one -face" in out


def test_parse_error_exit_three(tmp_path):
    bad = tmp_path / "bad.quiver"
    bad.write_text("vertices 2\narrow 0 1\n")
    assert call("validate", bad)[0] == 3
    assert call("validate", tmp_path / "missing.quiver")[0] == 3


def test_invalid_quiver_in_pipeline_exit_three():
    code, out = call("certify", FIXTURES / "broken.quiver", "--json")
    assert code == 3 and json.loads(out)["result"]["error"] == "invalid quiver"


def test_contract_round_trip():
    code, out = call("contract", FIXTURES / "example2.quiver", "--json")
    target = parse_quiver(json.loads(out)["result"]["target"])
    assert code == 0 and validate(target).ok


def test_json_byte_identical_and_out_file(tmp_path):
    path = tmp_path / "report.json"
    _, a = call("certify", FIXTURES / "example2.quiver", "--json", "--alias", FIXTURES / "xyzw.alias", "--out", path)
    _, b = call("certify", FIXTURES / "example2.quiver", "--json", "--alias", FIXTURES / "xyzw.alias")
    assert a == b
    assert path.read_text() == a
    report = json.loads(a)
    assert report["bounds"]["truncation"] == 12
    assert report["result"]["origin_ideal"]["m0_generators"] == ["x^2 z^1 w^1", "x^1 y^1 z^1 w^1", "y^2 z^1 w^1"]


def test_env_truncation_override(monkeypatch):
    monkeypatch.setenv("DIMERLAB_TRUNC", "8")
    _, out = call("algebra", FIXTURES / "conifold.quiver", "--json")
    assert json.loads(out)["bounds"]["truncation"] == 8
    _, out = call("algebra", FIXTURES / "conifold.quiver", "--json", "--trunc", "10")
    assert json.loads(out)["bounds"]["truncation"] == 10


def test_bad_bound_rejected():
    assert call("algebra", FIXTURES / "conifold.quiver", "--trunc", "0")[0] == 3


@pytest.mark.parametrize("command", ["impression", "algebra", "decompose", "present", "cancellative"])
def test_other_subcommands(command):
    code, out = call(command, FIXTURES / "example1.quiver", "--alias", FIXTURES / "xyzw.alias")
    assert code == 0 and out.strip()


def test_present_text_matches_matrix():
    _, out = call("present", FIXTURES / "example1.quiver", "--alias", FIXTURES / "xyzw.alias")
    assert out.splitlines() == [
        "S | (x^1, y^1)S | (x^1 z^1, y^1 z^1)S",
        "(z^1, w^1)S | S | (z^1)S",
        "S | (x^1, y^1)S | k+(x^1 z^1, y^1 z^1)S",
    ]


def test_decompose_not_applicable_on_conifold():
    assert call("decompose", FIXTURES / "conifold.quiver")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dimerlab", "certify", str(FIXTURES / "conifold.quiver")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "AssumptionsFail" in proc.stdout
