import csv
import io
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from pfrmt import cli
from pfrmt.cli import main, parse_complex, parse_grid
from pfrmt.errors import IntegrationError, ValidationError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_example(capsys):
    code, out, _ = run(capsys, "verify", "--n", "2", "--nu", "1", "--flavors", "0,2")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "pfaffian-rmt/1"
    assert doc["result"]["pass"]
    assert doc["result"]["checks"]["det_vs_pfaffian"]["max_residual"] < 1e-8


def test_mc_zero_samples_is_validation_error(capsys):
    code, out, err = run(capsys, "partition", "--method", "mc", "--samples", "0")
    assert code == 1 and out == ""
    assert json.loads(err)["error"]["type"] == "validation"


def test_micro_grid_example(capsys):
    code, out, _ = run(capsys, "micro", "--flavors", "1,1", "--nu", "0", "--grid", "0.5:5:10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 10
    assert list(rows[0]) == ["x", "z_pf", "z_det", "residual", "kernel1", "kernel3"]
    for r in rows:
        assert all(math.isfinite(float(v)) for v in r.values())
        assert float(r["residual"]) < 1e-8


def test_partition_round_trip(capsys, tmp_path):
    first = tmp_path / "first.json"
    args = ["partition", "--n", "2", "--nu", "1", "--bosonic", "0.3+0.8i", "--fermionic", "1-0.2i,0.5i",
            "--method", "det"]
    assert main(args + ["--out", str(first)]) == 0
    code, out, _ = run(capsys, "partition", "--request", str(first))
    assert code == 0
    assert json.loads(out) == json.loads(first.read_text())
    value = json.loads(out)["result"]["value"]
    assert abs(complex(value["re"], value["im"]) - (0.7929986552770685 - 0.27562914666769195j)) < 1e-10


def test_mc_round_trip_is_bit_identical(capsys, tmp_path):
    first = tmp_path / "mc.json"
    args = ["partition", "--n", "2", "--fermionic", "0.7+0.1i", "--method", "mc", "--samples", "4000",
            "--chunk", "1000", "--seed", "5", "--threads", "2"]
    assert main(args + ["--out", str(first)]) == 0
    code, out, _ = run(capsys, "partition", "--request", str(first))
    assert code == 0
    assert json.loads(out)["result"] == json.loads(first.read_text())["result"]


def test_kpoint_and_converge(capsys):
    code, out, _ = run(capsys, "kpoint", "--n", "3", "--nu", "1", "--x", "0.5,1.1", "--method", "det")
    assert code == 0
    assert json.loads(out)["result"]["value"] == pytest.approx(0.38377378589878847, rel=1e-10)
    code, out, _ = run(capsys, "converge", "--nu", "0", "--n-list", "25,50", "--grid", "0.5:2:4")
    assert code == 0
    assert len(list(csv.DictReader(io.StringIO(out)))) == 8


def test_wilson_command(capsys):
    code, out, _ = run(capsys, "wilson", "--nu", "0", "--a-hat", "0.1", "--masses", "1.5,2.5,3.5,4.5")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["checks"]["permutation_residual"] < 1e-10
    assert len(res["entries"]) == 4


@pytest.mark.parametrize("argv,code", [
    (["wilson", "--a-hat", "0.1", "--masses", "1,2,3"], 1),
    (["wilson", "--a-hat", "-0.1", "--masses", "1,2"], 1),
    (["partition", "--n", "2", "--fermionic", "1+i,1+i"], 1),
    (["partition", "--n", "2", "--bosonic", "0.5"], 1),
    (["kpoint", "--n", "2", "--x", "0.1,0.2,0.3"], 1),
    (["micro", "--grid", "0.5:1:3"], 1),
    (["nonsense"], 1),
    ([], 1),
    (["partition", "--n", "2", "--fermionic", "abc"], 1),
])
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert out == ""
    assert "error" in json.loads(err)


def test_numerical_failure_exits_2(capsys, monkeypatch):
    def fail(*args, **kwargs):
        raise IntegrationError("did not converge")

    monkeypatch.setattr(cli, "wilson_matrix", fail)
    code, out, err = run(capsys, "wilson", "--a-hat", "0.1", "--masses", "1,2")
    assert code == 2 and out == ""
    assert json.loads(err)["error"]["type"] == "numerical"


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("PFRMT_THREADS", "many")
    code, _, _ = run(capsys, "kpoint", "--n", "2", "--x", "0.5")
    assert code == 1
    code, _, _ = run(capsys, "kpoint", "--n", "2", "--x", "0.5", "--threads", "2")
    assert code == 0


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
@settings(max_examples=100, deadline=None)
def test_complex_literal_round_trip(re, im):
    text = f"{re!r}{'+' if im >= 0 else '-'}{abs(im)!r}i"
    assert parse_complex(text) == complex(re, im)


def test_complex_literal_forms():
    assert parse_complex("2i") == 2j
    assert parse_complex("-i") == -1j
    assert parse_complex("0.5-1e-3i") == complex(0.5, -1e-3)
    assert parse_complex("1.5") == 1.5
    assert parse_complex("1+2j") == 1 + 2j
    for bad in ["", "i1", "1++2i", "x"]:
        with pytest.raises(ValidationError):
            parse_complex(bad)


def test_grid_parser():
    assert list(parse_grid("0:1:3")) == [0.0, 0.5, 1.0]
    with pytest.raises(ValidationError):
        parse_grid("0:1")
