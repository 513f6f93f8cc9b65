import csv
import json

import numpy as np
import pytest

from sympcode import channels as ch
from sympcode import io
from sympcode.cli import main
from sympcode.codes import projector
from sympcode.distill import cat_code


@pytest.fixture
def files(tmp_path):
    cat = tmp_path / "cat_L.json"
    cat.write_text(json.dumps({"d": 2, "n": 2, "basis": [[0, 1, 0, 1]]}))
    code = tmp_path / "cat_code.json"
    assert main(["codegen", "--L", str(cat), "--out", str(code)]) == 0
    return {"L": cat, "code": code, "dir": tmp_path}


def read(path):
    return json.loads(path.read_text())


def test_codegen_bundle(files):
    bundle = read(files["code"])
    assert bundle["subspace_dims"] == [2, 2]
    assert bundle["transversal"] == [[0, 0, 0, 0], [1, 0, 0, 0]]
    code = io.load_code(files["code"])
    assert np.allclose(projector(code, 0), np.diag([1, 0, 0, 1]))
    slim = files["dir"] / "slim.json"
    main(["codegen", "--L", str(files["L"]), "--no-vectors", "--out", str(slim)])
    assert "basis_vectors" not in read(slim)
    assert np.allclose(io.load_code(slim).basis, code.basis)


def test_fidelity_bit_flip(files):
    out = files["dir"] / "f.json"
    assert main(["fidelity", "--code", str(files["code"]), "--bit-flip", "0.1", "--out", str(out)]) == 0
    rep = read(out)
    assert rep["formula"] == pytest.approx(0.9)
    assert rep["simulated"] == pytest.approx(0.9)


def test_fidelity_identity_channel(files):
    chan = files["dir"] / "id.json"
    io.write_json(io.channel_to_json(ch.identity_channel(2, 2)), chan)
    out = files["dir"] / "f.json"
    assert main(["fidelity", "--code", str(files["code"]), "--channel", str(chan), "--out", str(out)]) == 0
    assert read(out)["simulated"] == pytest.approx(1)


def test_fidelity_sweep(files):
    table = files["dir"] / "sweep.csv"
    out = files["dir"] / "s.json"
    args = ["fidelity", "--code", str(files["code"]), "--sweep", "0:0.5:0.05", "--csv", str(table), "--out", str(out)]
    assert main(args) == 0
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 11
    for r in rows:
        assert float(r["formula"]) == pytest.approx(1 - float(r["p"]))


def test_dimension_mismatch(files, capsys):
    chan = files["dir"] / "one.json"
    io.write_json(io.channel_to_json(ch.identity_channel(2, 1)), chan)
    assert main(["fidelity", "--code", str(files["code"]), "--channel", str(chan)]) == 2
    assert "d=2, n=1" in capsys.readouterr().err


def test_missing_file(files, capsys):
    assert main(["fidelity", "--code", str(files["code"]), "--channel", "missing.json"]) != 0
    assert "missing.json" in capsys.readouterr().err


def test_malformed_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 2, "m": 1,\n "probs": {"0,0": 0.5}}')
    assert main(["exponent", "--dist", str(bad), "--rate", "0.1"]) == 2
    assert "probs" in capsys.readouterr().err
    bad.write_text('{"d": 2,\n "m": 1 "probs": {}}')
    assert main(["exponent", "--dist", str(bad), "--rate", "0.1"]) == 2
    assert "line 2" in capsys.readouterr().err
    bad.write_text('{"d": 2, "basis": [[0, 1, 0, 1]]}')
    assert main(["codegen", "--L", str(bad)]) == 2
    assert "'n'" in capsys.readouterr().err


def test_exponent_delta(tmp_path):
    P = tmp_path / "delta.json"
    io.write_json(io.distribution_to_json(ch.ErrorDistribution.delta(2, 1)), P)
    out = tmp_path / "e.json"
    assert main(["exponent", "--dist", str(P), "--rate", "0.3", "--method", "both", "--out", str(out)]) == 0
    rep = read(out)
    assert rep["value"] == pytest.approx(0.7)
    assert rep["threshold"] == pytest.approx(1)
    assert rep["method_agreement"] is True
    assert rep["argmin"] == {"0,0": 1.0}


def test_exponent_sweep(tmp_path):
    P = tmp_path / "p.json"
    io.write_json({"d": 2, "m": 1, "probs": {"0,0": 0.9, "1,0": 0.1}}, P)
    table = tmp_path / "e.csv"
    assert main(["exponent", "--dist", str(P), "--rate-sweep", "0:1:0.1", "--csv", str(table), "--out", str(tmp_path / "o.json")]) == 0
    vals = [float(r["value"]) for r in csv.DictReader(table.open())]
    assert len(vals) == 11
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_distill(tmp_path, files):
    out = tmp_path / "d.json"
    assert main(["distill", "--input-werner", "0.75", "--rounds", "0", "--out", str(out)]) == 0
    assert [t["fidelity"] for t in read(out)["trajectory"]] == [0.75]
    args = ["distill", "--input-werner", "0.75", "--rounds", "2", "--final-code", str(files["code"]), "--out", str(out)]
    assert main(args) == 0
    traj = read(out)["trajectory"]
    assert traj[1]["fidelity"] == pytest.approx(0.788462, abs=1e-6)
    assert traj[-1]["round"] == "final"


def test_verify_examples(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "theorem1", "--d", "2", "--n", "2", "--k", "1", "--seeds", "20", "--out", str(out)]) == 0
    rep = read(out)
    assert rep["suites"][0]["max_discrepancy"] < 1e-9
    assert rep["suites"][0]["checks"][0]["channels"] == 20
    assert main(["verify", "--suite", "twirl", "--d", "3", "--n", "1", "--out", str(out)]) == 0


def test_verify_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["verify", "--suite", "lemma2", "--seeds", "8", "--seed", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    main(["verify", "--suite", "lemma2", "--seeds", "8", "--seed", "4", "--out", str(c)])
    assert c.read_bytes() != a.read_bytes()


def test_json_round_trips(rng):
    B = ch.random_tpcp(2, 1, 2, seed=1)
    assert np.allclose(io.channel_from_json(json.loads(io.dumps(io.channel_to_json(B)))).kraus, B.kraus)
    P = ch.random_distribution(3, 1, rng)
    assert np.allclose(io.distribution_from_json(json.loads(io.dumps(io.distribution_to_json(P)))).probs, P.probs)
    code = cat_code()
    again = io.code_from_json(json.loads(io.dumps(io.code_to_json(code))))
    assert np.allclose(again.basis, code.basis)
    assert np.array_equal(again.transversal, code.transversal)


def test_non_tp_channel_rejected():
    data = io.channel_to_json(ch.KrausChannel(2, 1, np.array([0.5 * np.eye(2)])))
    with pytest.raises(io.ParseError, match="kraus"):
        io.channel_from_json(data)
