import json

import pytest

from graded_ramsey import serialize
from graded_ramsey.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main
from graded_ramsey.digraph import make_hypercube, random_tournament


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    q3 = tmp_path / "q3.json"
    t = tmp_path / "t.json"
    serialize.write_any(make_hypercube(3), q3)
    serialize.write_any(random_tournament(160, 3), t)
    return tmp_path, q3, t


def test_gen_formats_agree(tmp_path, capsys):
    for fmt in ("json", "dot"):
        p = tmp_path / f"g.{fmt}"
        assert run(["gen", "grid", 2, 3, "--out", p], capsys)[0] == EXIT_OK
        assert serialize.read_any(p) == serialize.read_any(tmp_path / "g.json")
    code, out, _ = run(["gen", "tournament", 5, "--seed", 4], capsys)
    assert code == EXIT_OK and json.loads(out)["bits"] == random_tournament(5, 4).bits
    code, out, _ = run(["gen", "tournament", 7, "--kind", "paley", "--format", "dot"], capsys)
    assert out.startswith("digraph tournament {")


def test_pipeline_and_audit(files, capsys):
    d, q3, t = files
    emb = d / "emb.json"
    assert run(["pipeline", q3, "--tournament", t, "--out", emb], capsys)[0] == EXIT_OK
    assert json.loads(emb.read_text())["verified"] is True
    code, out, _ = run(["audit", q3, t, emb], capsys)
    assert code == EXIT_OK and json.loads(out)["ok"] is True
    bad = json.loads(emb.read_text())
    bad["phi"][1] = bad["phi"][0]
    (d / "bad.json").write_text(json.dumps(bad))
    assert run(["audit", q3, t, d / "bad.json"], capsys)[0] == EXIT_NEGATIVE


def test_pipeline_generated_host_is_seeded(files, capsys):
    _, q3, _ = files
    a = run(["pipeline", q3, "--host-size", 160, "--seed", 5], capsys)
    b = run(["pipeline", q3, "--host-size", 160, "--seed", 5], capsys)
    assert a == b and a[0] == EXIT_OK


def test_bound(capsys):
    code, out, _ = run(["bound", "--hypercube", 3], capsys)
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["theorem_bound"] == "89964000000000" and data["hypercube_majorant"] == str(4 * 17**3)


def test_median(files, capsys):
    _, _, t = files
    code, out, _ = run(["median", t, "--seed", 1], capsys)
    assert code == EXIT_OK and json.loads(out)["median_property"] is True


def test_brute_exit_codes(tmp_path, capsys):
    p3 = tmp_path / "p3.json"
    run(["gen", "path", 3, "--out", p3], capsys)
    code, out, _ = run(["brute", "ramsey", "--pattern", p3, "--nmax", 5], capsys)
    assert code == EXIT_OK and json.loads(out)["value"] == 3
    assert run(["brute", "ramsey", "--pattern", p3, "--nmax", 2], capsys)[0] == EXIT_BUDGET
    host = tmp_path / "h.json"
    run(["gen", "tournament", 2, "--kind", "transitive", "--out", host], capsys)
    code, out, _ = run(["brute", "contains", "--pattern", p3, "--host", host], capsys)
    assert code == EXIT_NEGATIVE
    # a pattern digraph is not a host
    assert run(["brute", "contains", "--pattern", p3, "--host", p3], capsys)[0] == EXIT_INPUT


def test_lower_host_verdict_codes(capsys):
    assert run(["lower", "host", "--params", '{"k": 2, "x": 1}'], capsys)[0] == EXIT_NEGATIVE
    assert run(["lower", "host", "--params", '{"k": 3, "x": 2}'], capsys)[0] == EXIT_OK


def test_lower_guest(capsys):
    code, out, _ = run(["lower", "guest", "--params", '{"n": 12, "delta": 3, "alpha": 0.5}', "--seed", 1], capsys)
    data = json.loads(out)
    assert data["max_degree"] <= 3
    assert code == {"holds": EXIT_OK, "violated": EXIT_NEGATIVE}[data["intersection"]["verdict"]]


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3, "edges": [[0, 7]]}')
    code, _, err = run(["bound", bad], capsys)
    assert code == EXIT_INPUT and json.loads(err)["where"] == "edges"
    assert run(["gen", "grid"], capsys)[0] == EXIT_INPUT
    assert run(["lower", "host", "--params", "{oops"], capsys)[0] == EXIT_INPUT
    assert run(["median", tmp_path / "missing.json"], capsys)[0] == EXIT_INPUT


def test_convert_round_trip(files, capsys):
    d, q3, t = files
    assert run(["convert", q3, d / "q3.dot"], capsys)[0] == EXIT_OK
    assert run(["convert", d / "q3.dot", d / "back.json"], capsys)[0] == EXIT_OK
    assert (d / "back.json").read_text() == q3.read_text()
    assert run(["convert", t, d / "t.txt"], capsys)[0] == EXIT_OK
    assert serialize.read_any(d / "t.txt") == serialize.read_any(t)


def test_version(capsys):
    code, out, _ = run(["--version"], capsys)
    assert code == EXIT_OK and "0.1.0" in out


def test_drc_and_embed_layer(tmp_path, capsys):
    from conftest import drc_request, layer_instance

    from graded_ramsey.drc import request_to_dict
    from graded_ramsey.lll import instance_to_dict

    req, t = drc_request(4)
    serialize.write_json(tmp_path / "req.json", request_to_dict(req))
    serialize.write_any(t, tmp_path / "t.json")
    code, out, _ = run(["drc", tmp_path / "req.json", tmp_path / "t.json", "--seed", 4], capsys)
    assert code == EXIT_OK and json.loads(out)["schema"] == "graded-ramsey/drc-result@1"

    serialize.write_json(tmp_path / "inst.json", instance_to_dict(layer_instance(2)))
    code, out, _ = run(["embed-layer", tmp_path / "inst.json"], capsys)
    assert code == EXIT_OK and "phi" in json.loads(out)
