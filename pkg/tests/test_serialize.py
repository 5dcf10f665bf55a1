import json

import pytest

from graded_ramsey import serialize
from graded_ramsey.digraph import Digraph, random_tournament, transitive_digraph
from graded_ramsey.serialize import FormatError


@pytest.mark.parametrize("fmt", ["json", "dot"])
def test_corpus_round_trip(tmp_path, digraph_corpus, fmt):
    for name, G in digraph_corpus:
        p = tmp_path / f"{name}.{fmt}"
        serialize.write_any(G, p, fmt)
        H = serialize.read_any(p, fmt)
        assert H == G and H.labels == G.labels and H.name == G.name, name


def test_json_dot_json_is_byte_identical(tmp_path, digraph_corpus):
    for name, G in digraph_corpus:
        a = serialize.dumps(serialize.digraph_to_dict(G))
        H = serialize.from_dot(serialize.to_dot(G))
        assert serialize.dumps(serialize.digraph_to_dict(H)) == a, name


@pytest.mark.parametrize("fmt", ["json", "dot", "bits"])
def test_tournament_round_trip(tmp_path, fmt):
    for n in (1, 2, 7, 40):
        t = random_tournament(n, n)
        p = tmp_path / f"t{n}.{fmt}"
        serialize.write_any(t, p, fmt)
        assert serialize.read_any(p, fmt) == t


def test_plain_digraph_round_trip():
    g = transitive_digraph(5)
    assert serialize.digraph_from_dict(serialize.digraph_to_dict(g)) == g
    assert serialize.from_dot(serialize.to_dot(g)) == g
    iso = Digraph(4, [])
    assert serialize.from_dot(serialize.to_dot(iso)) == iso


@pytest.mark.parametrize(
    "data, where",
    [
        ([], "$"),
        ({"edges": []}, "n"),
        ({"n": "3", "edges": []}, "n"),
        ({"n": 3, "edges": [[0, 1, 2]]}, "edges[0]"),
        ({"n": 3, "edges": [[0, True]]}, "edges[0][1]"),
        ({"n": 3, "edges": [[0, 1], [1, 0]]}, "edges"),
        ({"n": 3, "edges": [[0, 2]], "layers": [[0], [1], [2]]}, "layers"),
        ({"n": 2, "edges": [], "layers": [[0], ["x"]]}, "layers[1][0]"),
        ({"schema": "other", "n": 1}, "schema"),
    ],
)
def test_malformed_digraph_names_field(data, where):
    with pytest.raises(FormatError) as exc:
        serialize.digraph_from_dict(data)
    assert exc.value.where == where


def test_malformed_tournament():
    with pytest.raises(FormatError) as exc:
        serialize.tournament_from_dict({"n": 3, "bits": "10"})
    assert exc.value.where == "bits"
    with pytest.raises(FormatError):
        serialize.tournament_from_dict({"n": 3})


def test_bad_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 3,\n "edges": [}')
    with pytest.raises(FormatError) as exc:
        serialize.read_json(p)
    assert exc.value.where.endswith(":2:12")


def test_bad_dot_line(tmp_path):
    with pytest.raises(FormatError) as exc:
        serialize.from_dot("digraph D {\n  0 -> 1;\n  what\n}\n")
    assert exc.value.where == "line 3"


def test_bits_only_for_tournaments(tmp_path):
    with pytest.raises(FormatError):
        serialize.write_any(transitive_digraph(3), tmp_path / "x.txt")


def test_dumps_is_canonical():
    assert serialize.dumps({"b": 1, "a": [1, 2]}) == json.dumps({"a": [1, 2], "b": 1}, indent=2) + "\n"
