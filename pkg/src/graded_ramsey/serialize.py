"""Graph exchange formats.

JSON digraphs::

    {"schema": "graded-ramsey/digraph@1", "n": 4, "edges": [[0, 1], ...],
     "layers": [[0], [1, 2], [3]]}

JSON tournaments carry ``n`` plus the upper-triangular row-major bit string
(bit 1 at pair ``i < j`` means ``i -> j``)::

    {"schema": "graded-ramsey/tournament@1", "n": 3, "bits": "101"}

DOT output writes one ``u -> v;`` statement per edge; layers become
``rank=same`` subgraphs so that a DOT file round-trips losslessly.
Tournaments are written as ``digraph tournament { ... }`` and read back as
tournaments; the bit-string form is a single ``n bits`` line.
All vertex indices are 0-based.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .digraph import Digraph, GradedDigraph, Tournament
from .errors import GradedRamseyError

DIGRAPH_SCHEMA = "graded-ramsey/digraph@1"
TOURNAMENT_SCHEMA = "graded-ramsey/tournament@1"


class FormatError(GradedRamseyError, ValueError):
    """Malformed input.  ``where`` names the offending field or line."""

    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where is not None else message)
        self.where = where


def _labels_json(labels):
    return [list(lab) if isinstance(lab, tuple) else lab for lab in labels]


def digraph_to_dict(g: Digraph | GradedDigraph) -> dict:
    out = {"schema": DIGRAPH_SCHEMA}
    if isinstance(g, GradedDigraph):
        out["n"] = g.n
        out["edges"] = [list(e) for e in g.edges]
        out["layers"] = [list(layer) for layer in g.layers]
        if g.labels is not None:
            out["labels"] = _labels_json(g.labels)
        if g.name:
            out["name"] = g.name
    else:
        out["n"] = g.n
        out["edges"] = [list(e) for e in g.edges]
    return out


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"expected an integer, got {value!r}", where)
    return value


def digraph_from_dict(data: dict) -> Digraph | GradedDigraph:
    if not isinstance(data, dict):
        raise FormatError("top level must be an object", "$")
    schema = data.get("schema", DIGRAPH_SCHEMA)
    if schema != DIGRAPH_SCHEMA:
        raise FormatError(f"unsupported schema {schema!r}", "schema")
    if "n" not in data:
        raise FormatError("missing field", "n")
    n = _int(data["n"], "n")
    raw = data.get("edges", [])
    if not isinstance(raw, list):
        raise FormatError("expected a list", "edges")
    edges = []
    for i, e in enumerate(raw):
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise FormatError("expected [u, v]", f"edges[{i}]")
        edges.append((_int(e[0], f"edges[{i}][0]"), _int(e[1], f"edges[{i}][1]")))
    try:
        g = Digraph(n, tuple(edges))
    except ValueError as exc:
        raise FormatError(str(exc), "edges") from exc
    if data.get("layers") is None:
        return g
    layers = data["layers"]
    if not isinstance(layers, list):
        raise FormatError("expected a list of lists", "layers")
    for i, layer in enumerate(layers):
        if not isinstance(layer, list):
            raise FormatError("expected a list", f"layers[{i}]")
        for j, v in enumerate(layer):
            _int(v, f"layers[{i}][{j}]")
    labels = data.get("labels")
    if labels is not None:
        labels = tuple(tuple(lab) if isinstance(lab, list) else lab for lab in labels)
    try:
        return GradedDigraph(g, tuple(tuple(layer) for layer in layers), labels, data.get("name", ""))
    except (ValueError, GradedRamseyError) as exc:
        raise FormatError(str(exc), "layers") from exc


def tournament_to_dict(t: Tournament) -> dict:
    return {"schema": TOURNAMENT_SCHEMA, "n": t.n, "bits": t.bits}


def tournament_from_dict(data: dict) -> Tournament:
    if not isinstance(data, dict):
        raise FormatError("top level must be an object", "$")
    schema = data.get("schema", TOURNAMENT_SCHEMA)
    if schema != TOURNAMENT_SCHEMA:
        raise FormatError(f"unsupported schema {schema!r}", "schema")
    for key in ("n", "bits"):
        if key not in data:
            raise FormatError("missing field", key)
    n = _int(data["n"], "n")
    bits = data["bits"]
    if not isinstance(bits, str):
        raise FormatError("expected a bit string", "bits")
    try:
        return Tournament.from_bits(n, bits)
    except ValueError as exc:
        raise FormatError(str(exc), "bits") from exc


def to_dot(g: Digraph | GradedDigraph | Tournament, name: str = "D") -> str:
    if isinstance(g, Tournament):
        g = g.as_digraph()
    lines = [f"digraph {name} {{"]
    if isinstance(g, GradedDigraph):
        lines.append(f"  // n={g.n}")
        if g.name:
            lines.append(f"  // name={json.dumps(g.name)}")
        if g.labels is not None:
            lines.append(f"  // labels={json.dumps(_labels_json(g.labels), separators=(',', ':'))}")
        for i, layer in enumerate(g.layers):
            lines.append(f"  subgraph layer{i} {{ rank=same; {' '.join(f'{v};' for v in layer)} }}")
        edges = g.edges
    else:
        lines.append(f"  // n={g.n}")
        for v in range(g.n):
            lines.append(f"  {v};")
        edges = g.edges
    for u, v in edges:
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_N_RE = re.compile(r"^\s*//\s*n=(\d+)\s*$")
_EDGE_RE = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*;?\s*$")
_META_RE = re.compile(r"^\s*//\s*(name|labels)=(.*)$")
_NODE_RE = re.compile(r"^\s*(\d+)\s*;\s*$")
_LAYER_RE = re.compile(r"^\s*subgraph\s+layer(\d+)\s*\{\s*rank=same;\s*((?:\d+;\s*)*)\}\s*$")


def from_dot(text: str) -> Digraph | GradedDigraph:
    """Parse the DOT dialect written by :func:`to_dot`."""
    n = None
    edges, layers, nodes, meta = [], {}, set(), {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("digraph") or s == "}":
            continue
        if m := _N_RE.match(line):
            n = int(m.group(1))
        elif m := _META_RE.match(line):
            try:
                meta[m.group(1)] = json.loads(m.group(2))
            except json.JSONDecodeError as exc:
                raise FormatError(f"bad {m.group(1)} comment: {exc.msg}", f"line {lineno}") from exc
        elif m := _EDGE_RE.match(line):
            edges.append((int(m.group(1)), int(m.group(2))))
        elif m := _LAYER_RE.match(line):
            layers[int(m.group(1))] = [int(x) for x in re.findall(r"\d+", m.group(2))]
        elif m := _NODE_RE.match(line):
            nodes.add(int(m.group(1)))
        else:
            raise FormatError(f"cannot parse {s!r}", f"line {lineno}")
    if n is None:
        vs = nodes | {u for e in edges for u in e} | {v for layer in layers.values() for v in layer}
        n = max(vs) + 1 if vs else 0
    try:
        g = Digraph(n, tuple(edges))
    except ValueError as exc:
        raise FormatError(str(exc), "edges") from exc
    if layers:
        labels = meta.get("labels")
        if labels is not None:
            labels = tuple(tuple(lab) if isinstance(lab, list) else lab for lab in labels)
        try:
            return GradedDigraph(g, tuple(tuple(layers[i]) for i in sorted(layers)), labels, meta.get("name", ""))
        except (ValueError, GradedRamseyError) as exc:
            raise FormatError(str(exc), "layers") from exc
    return g


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc


def write_json(path, data) -> None:
    Path(path).write_text(dumps(data))


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def load_digraph(path) -> Digraph | GradedDigraph:
    path = Path(path)
    if path.suffix == ".dot":
        return from_dot(path.read_text())
    return digraph_from_dict(read_json(path))


def load_graded(path) -> GradedDigraph:
    from .digraph import infer_graded_partition

    g = load_digraph(path)
    return g if isinstance(g, GradedDigraph) else infer_graded_partition(g)


def load_tournament(path) -> Tournament:
    return tournament_from_dict(read_json(path))


TOURNAMENT_DOT_NAME = "tournament"
FORMATS = ("json", "dot", "bits")


def format_of(path) -> str:
    suffix = Path(path).suffix.lstrip(".")
    return {"txt": "bits"}.get(suffix, suffix)


def read_any(path, fmt: str | None = None) -> Digraph | GradedDigraph | Tournament:
    """Load a digraph or tournament from JSON, DOT or a ``"n bits"`` line."""
    path = Path(path)
    fmt = fmt or format_of(path)
    text = path.read_text()
    if fmt == "json":
        data = read_json(path)
        if isinstance(data, dict) and data.get("schema") == TOURNAMENT_SCHEMA:
            return tournament_from_dict(data)
        return digraph_from_dict(data)
    if fmt == "dot":
        first = next((line for line in text.splitlines() if line.strip()), "")
        g = from_dot(text)
        if first.split()[1:2] == [TOURNAMENT_DOT_NAME]:
            adj = np.zeros((g.n, g.n), dtype=bool)
            for u, v in g.edges:
                adj[u, v] = True
            try:
                return Tournament(adj)
            except ValueError as exc:
                raise FormatError(str(exc), "edges") from exc
        return g
    if fmt == "bits":
        parts = text.split()
        if len(parts) not in (1, 2) or not parts[0].isdigit():
            raise FormatError("expected 'n bits'", "line 1")
        try:
            return Tournament.from_bits(int(parts[0]), parts[1] if len(parts) == 2 else "")
        except ValueError as exc:
            raise FormatError(str(exc), "line 1") from exc
    raise FormatError(f"unknown format {fmt!r}", str(path))


def write_any(obj, path, fmt: str | None = None) -> None:
    fmt = fmt or format_of(path)
    if fmt == "json":
        write_json(path, tournament_to_dict(obj) if isinstance(obj, Tournament) else digraph_to_dict(obj))
    elif fmt == "dot":
        Path(path).write_text(to_dot(obj, TOURNAMENT_DOT_NAME if isinstance(obj, Tournament) else "D"))
    elif fmt == "bits":
        if not isinstance(obj, Tournament):
            raise FormatError("only tournaments have a bit-string form", str(path))
        Path(path).write_text(f"{obj.n} {obj.bits}\n")
    else:
        raise FormatError(f"unknown format {fmt!r}", str(path))
