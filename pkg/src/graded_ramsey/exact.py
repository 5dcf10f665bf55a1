"""Exact containment and oriented Ramsey numbers for small instances.

``contains`` is a backtracking search over injective maps with bitset
candidate filtering.  ``oriented_ramsey`` walks ``N = |V(pattern)|, ...``
and, per level, looks for a host avoiding the pattern: ``labeled`` mode
sweeps every bit string, ``canonical`` mode extends pattern-free
isomorphism-class representatives one vertex at a time.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .digraph import Digraph, GradedDigraph, Tournament, random_tournament
from .errors import InvalidRequest
from .kernels.numpy_kernels import decode_code
from .pipeline import verify_embedding
from .rng import child_seed, stream

DEFAULT_NODE_BUDGET = 10**7
LABELED_MAX_N = 8
CANONICAL_MAX_N = 9
CHUNK = 1 << 20


@dataclass(frozen=True)
class Containment:
    status: str  # "found" | "absent" | "unknown"
    witness: tuple[int, ...] | None
    nodes: int

    @property
    def found(self) -> bool | None:
        return {"found": True, "absent": False}.get(self.status)


def _base(pattern) -> Digraph:
    return pattern.base if isinstance(pattern, GradedDigraph) else pattern


def pattern_order(pattern, node_order: str = "auto") -> list[int]:
    """Vertex order for the search.

    ``layer-major`` sorts graded patterns by layer, then by degree
    (descending) and index.  ``degree-major`` repeatedly takes the vertex
    with most already-placed neighbours, then highest degree, then lowest
    index, so each new vertex is as constrained as possible.
    """
    g = _base(pattern)
    if node_order == "auto":
        node_order = "layer-major" if isinstance(pattern, GradedDigraph) else "degree-major"
    deg = g.in_degree + g.out_degree
    if node_order == "layer-major":
        if not isinstance(pattern, GradedDigraph):
            raise InvalidRequest("layer-major order needs a graded pattern")
        return sorted(range(g.n), key=lambda v: (int(pattern.layer_of[v]), -int(deg[v]), v))
    if node_order != "degree-major":
        raise InvalidRequest(f"unknown node order {node_order!r}")
    nbrs = [set(g.succ[v]) | set(g.pred[v]) for v in range(g.n)]
    placed: list[int] = []
    rest = set(range(g.n))
    while rest:
        v = min(rest, key=lambda u: (-len(nbrs[u] & set(placed)), -int(deg[u]), u))
        placed.append(v)
        rest.remove(v)
    return placed


def _position_lists(g: Digraph, order: list[int]):
    pos = {v: t for t, v in enumerate(order)}
    in_lists, out_lists = [], []
    for v in order:
        in_lists.append(sorted(pos[u] for u in g.pred[v] if pos[u] < pos[v]))
        out_lists.append(sorted(pos[w] for w in g.succ[v] if pos[w] < pos[v]))
    return in_lists, out_lists


def contains(pattern, host: Tournament, node_order: str = "auto", budget: int = DEFAULT_NODE_BUDGET) -> Containment:
    """Search for a copy of ``pattern`` in ``host``.

    Never answers ``absent`` unless the search was exhaustive; a spent node
    budget gives ``unknown``.
    """
    g = _base(pattern)
    order = pattern_order(pattern, node_order)
    in_lists, out_lists = _position_lists(g, order)
    status, assign, nodes = kernels.contains_search(host, in_lists, out_lists, True, budget)
    if status == 1:
        phi = [0] * g.n
        for t, v in enumerate(order):
            phi[v] = assign[t]
        ok, bad = verify_embedding(g, host, phi)
        if not ok:  # pragma: no cover - search bug guard
            raise AssertionError(f"containment witness failed verification: {bad}")
        return Containment("found", tuple(phi), nodes)
    return Containment("absent" if status == 0 else "unknown", None, nodes)


def hamiltonian_path(t: Tournament) -> list[int]:
    """A directed Hamiltonian path by binary insertion (always exists)."""
    path: list[int] = []
    for v in range(t.n):
        if not path or t.adj[v, path[0]]:
            path.insert(0, v)
            continue
        if t.adj[path[-1], v]:
            path.append(v)
            continue
        lo, hi = 0, len(path) - 1  # path[lo] -> v -> path[hi]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if t.adj[path[mid], v]:
                lo = mid
            else:
                hi = mid
        path.insert(hi, v)
    return path


# ----------------------------------------------------------------------------
# Ramsey numbers
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class RamseyResult:
    value: int | None
    witness: Tournament | None
    n_max: int
    enumeration: str
    levels: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def unknown(self) -> bool:
        return self.value is None

    def to_dict(self) -> dict:
        return {
            "schema": "graded-ramsey/ramsey@1",
            "value": self.value,
            "unknown": self.unknown,
            "n_max": self.n_max,
            "enumeration": self.enumeration,
            "witness": None if self.witness is None else {"n": self.witness.n, "bits": self.witness.bits},
            "levels": list(self.levels),
        }


def _code_to_tournament(n: int, code: int) -> Tournament:
    total = n * (n - 1) // 2
    bits = format(code, f"0{total}b") if total else ""
    return Tournament.from_bits(n, bits)


def _tournament_code(t: Tournament) -> int:
    return int(t.bits, 2) if t.bits else 0


def _labeled_level(g: Digraph, n: int, deadline: float | None):
    """First pattern-free code on ``n`` vertices, -1 if none, None on timeout."""
    order = pattern_order(g, "degree-major")
    in_lists, out_lists = _position_lists(g, order)
    total = 1 << (n * (n - 1) // 2)
    lo = 0
    while lo < total:
        hi = min(total, lo + CHUNK)
        code = kernels.sweep_free(n, in_lists, out_lists, lo, hi)
        if code >= 0:
            return code
        lo = hi
        if deadline is not None and time.monotonic() > deadline and lo < total:
            return None
    return -1


def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def _canonical_levels(g: Digraph, n_max: int, deadline: float | None):
    """Yield ``(n, reps)`` with the canonical codes of pattern-free hosts."""
    n = 1
    reps = [0] if contains(g, _code_to_tournament(1, 0)).found is False else []
    yield 1, reps
    while n < n_max and reps:
        n += 1
        perms = _perms(n)
        seen: set[int] = set()
        free: list[int] = []
        for rep in reps:
            base_out, _ = decode_code(n - 1, rep)
            for mask in range(1 << (n - 1)):
                out = list(base_out) + [0]
                for u in range(n - 1):
                    if mask >> u & 1:  # new vertex beats u
                        out[n - 1] |= 1 << u
                    else:
                        out[u] |= 1 << (n - 1)
                code = kernels.canonical_code(n, out, perms)
                if code in seen:
                    continue
                seen.add(code)
                if contains(g, _code_to_tournament(n, code)).found is False:
                    free.append(code)
            if deadline is not None and time.monotonic() > deadline:
                yield n, None
                return
        reps = sorted(free)
        yield n, reps


def oriented_ramsey(
    pattern,
    n_max: int,
    enumeration: str = "labeled",
    time_budget_s: float | None = None,
    cache: "RamseyCache | None" = None,
) -> RamseyResult:
    """Smallest ``N <= n_max`` such that every ``N``-vertex tournament contains ``pattern``.

    Returns the value with a pattern-free witness on ``N - 1`` vertices, or
    ``value=None`` when ``n_max`` (or the time budget) is insufficient.
    """
    g = _base(pattern)
    if enumeration not in ("labeled", "canonical"):
        raise InvalidRequest(f"unknown enumeration {enumeration!r}")
    limit = LABELED_MAX_N if enumeration == "labeled" else CANONICAL_MAX_N
    deadline = None if time_budget_s is None else time.monotonic() + time_budget_s
    p = g.n
    if p == 0:
        return RamseyResult(0, None, n_max, enumeration)
    witness = _code_to_tournament(p - 1, 0)  # too small to hold the pattern
    levels: list[dict] = []
    if enumeration == "labeled":
        for n in range(p, n_max + 1):
            if n > limit:
                levels.append({"n": n, "status": "skipped", "reason": f"labeled enumeration limited to N <= {limit}"})
                break
            cached = cache.get(g, n) if cache else None
            if cached is not None:
                code = cached
            else:
                code = _labeled_level(g, n, deadline)
                if code is None:
                    levels.append({"n": n, "status": "timeout"})
                    return RamseyResult(None, witness, n_max, enumeration, tuple(levels))
                if cache:
                    cache.put(g, n, code)
            if code < 0:
                levels.append({"n": n, "status": "all-contain"})
                return RamseyResult(n, witness, n_max, enumeration, tuple(levels))
            witness = _code_to_tournament(n, code)
            levels.append({"n": n, "status": "free-host", "bits": witness.bits})
        return RamseyResult(None, witness, n_max, enumeration, tuple(levels))
    for n, reps in _canonical_levels(g, min(n_max, limit), deadline):
        if reps is None:
            levels.append({"n": n, "status": "timeout"})
            return RamseyResult(None, witness, n_max, enumeration, tuple(levels))
        if not reps:
            levels.append({"n": n, "status": "all-contain", "classes": 0})
            return RamseyResult(n, witness, n_max, enumeration, tuple(levels))
        witness = _code_to_tournament(n, reps[0])
        levels.append({"n": n, "status": "free-host", "classes": len(reps), "bits": witness.bits})
    return RamseyResult(None, witness, n_max, enumeration, tuple(levels))


# ----------------------------------------------------------------------------
# witness search
# ----------------------------------------------------------------------------


def count_copies(pattern, host: Tournament, cap: int = 10**6) -> int:
    """Number of injective edge-preserving maps, counted up to ``cap``."""
    g = _base(pattern)
    order = pattern_order(g, "degree-major")
    in_lists, out_lists = _position_lists(g, order)
    out_b, in_b = host.out_bits, host.in_bits
    p = len(order)
    assign = [0] * p
    count = 0

    def rec(t, unused):
        nonlocal count
        if t == p:
            count += 1
            return count >= cap
        m = unused
        for r in in_lists[t]:
            m &= out_b[assign[r]]
        for r in out_lists[t]:
            m &= in_b[assign[r]]
        while m:
            low = m & -m
            c = low.bit_length() - 1
            assign[t] = c
            if rec(t + 1, unused & ~low):
                return True
            m ^= low
        return False

    rec(0, (1 << host.n) - 1)
    return count


def extremal_witness(pattern, n: int, budget: int = 20000, seed: int = 0, restarts: int = 20) -> Tournament | None:
    """Local search for an ``n``-vertex tournament avoiding ``pattern``.

    Each restart draws a random tournament from ``("witness", r)`` and flips
    single edges, keeping flips that do not increase the copy count.  Any
    returned tournament has been confirmed pattern-free by :func:`contains`.
    """
    g = _base(pattern)
    if g.n > n:
        return _code_to_tournament(n, 0)
    per = max(1, budget // max(1, restarts))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if not pairs:
        t = _code_to_tournament(n, 0)
        return t if contains(g, t).found is False else None
    for r in range(restarts):
        rng = stream(seed, "witness", r)
        adj = random_tournament(n, child_seed(seed, "witness-start", r)).adj.copy()
        score = count_copies(g, Tournament(adj))
        for _ in range(per):
            if score == 0:
                break
            i, j = pairs[int(rng.integers(len(pairs)))]
            adj[i, j], adj[j, i] = adj[j, i], adj[i, j]
            new = count_copies(g, Tournament(adj), cap=score + 1)
            if new <= score:
                score = new
            else:
                adj[i, j], adj[j, i] = adj[j, i], adj[i, j]
        if score == 0:
            t = Tournament(adj)
            if contains(g, t).found is False:
                return t
    return None


# ----------------------------------------------------------------------------
# on-disk cache
# ----------------------------------------------------------------------------


def pattern_key(pattern) -> str:
    """Canonical form of a small pattern: minimum adjacency string over relabellings."""
    g = _base(pattern)
    n = g.n
    adj = np.zeros((n, n), dtype=np.uint8)
    for u, v in g.edges:
        adj[u, v] = 1
    if n <= 8:
        best = None
        for perm in itertools.permutations(range(n)):
            s = adj[np.ix_(perm, perm)].tobytes()
            if best is None or s < best:
                best = s
        body = best
    else:
        body = adj.tobytes()
    return f"{n}:" + "".join(str(b) for b in body)


class RamseyCache:
    """Content-addressed table of level results keyed by (pattern form, N)."""

    def __init__(self, root: str | os.PathLike | None = None):
        root = root or os.environ.get("GRADED_RAMSEY_CACHE") or Path.home() / ".cache" / "graded-ramsey"
        self.root = Path(root)

    def _path(self, g, n) -> Path:
        digest = hashlib.sha256(f"{pattern_key(g)}|{n}|labeled".encode()).hexdigest()
        return self.root / digest[:2] / f"{digest}.json"

    def get(self, g, n) -> int | None:
        path = self._path(g, n)
        if not path.exists():
            return None
        return int(json.loads(path.read_text())["first_free_code"])

    def put(self, g, n, code: int) -> None:
        path = self._path(g, n)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"n": n, "first_free_code": code}, sort_keys=True) + "\n")
