"""Digraphs, graded digraphs and tournaments, plus their generators.

All vertex identities are dense integers ``0..n-1``.  Generator labels (grid
coordinates, hypercube bit tuples) are kept as side metadata for I/O only.
Every value type here is immutable once built: numpy arrays are flagged
read-only and degree statistics are computed eagerly.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, NotGraded, SizeMismatch
from .rng import stream

DEFAULT_VERTEX_BUDGET = 1 << 20


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ----------------------------------------------------------------------------
# Digraph
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Digraph:
    """A simple digraph without self-loops, duplicate edges or 2-cycles."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        edges = tuple(sorted((int(u), int(v)) for u, v in self.edges))
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            if (v, u) in seen:
                raise ValueError(f"2-cycle between {u} and {v}")
            seen.add((u, v))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        succ = [[] for _ in range(n)]
        pred = [[] for _ in range(n)]
        for u, v in edges:
            succ[u].append(v)
            pred[v].append(u)
        object.__setattr__(self, "succ", tuple(tuple(s) for s in succ))
        object.__setattr__(self, "pred", tuple(tuple(p) for p in pred))
        object.__setattr__(self, "out_degree", _frozen(np.array([len(s) for s in succ], dtype=np.int64)))
        object.__setattr__(self, "in_degree", _frozen(np.array([len(p) for p in pred], dtype=np.int64)))

    # populated in __post_init__
    succ: tuple = field(init=False, repr=False)
    pred: tuple = field(init=False, repr=False)
    out_degree: np.ndarray = field(init=False, repr=False)
    in_degree: np.ndarray = field(init=False, repr=False)

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    @property
    def max_in(self) -> int:
        return int(self.in_degree.max()) if self.n else 0

    @property
    def max_out(self) -> int:
        return int(self.out_degree.max()) if self.n else 0

    @property
    def max_degree(self) -> int:
        """Maximum degree of the underlying undirected graph."""
        return int((self.in_degree + self.out_degree).max()) if self.n else 0

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.succ[u]

    def induced(self, vertices: Sequence[int]) -> tuple["Digraph", list[int]]:
        """Induced subdigraph, relabelled ``0..len(vertices)-1`` in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Digraph(len(vertices), tuple(edges)), list(vertices)

    def weak_components(self) -> list[list[int]]:
        adj = [set(self.succ[v]) | set(self.pred[v]) for v in range(self.n)]
        comp = [-1] * self.n
        out = []
        for s in range(self.n):
            if comp[s] >= 0:
                continue
            comp[s] = len(out)
            members = [s]
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if comp[w] < 0:
                        comp[w] = comp[s]
                        members.append(w)
                        queue.append(w)
            out.append(sorted(members))
        return out


# ----------------------------------------------------------------------------
# Graded digraph
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradedDigraph:
    """A digraph with a graded partition ``V_1, ..., V_h``.

    ``layer_max_in[i]`` (0-based, length ``h - 1``) is the maximum in-degree of
    the subgraph induced on layers ``i`` and ``i + 1``.  ``delta_in`` gives the
    same numbers with the 1-based indexing and zero sentinels used by the
    parameter cascade.
    """

    base: Digraph
    layers: tuple[tuple[int, ...], ...]
    labels: tuple | None = None
    name: str = ""

    def __post_init__(self):
        layers = tuple(tuple(sorted(int(v) for v in layer)) for layer in self.layers)
        n = self.base.n
        layer_of = np.full(n, -1, dtype=np.int64)
        for i, layer in enumerate(layers):
            if not layer:
                raise ValueError(f"layer {i} is empty")
            for v in layer:
                if not 0 <= v < n:
                    raise ValueError(f"vertex {v} out of range")
                if layer_of[v] >= 0:
                    raise ValueError(f"vertex {v} appears in two layers")
                layer_of[v] = i
        if n and (layer_of < 0).any():
            raise ValueError(f"vertex {int(np.flatnonzero(layer_of < 0)[0])} not in any layer")
        for u, v in self.base.edges:
            if layer_of[v] != layer_of[u] + 1:
                raise NotGraded(f"edge ({u}, {v}) does not go to the next layer", (u, v))
        # Vertices of layer i have no in-edges inside V_i ∪ V_{i+1}, so the
        # pair maximum is the largest in-degree found in layer i + 1.
        lmi = tuple(
            int(max(self.base.in_degree[v] for v in layers[i + 1])) for i in range(len(layers) - 1)
        )
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("labels must have one entry per vertex")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "layer_of", _frozen(layer_of))
        object.__setattr__(self, "layer_max_in", lmi)

    layer_of: np.ndarray = field(init=False, repr=False)
    layer_max_in: tuple[int, ...] = field(init=False, repr=False)

    def __eq__(self, other):
        return (
            isinstance(other, GradedDigraph) and self.base == other.base and self.layers == other.layers
        )

    def __hash__(self):
        return hash((self.base, self.layers))

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def h(self) -> int:
        return len(self.layers)

    @property
    def edges(self):
        return self.base.edges

    @property
    def sizes(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    @property
    def max_in(self) -> int:
        return self.base.max_in

    @property
    def max_out(self) -> int:
        return self.base.max_out

    def delta_in(self, i: int) -> int:
        """Pair in-degree with 1-based ``i`` and sentinels ``Δ⁻_0 = Δ⁻_h = 0``."""
        if i <= 0 or i >= self.h:
            return 0
        return self.layer_max_in[i - 1]

    def layer_pair(self, i: int) -> tuple[Digraph, list[int], list[int]]:
        """The bipartite digraph on 0-based layers ``i`` and ``i + 1``.

        Returns ``(bip, left, right)`` where ``bip`` is relabelled with
        ``left`` first and ``right`` after.
        """
        left, right = list(self.layers[i]), list(self.layers[i + 1])
        bip, _ = self.base.induced(left + right)
        return bip, left, right


# ----------------------------------------------------------------------------
# Tournament
# ----------------------------------------------------------------------------


def _pack_rows(adj: np.ndarray) -> np.ndarray:
    """Bool matrix -> uint64 bitset rows, bit ``v`` of row ``u`` = adj[u, v]."""
    n = adj.shape[0]
    words = max(1, (n + 63) // 64)
    packed = np.packbits(adj, axis=1, bitorder="little")
    buf = np.zeros((adj.shape[0], words * 8), dtype=np.uint8)
    buf[:, : packed.shape[1]] = packed
    return np.ascontiguousarray(buf).view("<u8").astype(np.uint64)


@dataclass(frozen=True, eq=False)
class Tournament:
    """A complete orientation on ``n`` vertices.

    ``adj[u, v]`` is True iff the edge ``u -> v`` is present.  Bitset views of
    the out- and in-neighbourhoods are available both as Python ints
    (``out_bits``) and as packed ``uint64`` rows (``out_words``).
    """

    adj: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adj, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise SizeMismatch("tournament adjacency must be square")
        if adj.diagonal().any():
            raise ValueError("tournament has a self-loop")
        iu = np.triu_indices(adj.shape[0], 1)
        if not np.array_equal(adj[iu], ~adj.T[iu]):
            raise ValueError("not a tournament: some pair has zero or two directions")
        object.__setattr__(self, "adj", _frozen(adj))

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    def __eq__(self, other):
        return isinstance(other, Tournament) and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.bits))

    def __repr__(self):
        return f"Tournament(n={self.n})"

    @classmethod
    def from_bits(cls, n: int, bits: str | Sequence[int] | np.ndarray) -> "Tournament":
        """Build from the upper-triangular row-major bit string.

        Bit ``1`` at pair ``(i, j)``, ``i < j``, means ``i -> j``.
        """
        if isinstance(bits, str):
            if set(bits) - {"0", "1"}:
                raise ValueError("bit string may only contain '0' and '1'")
            arr = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
        else:
            arr = np.asarray(bits, dtype=np.uint8)
        if arr.size != n * (n - 1) // 2:
            raise SizeMismatch(f"expected {n * (n - 1) // 2} bits for n={n}, got {arr.size}")
        adj = np.zeros((n, n), dtype=bool)
        iu = np.triu_indices(n, 1)
        adj[iu] = arr.astype(bool)
        adj[iu[1], iu[0]] = ~arr.astype(bool)
        return cls(adj)

    @cached_property
    def bits(self) -> str:
        iu = np.triu_indices(self.n, 1)
        return (self.adj[iu].astype(np.uint8) + ord("0")).tobytes().decode()

    @cached_property
    def out_degree(self) -> np.ndarray:
        return _frozen(self.adj.sum(axis=1).astype(np.int64))

    @cached_property
    def out_words(self) -> np.ndarray:
        return _frozen(_pack_rows(self.adj))

    @cached_property
    def in_words(self) -> np.ndarray:
        return _frozen(_pack_rows(np.ascontiguousarray(self.adj.T)))

    @cached_property
    def out_bits(self) -> tuple[int, ...]:
        return tuple(int.from_bytes(row.tobytes(), "little") for row in self.out_words)

    @cached_property
    def in_bits(self) -> tuple[int, ...]:
        return tuple(int.from_bytes(row.tobytes(), "little") for row in self.in_words)

    def beats(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def edge_count(self) -> int:
        return int(self.adj.sum())

    def subtournament(self, vertices: Sequence[int]) -> "Tournament":
        idx = np.asarray(vertices, dtype=np.int64)
        return Tournament(self.adj[np.ix_(idx, idx)])

    def as_digraph(self) -> Digraph:
        us, vs = np.nonzero(self.adj)
        return Digraph(self.n, tuple(zip(us.tolist(), vs.tolist())))


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# ----------------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------------


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise BudgetExceeded(f"{count} vertices exceeds the vertex budget {budget}")


def make_grid(d: int, k: int, budget: int = DEFAULT_VERTEX_BUDGET) -> GradedDigraph:
    """Grid digraph on ``[k]^d``; each edge increments one coordinate."""
    if d < 1 or k < 1:
        raise ValueError("d and k must be positive")
    _check_budget(k**d, budget)
    coords = list(itertools.product(range(1, k + 1), repeat=d))
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for c in coords:
        for axis in range(d):
            if c[axis] < k:
                nxt = c[:axis] + (c[axis] + 1,) + c[axis + 1 :]
                edges.append((index[c], index[nxt]))
    layers = [[] for _ in range(d * (k - 1) + 1)]
    for c, i in index.items():
        layers[sum(c) - d].append(i)
    return GradedDigraph(Digraph(len(coords), tuple(edges)), tuple(map(tuple, layers)), tuple(coords), f"grid-{d}-{k}")


def make_hypercube(d: int, budget: int = DEFAULT_VERTEX_BUDGET) -> GradedDigraph:
    """Oriented hypercube on ``{0,1}^d``; edges flip a 0 coordinate to 1.

    Vertex ``v`` is the integer whose binary digits are the coordinates, first
    coordinate most significant.  Layer ``i`` holds the weight-``i`` vertices.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    _check_budget(2**d, budget)
    n = 1 << d
    edges = [(v, v | (1 << b)) for v in range(n) for b in range(d) if not v >> b & 1]
    layers = [[] for _ in range(d + 1)]
    for v in range(n):
        layers[v.bit_count()].append(v)
    labels = tuple(tuple((v >> (d - 1 - i)) & 1 for i in range(d)) for v in range(n))
    return GradedDigraph(Digraph(n, tuple(edges)), tuple(map(tuple, layers)), labels, f"hypercube-{d}")


def directed_path(n: int) -> GradedDigraph:
    return GradedDigraph(Digraph(n, tuple((i, i + 1) for i in range(n - 1))), tuple((i,) for i in range(n)), name=f"path-{n}")


def transitive_digraph(n: int) -> Digraph:
    """TT_n as a pattern digraph."""
    return Digraph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def infer_graded_partition(g: Digraph) -> GradedDigraph:
    """Recover the graded partition of ``g`` or raise :class:`NotGraded`.

    Each weakly connected component is layered independently and aligned so
    its lowest layer is the first one.  On failure the witness is a directed
    cycle, or an edge that skips a layer under longest-path ranking.
    """
    n = g.n
    indeg = g.in_degree.copy()
    queue = deque(v for v in range(n) if indeg[v] == 0)
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in g.succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if len(order) < n:
        raise NotGraded("digraph has a directed cycle", _find_cycle(g, set(range(n)) - set(order)))

    rank = np.zeros(n, dtype=np.int64)
    for u in order:
        for v in g.succ[u]:
            rank[v] = max(rank[v], rank[u] + 1)

    # Ranks along undirected edges: v sits one above every in-neighbour.
    pot = np.full(n, np.iinfo(np.int64).min, dtype=np.int64)
    consistent = True
    for comp in g.weak_components():
        s = comp[0]
        pot[s] = 0
        queue = deque([s])
        while queue and consistent:
            u = queue.popleft()
            for w, delta in [(w, 1) for w in g.succ[u]] + [(w, -1) for w in g.pred[u]]:
                want = pot[u] + delta
                if pot[w] == np.iinfo(np.int64).min:
                    pot[w] = want
                    queue.append(w)
                elif pot[w] != want:
                    consistent = False
                    break
        if not consistent:
            break
        lo = min(pot[v] for v in comp)
        for v in comp:
            pot[v] -= lo
    if not consistent:
        for u, v in g.edges:
            if rank[v] != rank[u] + 1:
                raise NotGraded(f"edge ({u}, {v}) spans {int(rank[v] - rank[u])} ranks", (u, v))
        raise AssertionError("inconsistent potential without a rank witness")  # pragma: no cover

    h = int(pot.max()) + 1 if n else 0
    layers = [[] for _ in range(h)]
    for v in range(n):
        layers[int(pot[v])].append(v)
    return GradedDigraph(g, tuple(map(tuple, layers)))


def _find_cycle(g: Digraph, remaining: set[int]) -> list[int]:
    # Every remaining vertex has an in-neighbour inside ``remaining``.
    v = min(remaining)
    seen = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = next(u for u in g.pred[v] if u in remaining)
    cycle = path[seen[v] :]
    cycle.reverse()
    return cycle


def random_tournament(n: int, seed: int) -> Tournament:
    """Uniform random tournament.

    Draw order: one fair bit per pair ``(i, j)``, ``i < j``, in row-major
    order from the ``"tournament"`` stream; bit 1 means ``i -> j``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    bits = stream(seed, "tournament").integers(0, 2, size=n * (n - 1) // 2, dtype=np.uint8)
    return Tournament.from_bits(n, bits)


def transitive_tournament(n: int) -> Tournament:
    return Tournament(np.triu(np.ones((n, n), dtype=bool), 1))


def cyclic_triangle() -> Tournament:
    return Tournament.from_bits(3, "101")  # 0->1, 2->0, 1->2


def paley_tournament(p: int) -> Tournament:
    """Quadratic-residue tournament for a prime ``p ≡ 3 (mod 4)``."""
    if p % 4 != 3:
        raise ValueError("p must be 3 mod 4")
    residues = {(x * x) % p for x in range(1, p)}
    adj = np.zeros((p, p), dtype=bool)
    for i in range(p):
        for j in range(p):
            adj[i, j] = (j - i) % p in residues
    return Tournament(adj)


@dataclass(frozen=True)
class BlowupSpec:
    outer: Tournament
    part_sizes: tuple[int, ...]
    inner_fill: str = "random"  # "random" | "transitive"

    def __post_init__(self):
        object.__setattr__(self, "part_sizes", tuple(int(s) for s in self.part_sizes))
        if len(self.part_sizes) != self.outer.n:
            raise SizeMismatch(f"{len(self.part_sizes)} part sizes for an outer tournament on {self.outer.n} vertices")
        if any(s < 1 for s in self.part_sizes):
            raise ValueError("part sizes must be positive")
        if self.inner_fill not in ("random", "transitive"):
            raise ValueError(f"unknown inner fill {self.inner_fill!r}")

    @property
    def vertex_count(self) -> int:
        return sum(self.part_sizes)

    def parts(self) -> list[range]:
        out, start = [], 0
        for s in self.part_sizes:
            out.append(range(start, start + s))
            start += s
        return out


def blowup(spec: BlowupSpec, seed: int = 0) -> Tournament:
    """Replace outer vertex ``i`` by a part of ``part_sizes[i]`` vertices.

    Parts are numbered consecutively.  With the random fill, part ``i`` gets
    ``random_tournament(size, child)`` where ``child`` is drawn from the
    ``("blowup", i)`` stream.
    """
    parts = spec.parts()
    part_of = np.repeat(np.arange(len(parts)), spec.part_sizes)
    adj = spec.outer.adj[np.ix_(part_of, part_of)].copy()
    for i, part in enumerate(parts):
        sl = slice(part.start, part.stop)
        if spec.inner_fill == "transitive":
            inner = transitive_tournament(len(part))
        else:
            child = int(stream(seed, "blowup", i).integers(0, 2**63))
            inner = random_tournament(len(part), child)
        adj[sl, sl] = inner.adj
    return Tournament(adj)


def random_graded_digraph(
    layer_sizes: Sequence[int], max_degree: int, seed: int, extra_edge_prob: float = 0.5, tries: int = 200
) -> GradedDigraph:
    """A connected random graded digraph with the given layer sizes.

    Every vertex above the first layer receives one in-edge from the layer
    below; further edges between consecutive layers are added with
    probability ``extra_edge_prob`` while both endpoints stay within
    ``max_degree``.  Leftover components are joined by random edges between
    consecutive layers where degree allows; draws that stay disconnected are
    rejected.
    """
    sizes = [int(s) for s in layer_sizes]
    if any(s < 1 for s in sizes):
        raise ValueError("layer sizes must be positive")
    if max_degree < 2 and len(sizes) > 2:
        raise ValueError("max_degree >= 2 needed to connect three or more layers")
    rng = stream(seed, "graded")
    starts = np.concatenate([[0], np.cumsum(sizes)])
    n = int(starts[-1])
    layers = tuple(tuple(range(int(starts[i]), int(starts[i + 1]))) for i in range(len(sizes)))
    for _ in range(tries):
        deg = np.zeros(n, dtype=np.int64)
        edges = set()
        ok = True
        for i in range(len(sizes) - 1):
            lower, upper = layers[i], layers[i + 1]
            for v in rng.permutation(upper):
                free = [u for u in lower if deg[u] < max_degree]
                if not free:
                    ok = False
                    break
                # prefer lower vertices that have no out-edge yet
                bare = [u for u in free if not any((u, w) in edges for w in upper)]
                u = int(rng.choice(bare if bare else free))
                edges.add((u, int(v)))
                deg[u] += 1
                deg[v] += 1
            if not ok:
                break
            # leave one unit of degree on upper vertices that still need an out-edge
            cap_up = max_degree - 1 if i + 2 < len(sizes) else max_degree
            for u in lower:
                for v in upper:
                    if (u, v) in edges or deg[u] >= max_degree or deg[v] >= cap_up:
                        continue
                    if rng.random() < extra_edge_prob:
                        edges.add((u, v))
                        deg[u] += 1
                        deg[v] += 1
        if not ok:
            continue
        g = Digraph(n, tuple(edges))
        comps = g.weak_components()
        # join components with spare degree until connected or stuck
        while len(comps) > 1:
            comp_of = np.empty(n, dtype=np.int64)
            for ci, comp in enumerate(comps):
                comp_of[comp] = ci
            links = [
                (u, v)
                for i in range(len(sizes) - 1)
                for u in layers[i]
                for v in layers[i + 1]
                if comp_of[u] != comp_of[v] and deg[u] < max_degree and deg[v] < max_degree
            ]
            if not links:
                break
            u, v = links[int(rng.integers(len(links)))]
            edges.add((u, v))
            deg[u] += 1
            deg[v] += 1
            g = Digraph(n, tuple(edges))
            comps = g.weak_components()
        if len(comps) == 1:
            return GradedDigraph(g, layers, name=f"graded-{'x'.join(map(str, sizes))}-s{seed}")
    raise BudgetExceeded(f"no connected graded digraph found in {tries} draws")
