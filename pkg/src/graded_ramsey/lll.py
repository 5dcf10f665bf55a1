"""Layer embedding by variable resampling.

One bipartite layer ``V_1 -> V_2`` is embedded into a host tournament:
each ``v`` in ``V_1`` gets an image from its option list ``f(v) ⊆ A`` and
every ``u`` in ``V_2`` must keep at least ``c`` common out-neighbours of
``φ(N_u)`` inside ``B``.  Bad events are collisions ``φ(v) = φ(w)`` and,
on collision-free neighbourhoods, a slack below ``c``.  The first violated
event in canonical order (collisions lexicographically, then ``u`` by index)
has its variables redrawn until none remain.

The bipartite digraph uses vertices ``0..p-1`` for ``V_1`` and
``p..p+q-1`` for ``V_2``, as produced by ``GradedDigraph.layer_pair``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .digraph import Digraph, Tournament
from .errors import GradedRamseyError, InvalidRequest
from .rng import stream


@dataclass(frozen=True, eq=False)
class LayerInstance:
    d_bip: Digraph
    n_left: int
    t: Tournament
    A: tuple[int, ...]
    B: tuple[int, ...]
    f: tuple[tuple[int, ...], ...]
    b: int
    c: int
    delta_sq: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(sorted(int(x) for x in self.A)))
        object.__setattr__(self, "B", tuple(sorted(int(x) for x in self.B)))
        object.__setattr__(self, "f", tuple(tuple(sorted(int(x) for x in opts)) for opts in self.f))
        p = self.n_left
        if not 0 <= p <= self.d_bip.n:
            raise InvalidRequest("n_left out of range")
        for u, v in self.d_bip.edges:
            if not (u < p <= v):
                raise InvalidRequest(f"edge ({u}, {v}) is not directed from V_1 to V_2")
        if len(self.f) != p:
            raise InvalidRequest(f"need one option list per V_1 vertex, got {len(self.f)} for {p}")
        a_set = set(self.A)
        if a_set & set(self.B):
            raise InvalidRequest("A and B must be disjoint")
        for v, opts in enumerate(self.f):
            if not opts:
                raise InvalidRequest(f"option list of vertex {v} is empty")
            if not set(opts) <= a_set:
                raise InvalidRequest(f"option list of vertex {v} leaves A")
        if self.b < 1 or self.c < 0:
            raise InvalidRequest("need b >= 1 and c >= 0")
        nu = tuple(tuple(int(x) for x in self.d_bip.pred[u]) for u in range(p, self.d_bip.n))
        object.__setattr__(self, "in_lists", nu)

    in_lists: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    @property
    def a(self) -> int:
        return len(self.A)

    @property
    def n_right(self) -> int:
        return self.d_bip.n - self.n_left

    @property
    def delta_in(self) -> int:
        return self.d_bip.max_in

    @property
    def delta_out(self) -> int:
        return self.d_bip.max_out

    def default_cap(self) -> int:
        return 50 * self.n_left * max(self.delta_out, 1)

    def hypothesis_flags(self) -> dict[str, bool]:
        """Which hypotheses of the local-lemma guarantee hold for this instance.

        ``delta`` compares squares so that the ``2^{-1/2}`` factor stays exact:
        ``δ² <= (b/a)^{2Δ⁻} / (2^{Δ⁻} (4Δ⁺Δ⁻)²)``.
        """
        dm, dp = self.delta_in, max(self.delta_out, 1)
        flags = {
            "sizes": self.a >= self.b >= 32 * self.n_left,
            "lists": all(len(opts) >= self.b for opts in self.f),
            "delta_in_positive": dm >= 1,
        }
        if self.delta_sq is None:
            flags["delta"] = False
        else:
            dm1 = max(dm, 1)
            rhs = Fraction(self.b, self.a) ** (2 * dm1) / (2**dm1 * (4 * dp * dm1) ** 2)
            flags["delta"] = self.delta_sq <= rhs
        return flags

    def hypotheses_hold(self) -> bool:
        return all(self.hypothesis_flags().values())


@dataclass(frozen=True)
class LayerEmbedding:
    phi: tuple[int, ...]
    resample_count: int
    slacks: tuple[int, ...]
    trace: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "schema": "graded-ramsey/layer-embedding@1",
            "phi": list(self.phi),
            "resample_count": self.resample_count,
            "slacks": list(self.slacks),
        }


class LayerEmbeddingFailure(GradedRamseyError):
    """Resample cap reached.  ``event`` is the last violated event."""

    def __init__(self, message, event, resample_count, phi):
        super().__init__(message)
        self.event = event
        self.resample_count = resample_count
        self.phi = phi

    def to_dict(self) -> dict:
        return {
            "schema": "graded-ramsey/layer-failure@1",
            "message": str(self),
            "event": list(self.event) if self.event else None,
            "resample_count": self.resample_count,
        }


def _b_masks(inst: LayerInstance) -> dict[int, int]:
    """Out-neighbourhood inside ``B`` of every vertex of ``A``, as an int bitset."""
    A = list(inst.A)
    if not A:
        return {}
    rows = inst.t.adj[np.ix_(A, list(inst.B))] if inst.B else np.zeros((len(A), 0), dtype=bool)
    packed = np.packbits(rows, axis=1, bitorder="little")
    return {x: int.from_bytes(packed[i].tobytes(), "little") for i, x in enumerate(A)}


def _slack(nu, phi, masks, full) -> int:
    m = full
    for v in nu:
        m &= masks[phi[v]]
    return m.bit_count()


def embed_layer(inst: LayerInstance, cap: int | None = None, seed: int = 0, record: bool = False) -> LayerEmbedding:
    """Resample until no bad event holds, or fail after ``cap`` resamples.

    Draw order: the initial images in ``V_1`` order from the ``("lll",)``
    stream, then, per resample, fresh images for the event's variables in
    increasing vertex order from the same stream.  With ``record`` the
    returned trace lists every ``(event, variables)`` resampled.
    """
    cap = inst.default_cap() if cap is None else int(cap)
    rng = stream(seed, "lll")
    p = inst.n_left
    f = inst.f
    masks = _b_masks(inst)
    full = (1 << len(inst.B)) - 1
    nus = inst.in_lists
    users: list[list[int]] = [[] for _ in range(p)]
    for ui, nu in enumerate(nus):
        for v in nu:
            users[v].append(ui)

    def draw(v):
        return f[v][int(rng.integers(len(f[v])))]

    phi = [draw(v) for v in range(p)]
    holders: dict[int, set[int]] = {}
    for v, x in enumerate(phi):
        holders.setdefault(x, set()).add(v)
    clashing = {x for x, hs in holders.items() if len(hs) > 1}
    slack: list[int | None] = [None] * len(nus)
    trace = [] if record else None
    count = 0
    event = None

    def move(v, x):
        old = phi[v]
        hs = holders[old]
        hs.discard(v)
        if len(hs) < 2:
            clashing.discard(old)
        if not hs:
            del holders[old]
        phi[v] = x
        hs = holders.setdefault(x, set())
        hs.add(v)
        if len(hs) > 1:
            clashing.add(x)
        for ui in users[v]:
            slack[ui] = None

    while True:
        event = None
        if clashing:
            best = None
            for x in clashing:
                pair = tuple(sorted(holders[x])[:2])
                if best is None or pair < best:
                    best = pair
            event, variables = ("collision", best[0], best[1]), best
        else:
            for ui, nu in enumerate(nus):
                if slack[ui] is None:
                    slack[ui] = _slack(nu, phi, masks, full)
                if slack[ui] < inst.c:
                    event, variables = ("slack", p + ui, slack[ui]), tuple(sorted(nu))
                    break
        if event is None:
            break
        if count >= cap:
            raise LayerEmbeddingFailure(f"resample cap {cap} reached", event, count, tuple(phi))
        count += 1
        if record:
            trace.append((event, variables))
        for v in variables:
            move(v, draw(v))
    slacks = tuple(_slack(nu, phi, masks, full) for nu in nus)
    return LayerEmbedding(tuple(phi), count, slacks, tuple(trace) if record else None)


def check_layer_embedding(inst: LayerInstance, phi) -> tuple[bool, list[tuple]]:
    """Recompute injectivity, list membership and every slack from scratch."""
    phi = [int(x) for x in phi]
    violations: list[tuple] = []
    if len(phi) != inst.n_left:
        return False, [("size", len(phi), inst.n_left)]
    first: dict[int, int] = {}
    for v, x in enumerate(phi):
        if x in first:
            violations.append(("collision", first[x], v))
        else:
            first[x] = v
        if x not in inst.f[v]:
            violations.append(("list", v, x))
    B = list(inst.B)
    for ui, nu in enumerate(inst.in_lists):
        common = np.ones(len(B), dtype=bool)
        for v in nu:
            common &= inst.t.adj[phi[v], B]
        sl = int(common.sum())
        if sl < inst.c:
            violations.append(("slack", inst.n_left + ui, sl))
    return not violations, violations


def instance_to_dict(inst: LayerInstance) -> dict:
    out = {
        "schema": "graded-ramsey/layer-instance@1",
        "digraph": {"n": inst.d_bip.n, "edges": [list(e) for e in inst.d_bip.edges]},
        "n_left": inst.n_left,
        "tournament": {"n": inst.t.n, "bits": inst.t.bits},
        "A": list(inst.A),
        "B": list(inst.B),
        "f": [list(opts) for opts in inst.f],
        "b": inst.b,
        "c": inst.c,
    }
    if inst.delta_sq is not None:
        out["delta_sq"] = str(inst.delta_sq)
    return out


def instance_from_dict(data: dict) -> LayerInstance:
    from .serialize import FormatError

    try:
        g = Digraph(int(data["digraph"]["n"]), tuple(tuple(e) for e in data["digraph"]["edges"]))
        t = Tournament.from_bits(int(data["tournament"]["n"]), data["tournament"]["bits"])
        dsq = data.get("delta_sq")
        return LayerInstance(
            g,
            int(data["n_left"]),
            t,
            tuple(data["A"]),
            tuple(data["B"]),
            tuple(tuple(o) for o in data["f"]),
            int(data["b"]),
            int(data["c"]),
            Fraction(dsq) if dsq is not None else None,
        )
    except KeyError as exc:
        raise FormatError("missing field", exc.args[0]) from exc
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), "$") from exc
