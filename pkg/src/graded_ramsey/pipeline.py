"""End-to-end embedding of a graded digraph into a tournament.

Backward phase: fix a median order, put ``A_h`` on the last ``a_h``
positions and obtain ``A_{h-1}, ..., A_1`` by dependent random choice, each
inside the window just before the previous one.  Forward phase: embed
``V_1, ..., V_{h-1}`` layer by layer with the resampling embedder, feeding
each layer the common out-neighbourhoods left by the previous one as its
option lists, then place ``V_h`` greedily (with a matching fallback).

All randomness is derived from the single ``seed``:

* ``("order",)`` for the median order,
* ``("drc", i, attempt)`` for the selector at layer ``i``,
* ``("lll", restart, i, attempt)`` for the embedder at layer ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .digraph import Digraph, GradedDigraph, Tournament
from .drc import DrcFailure, DrcRequest, drc_select
from .errors import GradedRamseyError, MedianPropertyViolation
from .lll import LayerEmbeddingFailure, LayerInstance, embed_layer
from .median import Ordering, local_median_order
from .params import ParameterSet
from .rng import child_seed


@dataclass(frozen=True)
class Budgets:
    drc_trials: int = 1000
    drc_retries: int = 3
    lll_cap: int | None = None
    lll_retries: int = 4
    forward_restarts: int = 8
    count_budget: int = 10**6


@dataclass(frozen=True)
class EmbeddingMap:
    phi: tuple[int, ...]
    layer_images: tuple[tuple[int, ...], ...]
    verified: bool
    resamples: int
    j: tuple[int, ...]
    A: tuple[tuple[int, ...], ...]
    restarts: int = 0

    def to_dict(self) -> dict:
        return {
            "schema": "graded-ramsey/embedding@1",
            "success": True,
            "phi": list(self.phi),
            "layer_images": [list(x) for x in self.layer_images],
            "verified": self.verified,
            "resamples": self.resamples,
            "j": list(self.j),
            "A_sizes": [len(x) for x in self.A],
            "restarts": self.restarts,
        }


@dataclass(frozen=True)
class FailureTrace:
    phase: str
    layer: int
    message: str
    report: dict = field(default_factory=dict)
    resamples: int = 0

    def to_dict(self) -> dict:
        return {
            "schema": "graded-ramsey/embedding@1",
            "success": False,
            "phase": self.phase,
            "layer": self.layer,
            "message": self.message,
            "report": self.report,
            "resamples": self.resamples,
        }


def verify_embedding(D: Digraph | GradedDigraph, T: Tournament, phi) -> tuple[bool, list[tuple]]:
    """Injectivity, range and direction of every edge of ``D`` under ``phi``."""
    base = D.base if isinstance(D, GradedDigraph) else D
    phi = [int(x) for x in phi]
    out: list[tuple] = []
    if len(phi) != base.n:
        return False, [("size", len(phi), base.n)]
    seen: dict[int, int] = {}
    for v, x in enumerate(phi):
        if not 0 <= x < T.n:
            out.append(("range", v, x))
            continue
        if x in seen:
            out.append(("collision", seen[x], v))
        else:
            seen[x] = v
    if out:
        return False, out
    for u, v in base.edges:
        if not T.adj[phi[u], phi[v]]:
            out.append(("edge", u, v))
    return not out, out


# ----------------------------------------------------------------------------
# backward phase
# ----------------------------------------------------------------------------


def _backward(D, T, ps: ParameterSet, order: Ordering, seed, budgets):
    h, N = D.h, T.n
    perm = order.perm
    A = [None] * (h + 1)
    j = [0] * (h + 1)
    a_h = ps.a_int(h)
    j[h] = N - a_h + 1
    A[h] = tuple(perm[j[h] - 1 :])
    for i in range(h - 1, 0, -1):
        last = None
        for attempt in range(budgets.drc_retries):
            try:
                req = DrcRequest(
                    j=j[i + 1],
                    a=ps.a_int(i + 1),
                    a_prime=ps.a_int(i),
                    b=ps.b_int(i + 1),
                    ell=ps.ell[i - 1],
                    s=ps.s_int(i + 1),
                    k=ps.k,
                    delta=ps.d(i),
                    B=A[i + 1],
                    ordering=order,
                )
                res = drc_select(
                    req,
                    T,
                    budgets.drc_trials,
                    child_seed(seed, "drc", i, attempt),
                    budget=budgets.count_budget,
                    min_size=ps.b_int(i),
                )
            except (DrcFailure, MedianPropertyViolation, GradedRamseyError) as exc:
                last = exc
                continue
            if ps.delta_sq and res.exact:
                frac = Fraction(res.bad_count, math.comb(len(res.A), ps.d(i)))
                if frac**2 > ps.delta_sq[i - 1]:
                    last = DrcFailure(f"bad fraction {frac} above δ_{i}", res.trace, res.bad_count)
                    continue
            A[i], j[i] = res.A, res.j_prime
            break
        else:
            return None, FailureTrace("drc", i, str(last), _report(last))
    return (A, j), None


def _report(exc) -> dict:
    if exc is None:
        return {}
    rep = {"type": type(exc).__name__}
    trace = getattr(exc, "trace", None)
    if trace is not None:
        rep["trace"] = {"interval_index": trace.interval_index, "M_size": len(trace.M), "trials": trace.trials}
    if getattr(exc, "witness", None) is not None:
        rep["witness"] = list(exc.witness)
    if getattr(exc, "event", None) is not None:
        rep["event"] = list(exc.event)
        rep["resample_count"] = exc.resample_count
    return rep


# ----------------------------------------------------------------------------
# forward phase
# ----------------------------------------------------------------------------


def _options(T: Tournament, D: GradedDigraph, phi, v, pool) -> tuple[int, ...]:
    """``N⁺(φ(N⁻(v))) ∩ pool``."""
    pool = np.asarray(pool, dtype=np.int64)
    keep = np.ones(pool.size, dtype=bool)
    for u in D.base.pred[v]:
        keep &= T.adj[phi[u], pool]
    return tuple(int(x) for x in pool[keep])


def _c_ladder(ps: ParameterSet, i: int, B_size: int) -> list[int]:
    """Slack targets for layer ``i``, most demanding first."""
    floor = ps.s_int(i + 1)
    if ps.mode != "fit":
        return [floor]
    top = max(floor, B_size >> max(ps.d(i), 0))
    out = []
    c = top
    while c > floor:
        out.append(c)
        c = max(floor, c // 2 if c > 2 * floor else floor)
    out.append(floor)
    return out


def _tail(T, D, phi, layer, pool, used):
    """Place ``layer`` greedily; fall back to a maximum matching."""
    opts = {v: [x for x in _options(T, D, phi, v, pool) if x not in used] for v in layer}
    order = sorted(layer, key=lambda v: (-len(D.base.pred[v]), v))
    taken = set()
    placed = {}
    for v in order:
        free = [x for x in opts[v] if x not in taken]
        if not free:
            break
        placed[v] = min(free)
        taken.add(placed[v])
    else:
        return placed
    verts = sorted(pool)
    col = {x: c for c, x in enumerate(verts)}
    rows, cols = [], []
    for r, v in enumerate(layer):
        for x in opts[v]:
            rows.append(r)
            cols.append(col[x])
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(len(layer), len(verts)))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if (match < 0).any():
        return None
    return {v: verts[int(match[r])] for r, v in enumerate(layer)}


def _forward(D, T, ps: ParameterSet, A, seed, restart, budgets):
    h = D.h
    phi = [-1] * D.n
    used: set[int] = set()
    resamples = 0
    for i in range(1, h):
        bip, left, right = D.layer_pair(i - 1)
        if i == 1:
            f = [tuple(A[1])] * len(left)
        else:
            f = [_options(T, D, phi, v, A[i]) for v in left]
        if any(not opts for opts in f):
            return None, FailureTrace("lll", i, "some vertex has an empty option list", resamples=resamples)
        b = ps.b_int(1) if i == 1 else ps.s_int(i)
        if ps.mode == "fit":
            b = min(len(o) for o in f)
        last = None
        done = None
        for c in _c_ladder(ps, i, len(A[i + 1])):
            for attempt in range(budgets.lll_retries):
                inst = LayerInstance(
                    bip, len(left), T, A[i], A[i + 1], f, max(b, 1), c,
                    ps.delta_sq[i - 1] if ps.delta_sq else None,
                )
                try:
                    emb = embed_layer(inst, budgets.lll_cap, child_seed(seed, "lll", restart, i, attempt))
                except LayerEmbeddingFailure as exc:
                    resamples += exc.resample_count
                    last = exc
                    continue
                resamples += emb.resample_count
                done = emb
                break
            if done is not None:
                break
        if done is None:
            return None, FailureTrace("lll", i, str(last), _report(last), resamples)
        for v, x in zip(left, done.phi):
            phi[v] = x
            used.add(x)
    top = list(D.layers[h - 1])
    if h == 1:
        placed = _tail(T, D, phi, top, A[1], used)
    else:
        placed = _tail(T, D, phi, top, A[h], used)
    if placed is None:
        return None, FailureTrace("tail", h, "no system of distinct representatives for the last layer", resamples=resamples)
    for v, x in placed.items():
        phi[v] = x
    return (phi, resamples), None


def find_embedding(
    D: GradedDigraph, T: Tournament, params: ParameterSet, seed: int = 0, budgets: Budgets | None = None
) -> EmbeddingMap | FailureTrace:
    """Run both phases; returns a verified :class:`EmbeddingMap` or a :class:`FailureTrace`."""
    budgets = budgets or Budgets()
    if params.mode == "theoretical" and T.n < params.N:
        return FailureTrace("setup", 0, f"host has {T.n} < N = {params.N} vertices")
    span = params.a_int(D.h) + 2 * params.k * sum(params.a_int(i) for i in range(1, D.h))
    if T.n < span:
        return FailureTrace("setup", 0, f"host has {T.n} vertices, the windows need {span}")
    order = local_median_order(T, child_seed(seed, "order"))
    back, fail = _backward(D, T, params, order, seed, budgets)
    if fail is not None:
        return fail
    A, j = back
    total = 0
    for restart in range(budgets.forward_restarts):
        fwd, fail = _forward(D, T, params, A, seed, restart, budgets)
        if fail is not None:
            total += fail.resamples
            continue
        phi, res = fwd
        ok, _ = verify_embedding(D, T, phi)
        if not ok:  # pragma: no cover - would be a bug in a phase above
            return FailureTrace("verify", 0, "assembled map is not an embedding", resamples=total + res)
        layers = tuple(tuple(phi[v] for v in layer) for layer in D.layers)
        return EmbeddingMap(tuple(phi), layers, True, total + res, tuple(j[1:]), tuple(A[1:]), restart)
    return FailureTrace(fail.phase, fail.layer, fail.message, fail.report, total)


def find_embedding_by_components(D: GradedDigraph, T: Tournament, fit, seed: int = 0, budgets: Budgets | None = None):
    """Embed each weak component into the vertices left over by the previous ones.

    ``fit(component, host_size)`` supplies the parameters for each piece.
    """
    from .digraph import infer_graded_partition

    phi = [-1] * D.n
    remaining = list(range(T.n))
    total = 0
    for ci, comp in enumerate(D.base.weak_components()):
        sub, labels = D.base.induced(comp)
        G = infer_graded_partition(sub)
        host = T.subtournament(remaining)
        res = find_embedding(G, host, fit(G, host.n), child_seed(seed, "component", ci), budgets)
        if isinstance(res, FailureTrace):
            return res
        total += res.resamples
        for local, x in enumerate(res.phi):
            phi[labels[local]] = remaining[x]
        used = {remaining[x] for x in res.phi}
        remaining = [x for x in remaining if x not in used]
    ok, _ = verify_embedding(D, T, phi)
    return EmbeddingMap(tuple(phi), tuple(tuple(phi[v] for v in layer) for layer in D.layers), ok, total, (), ())
