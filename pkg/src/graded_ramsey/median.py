"""Median orders: vertex orderings stable under single-vertex relocation.

A globally optimal ordering (most forward edges) is expensive to find, but
the downstream embedding only uses the half-in-neighbour property, which
every relocation-local optimum already has: if fewer than half of the
vertices in positions ``[j, i)`` beat ``v_i``, moving ``v_i`` to position
``j`` gains edges.  ``local_median_order`` therefore runs first-improvement
local search from a seeded random permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .digraph import Tournament
from .errors import SizeMismatch
from .rng import stream

EXACT_ORDER_LIMIT = 16


@dataclass(frozen=True)
class Ordering:
    perm: tuple[int, ...]
    forward_edges: int

    @property
    def n(self) -> int:
        return len(self.perm)

    def position(self) -> np.ndarray:
        """``position()[v]`` is the 0-based index of ``v`` in the order."""
        pos = np.empty(len(self.perm), dtype=np.int64)
        pos[list(self.perm)] = np.arange(len(self.perm))
        return pos

    def to_dict(self) -> dict:
        return {"schema": "graded-ramsey/ordering@1", "perm": list(self.perm), "forward_edges": self.forward_edges}

    @classmethod
    def from_dict(cls, data: dict) -> "Ordering":
        return cls(tuple(int(v) for v in data["perm"]), int(data["forward_edges"]))


def _check_perm(t: Tournament, perm) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (t.n,) or not np.array_equal(np.sort(perm), np.arange(t.n)):
        raise SizeMismatch(f"not a permutation of the {t.n} tournament vertices")
    return perm


def forward_edge_count(t: Tournament, perm) -> int:
    perm = _check_perm(t, perm)
    sub = t.adj[np.ix_(perm, perm)]
    return int(np.triu(sub, 1).sum())


def _sign(t: Tournament) -> np.ndarray:
    sign = np.where(t.adj, 1, -1).astype(np.int64)
    np.fill_diagonal(sign, 0)
    return sign


def local_median_order(t: Tournament, seed: int, restarts: int = 1) -> Ordering:
    """Relocation-stable ordering from local search.

    Each restart ``r`` starts from a permutation drawn from the
    ``("median", r)`` stream; the best result (ties to the earliest restart)
    is returned.
    """
    if t.n == 0:
        return Ordering((), 0)
    sign = _sign(t)
    best = None
    for r in range(max(1, restarts)):
        start = stream(seed, "median", r).permutation(t.n)
        perm, _ = kernels.relocation_search(sign, start)
        fe = forward_edge_count(t, perm)
        if best is None or fe > best.forward_edges:
            best = Ordering(tuple(int(v) for v in perm), fe)
    return best


def verify_median_property(t: Tournament, o: Ordering | list[int]):
    """Check ``d⁻(v_i, [j, i)) >= (i - j) / 2`` for all ``1 <= j < i <= N``.

    Returns ``(True, None)`` or ``(False, (j, i))`` with 1-based positions;
    the reported violation has the smallest ``i`` and, for it, the smallest
    ``j``.
    """
    perm = _check_perm(t, o.perm if isinstance(o, Ordering) else o)
    sub = t.adj[np.ix_(perm, perm)].astype(np.int64)
    for i in range(1, t.n):
        # beats[j] = 1 if v_j -> v_i for j < i
        col = sub[:i, i]
        # in-neighbours in [j, i) = suffix sums of col
        suffix = np.cumsum(col[::-1])[::-1]
        length = i - np.arange(i)
        bad = np.flatnonzero(2 * suffix < length)
        if bad.size:
            return False, (int(bad[0]) + 1, i + 1)
    return True, None


def relocation_stable(t: Tournament, o: Ordering) -> bool:
    """True iff no single relocation strictly increases the forward count."""
    perm = _check_perm(t, o.perm)
    _, gain = kernels.relocation_search(_sign(t), perm)
    return gain == 0


def exact_max_forward(t: Tournament) -> int:
    """Maximum forward-edge count over all orderings (subset DP, ``N <= 16``).

    ``best[S]`` is the optimum over orderings of the vertex set ``S`` placed
    first; appending ``v`` adds the edges from ``S`` into ``v``.
    """
    n = t.n
    if n > EXACT_ORDER_LIMIT:
        raise ValueError(f"exact ordering limited to N <= {EXACT_ORDER_LIMIT}")
    in_bits = t.in_bits
    best = np.full(1 << n, -1, dtype=np.int64)
    best[0] = 0
    for S in range(1 << n):
        b = best[S]
        if b < 0:
            continue
        for v in range(n):
            if S >> v & 1:
                continue
            T = S | (1 << v)
            cand = b + (in_bits[v] & S).bit_count()
            if cand > best[T]:
                best[T] = cand
    return int(best[(1 << n) - 1])
