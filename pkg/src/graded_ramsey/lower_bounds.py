"""Lower-bound constructions and small-scale checkers.

The pieces are a sparse random bipartite guest, a host tournament with few
edges between any two weighted halves, the pair (guest, blown-up host) and
the layered height-``h`` construction built from it.  The checkers return
:mod:`verdicts`: exhaustive modes may say :class:`Holds`, sampled and
heuristic modes never do.

Two constant profiles exist.  ``theoretical`` keeps ``1 < c1^2 < c0 <
(5/4)^(1/202)`` and is far outside anything checkable; ``scaled``
(``c0 = 1.5``, ``c1 = 1.2``) drives the desk experiments and sits outside
the hypotheses of the underlying lemmas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .digraph import Digraph, GradedDigraph, Tournament, random_tournament
from .errors import InvalidRequest
from .rng import child_seed, stream
from .verdicts import Holds, NoCounterexampleFound, Unknown, Violated

THEORETICAL_C0_MAX = 1.25 ** (1 / 202)
HOST_EXACT_MAX_K = 22
GUEST_EXACT_MAX_N = 18
MAX_HOST_VERTICES = 20000


# ----------------------------------------------------------------------------
# guest
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class GuestParams:
    n: int
    delta: int
    c0: float = 1.5
    c1: float = 1.2
    profile: str = "scaled"

    def __post_init__(self):
        if self.n < 1 or self.delta < 1:
            raise InvalidRequest("need n >= 1 and Δ >= 1")
        if self.profile not in ("scaled", "theoretical"):
            raise InvalidRequest(f"unknown profile {self.profile!r}")
        if self.profile == "theoretical" and not (1 < self.c1**2 < self.c0 < THEORETICAL_C0_MAX):
            raise InvalidRequest("theoretical constants need 1 < c1^2 < c0 < (5/4)^(1/202)")

    @classmethod
    def theoretical(cls, n: int, delta: int) -> "GuestParams":
        return cls(n, delta, c0=1.0011, c1=1.0005, profile="theoretical")

    @property
    def d(self) -> int:
        return max(1, self.delta // 101)

    @property
    def m(self) -> int:
        return math.ceil(Fraction(101, 100) * self.n)

    @property
    def trim(self) -> int:
        return math.ceil(Fraction(self.n, 100))

    @property
    def k(self) -> int:
        return max(2, round(self.c0**self.delta))


@dataclass(frozen=True)
class Guest:
    """Bipartite digraph with ``A = 0..n-1``, ``B = n..2n-1``, edges ``A -> B``."""

    digraph: Digraph
    n: int
    capped: int = 0

    @property
    def A(self) -> range:
        return range(self.n)

    @property
    def B(self) -> range:
        return range(self.n, 2 * self.n)

    def nbr_matrix(self) -> np.ndarray:
        nbr = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.digraph.edges:
            nbr[u, v - self.n] = True
        return nbr

    def to_graded(self) -> GradedDigraph:
        return GradedDigraph(self.digraph, (tuple(self.A), tuple(self.B)))


def complete_guest(delta: int) -> Guest:
    """``K_{Δ,Δ}`` with every edge oriented ``A -> B``."""
    edges = tuple((u, delta + v) for u in range(delta) for v in range(delta))
    return Guest(Digraph(2 * delta, edges), delta)


def sample_guest(p: GuestParams, seed: int) -> Guest:
    """Uniform bipartite graph with ``d*m`` edges on ``m + m`` vertices, trimmed.

    The ``trim`` highest-degree vertices of each side are removed (ties go
    to the lower index), which leaves exactly ``n`` per side.  For
    ``Δ >= 101`` the trim alone bounds the degree by ``Δ``; below that the
    edge count ``d*m`` uses ``d = 1`` and the few vertices still above
    ``Δ`` lose their highest-index edges (counted in ``capped``).
    """
    m, n, d = p.m, p.n, p.d
    total = d * m
    if total < 1:
        raise InvalidRequest("rounding leaves no edges")
    if total > m * m:
        raise InvalidRequest(f"{total} edges do not fit in K_{{{m},{m}}}")
    rng = stream(seed, "guest")
    cells = np.sort(rng.choice(m * m, size=total, replace=False))
    left, right = np.divmod(cells, m)
    deg_l = np.bincount(left, minlength=m)
    deg_r = np.bincount(right, minlength=m)

    def keep(deg):
        drop = sorted(range(m), key=lambda v: (-int(deg[v]), v))[: p.trim]
        kept = [v for v in range(m) if v not in set(drop)]
        return {v: i for i, v in enumerate(kept)}

    kl, kr = keep(deg_l), keep(deg_r)
    adj: dict[int, list[int]] = {}
    for u, v in zip(left.tolist(), right.tolist()):
        if u in kl and v in kr:
            adj.setdefault(kl[u], []).append(kr[v])
    deg_a, deg_b = [0] * n, [0] * n
    edges = []
    capped = 0
    for u in sorted(adj):
        for v in sorted(adj[u]):
            if deg_a[u] >= p.delta or deg_b[v] >= p.delta:
                capped += 1
                continue
            deg_a[u] += 1
            deg_b[v] += 1
            edges.append((u, n + v))
    return Guest(Digraph(2 * n, tuple(edges)), n, capped)


def _empty_pair(nbr: np.ndarray, X) -> tuple[list[int], list[int]]:
    """Grow ``X`` to a maximal edge-free pair ``(X', Y')``."""
    X = list(X)
    if X:
        Y = np.flatnonzero(~nbr[X].any(axis=0))
    else:
        Y = np.arange(nbr.shape[1])
    Xs = np.flatnonzero(~nbr[:, Y].any(axis=1)) if Y.size else np.arange(nbr.shape[0])
    return [int(x) for x in Xs], [int(y) for y in Y]


def check_guest_intersection(
    guest: Guest, alpha: float, mode: str = "exact", budget: int = 2000, seed: int = 0
):
    """Every ``X' ⊆ A``, ``Y' ⊆ B`` with ``|X'|, |Y'| >= αn`` spans an edge.

    ``exact`` searches all ``t``-subsets of ``A`` (``t = ⌈αn⌉``): a larger
    empty pair always contains an empty pair of ``t``-sets.  ``heuristic``
    runs ``budget`` swap steps of local search over ``X'``.  Witnesses are
    maximal empty pairs in guest labels (``B`` offset by ``n``).
    """
    n = guest.n
    t = max(1, math.ceil(Fraction(alpha).limit_denominator(10**6) * n))
    nbr = guest.nbr_matrix()
    detail = {"mode": mode, "t": t, "n": n}
    if t > n:
        return Holds(detail)
    if mode == "exact":
        if n > GUEST_EXACT_MAX_N:
            raise InvalidRequest(f"exact mode needs n <= {GUEST_EXACT_MAX_N}, got {n}")
        X = kernels.guest_exact(nbr, t)
        if X is None:
            return Holds(detail)
        Xs, Ys = _empty_pair(nbr, X)
        return Violated((Xs, [n + y for y in Ys]), detail)
    if mode != "heuristic":
        raise InvalidRequest(f"unknown mode {mode!r}")
    rng = stream(seed, "guest-heuristic")
    steps = 0
    while steps < budget:
        X = list(rng.choice(n, size=t, replace=False))
        free = int((~nbr[X].any(axis=0)).sum())
        while steps < budget:
            steps += 1
            if free >= t:
                Xs, Ys = _empty_pair(nbr, X)
                return Violated((Xs, [n + y for y in Ys]), {**detail, "steps": steps})
            # swap out the member with most private neighbours for the best outsider
            cover = nbr[X].sum(axis=0)
            private = [int((nbr[x] & (cover == 1)).sum()) for x in X]
            out_i = int(np.argmax(private))
            rest = [y for y in range(n) if y not in X]
            if not rest:
                break
            base = cover - nbr[X[out_i]]
            gains = [int(((base + nbr[y]) == 0).sum()) for y in rest]
            best = int(np.argmax(gains))
            if gains[best] <= free:
                break
            X[out_i] = rest[best]
            free = gains[best]
    return NoCounterexampleFound(budget, {**detail, "steps": steps})


def partition_sum(nbr: np.ndarray, X_parts, Y_parts) -> int:
    """``Σ_{i≠j, e(X_i, Y_j) > 0} |X_i||Y_j|``."""
    total = 0
    for i, X in enumerate(X_parts):
        if not len(X):
            continue
        hit = nbr[list(X)].any(axis=0)
        for j, Y in enumerate(Y_parts):
            if i != j and len(Y) and hit[list(Y)].any():
                total += len(X) * len(Y)
    return total


def _random_partition(rng, n, k, part_cap, dust_cap):
    order = rng.permutation(n)
    lo = max(0, n - k * part_cap)
    dust = int(rng.integers(lo, min(dust_cap, n) + 1))
    parts: list[list[int]] = [[] for _ in range(k)]
    room = [part_cap] * k
    for v in order[dust:]:
        open_ = [i for i in range(k) if room[i] > 0]
        i = open_[int(rng.integers(len(open_)))]
        parts[i].append(int(v))
        room[i] -= 1
    return parts, sorted(int(v) for v in order[:dust])


def check_guest_partition(guest: Guest, k: int, part_cap: int, dust_cap: int, trials: int = 1000, seed: int = 0):
    """Sampled search for a partition with a small cross sum.

    Each trial draws partitions of both sides into ``k`` parts of size at
    most ``part_cap`` plus a dust set of at most ``dust_cap``, and compares
    the cross sum with ``0.55 (0.98 n)^2``.  ``detail["running_min"]`` is
    the minimum after each trial.
    """
    n = guest.n
    if k < 1 or part_cap < 0 or dust_cap < 0 or k * part_cap + dust_cap < n:
        raise InvalidRequest("caps admit no partition")
    threshold = Fraction(55, 100) * (Fraction(98, 100) * n) ** 2
    nbr = guest.nbr_matrix()
    rng = stream(seed, "guest-partition")
    best, witness, running = None, None, []
    for _ in range(trials):
        Xp, Xd = _random_partition(rng, n, k, part_cap, dust_cap)
        Yp, Yd = _random_partition(rng, n, k, part_cap, dust_cap)
        val = partition_sum(nbr, Xp, Yp)
        if best is None or val < best:
            best, witness = val, (Xp, Xd, [[n + y for y in P] for P in Yp], [n + y for y in Yd])
        running.append(best)
    detail = {"threshold": str(threshold), "minimum": best, "running_min": running, "trials": trials}
    if best is not None and best <= threshold:
        return Violated(witness, detail)
    return NoCounterexampleFound(trials, detail)


# ----------------------------------------------------------------------------
# host
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class HostParams:
    k: int
    x: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))

    @property
    def threshold(self) -> Fraction:
        return Fraction(51, 100) * self.x**2

    @property
    def s0(self) -> float:
        return 2e7 * math.log(self.k) if self.k > 1 else 0.0

    @property
    def in_hypothesis(self) -> bool:
        """``x >= 10^8 log k / 2``, where the random host is guaranteed to work."""
        return self.k >= 2 and float(self.x) >= 1e8 * math.log(self.k) / 2


def _fill(two_x: Fraction, adj, T: set[int], i0: int):
    """Best weight pair with ``f = 1_T + α 1_{i0}`` (exact).

    ``g`` fills the remaining vertices greedily by in-weight from ``f``;
    the value is piecewise quadratic in ``α`` and maximised per piece.
    Returns ``(W, f, g)`` or ``None`` when no admissible pair exists.
    """
    k = len(adj)
    R = two_x - len(T)
    if R < 0:
        return None
    w = [sum(int(adj[i][j]) for i in T) for j in range(k)]
    e = [int(adj[i0][j]) if i0 >= 0 else 0 for j in range(k)]
    order = sorted((j for j in range(k) if j not in T and j != i0), key=lambda j: (-w[j], -e[j], j))
    cap = len(order)
    lo = max(Fraction(0), R - cap) if i0 >= 0 else Fraction(0)
    hi = min(Fraction(1), R) if i0 >= 0 else Fraction(0)
    if i0 < 0 and R > cap:
        return None
    if lo > hi:
        return None

    def value(a):
        G = R - a
        g = [Fraction(0)] * k
        for j in order:
            take = min(Fraction(1), G)
            if take <= 0:
                break
            g[j] = take
            G -= take
        W = sum(g[j] * (w[j] + a * e[j]) for j in range(k))
        return W, g

    cands = {lo, hi}
    frac = R - math.floor(R)
    if lo < frac < hi:
        cands.add(frac)
    pts = sorted(cands)
    for a0, a1 in zip(pts[:-1], pts[1:]):
        mid = (a0 + a1) / 2
        m = min(math.floor(R - mid), cap)
        wm = w[order[m]] if m < cap else 0
        em = e[order[m]] if m < cap else 0
        c1 = sum(e[order[r]] for r in range(m)) + (R - m) * em - wm
        c2 = -em
        if c2 < 0:
            star = Fraction(-c1, 2 * c2)
            if a0 < star < a1:
                cands.add(star)
    best = None
    for a in sorted(cands):
        W, g = value(a)
        if best is None or W > best[0]:
            f = [Fraction(int(i in T)) for i in range(k)]
            if i0 >= 0:
                f[i0] = a
            best = (W, f, g)
    return best


def check_host(R: Tournament, x, mode: str = "exact", trials: int = 2000, seed: int = 0):
    """Is ``Σ_{i→j} f(i) g(j) <= 0.51 x^2`` for all admissible weight pairs?

    Admissible: ``f, g: [k] -> [0, 1]``, ``f + g <= 1``, ``Σ (f + g) = 2x``.
    Maximisers may be taken with disjoint supports, integral ``g`` apart
    from its greedy boundary and at most one fractional ``f`` coordinate,
    so ``exact`` enumerates ``(T, i0)`` in the compiled kernel and then
    recomputes the winning pair in rationals.  ``sampled`` scores random
    ``(T, i0)`` in rationals only.
    """
    hp = HostParams(R.n, Fraction(x))
    two_x = 2 * hp.x
    adj = R.adj.tolist()
    detail = {"mode": mode, "k": R.n, "x": str(hp.x), "threshold": str(hp.threshold), "in_hypothesis": hp.in_hypothesis}
    if two_x > R.n:
        return Holds({**detail, "W": None, "note": "no admissible weight pair"})
    if mode == "exact":
        if R.n > HOST_EXACT_MAX_K:
            raise InvalidRequest(f"exact mode needs k <= {HOST_EXACT_MAX_K}, got {R.n}")
        _, T_mask, i0, _ = kernels.host_exact(R.adj, float(two_x))
        T = {i for i in range(R.n) if T_mask >> i & 1}
        W, f, g = _fill(two_x, adj, T, i0)
        detail = {**detail, "W": str(W), "f": [str(v) for v in f], "g": [str(v) for v in g]}
        if W > hp.threshold:
            return Violated({"f": f, "g": g, "W": W}, detail)
        return Holds(detail)
    if mode != "sampled":
        raise InvalidRequest(f"unknown mode {mode!r}")
    rng = stream(seed, "host-sampled")
    best = None
    tmax = math.floor(two_x)
    for _ in range(trials):
        t = int(rng.integers(0, tmax + 1))
        T = set(int(v) for v in rng.choice(R.n, size=min(t, R.n), replace=False))
        rest = [i for i in range(R.n) if i not in T]
        i0 = int(rest[int(rng.integers(len(rest)))]) if rest and rng.random() < 0.5 else -1
        res = _fill(two_x, adj, T, i0)
        if res is not None and (best is None or res[0] > best[0]):
            best = res
    if best is None:
        return NoCounterexampleFound(trials, {**detail, "W": None})
    detail = {**detail, "W": str(best[0])}
    if best[0] > hp.threshold:
        return Violated({"f": best[1], "g": best[2], "W": best[0]}, detail)
    return NoCounterexampleFound(trials, detail)


# ----------------------------------------------------------------------------
# bipartite pair and layered construction
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class BipartitePair:
    guest: Guest
    host: Tournament
    branch: str  # "small" | "large"
    parts: tuple[range, ...]
    outer: Tournament | None = None


def pair_cutoff(delta: int, c0: float = 1.5) -> float:
    return 2 * c0**delta / 0.98


def build_bipartite_pair(n: int, delta: int, seed: int, c0: float = 1.5, c1: float = 1.2, max_host: int = MAX_HOST_VERTICES) -> BipartitePair:
    """Guest and host for one degree class ``Δ`` (the per-side degree).

    Below the cutoff ``(2/0.98) c0^Δ`` the guest is ``K_{Δ,Δ}`` and the host
    a random tournament on ``⌊2^{⌊0.98Δ⌋/2}⌋`` vertices.  Above it the guest
    is sampled and the host blows up a random tournament on
    ``k = round(c0^Δ)`` vertices into parts of ``⌈c1^Δ n / k⌉``.
    """
    if n < delta:
        raise InvalidRequest("need n >= Δ")
    if n < pair_cutoff(delta, c0):
        size = max(1, math.floor(2 ** (math.floor(0.98 * delta) / 2)))
        host = random_tournament(size, child_seed(seed, "pair-host"))
        return BipartitePair(complete_guest(delta), host, "small", (range(size),))
    gp = GuestParams(n, delta, c0, c1)
    guest = sample_guest(gp, child_seed(seed, "pair-guest"))
    k = gp.k
    part = max(1, math.ceil(c1**delta * n / k))
    if k * part > max_host:
        part = max(1, max_host // k)
        warnings.warn(f"host capped at {k * part} vertices", stacklevel=2)
    outer = random_tournament(k, child_seed(seed, "pair-outer"))
    part_of = np.repeat(np.arange(k), part)
    adj = outer.adj[np.ix_(part_of, part_of)].copy()
    for i in range(k):
        sl = slice(i * part, (i + 1) * part)
        adj[sl, sl] = random_tournament(part, child_seed(seed, "pair-inner", i)).adj
    parts = tuple(range(i * part, (i + 1) * part) for i in range(k))
    return BipartitePair(guest, Tournament(adj), "large", parts, outer)


@dataclass(frozen=True)
class LayeredConstruction:
    D: GradedDigraph
    T: Tournament
    parts: tuple[range, ...]
    pair: BipartitePair
    H: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "schema": "graded-ramsey/layered@1",
            "h": self.D.h,
            "H": self.H,
            "layer_size": len(self.D.layers[0]),
            "branch": self.pair.branch,
            "seed": self.seed,
            "digraph": {"n": self.D.n, "edges": [list(e) for e in self.D.edges]},
            "tournament": {"n": self.T.n, "bits": self.T.bits},
            "parts": [[p.start, p.stop] for p in self.parts],
        }


def build_layered(n: int, delta: int, h: int, seed: int, c0: float = 1.5, c1: float = 1.2, max_host: int = MAX_HOST_VERTICES) -> LayeredConstruction:
    """Height-``h`` guest made of consecutive guest copies, and its host.

    The pair is built for per-side degree ``⌊Δ/2⌋``.  Layer ``V_i`` plays
    the role of ``A`` towards ``V_{i+1}`` and of ``B`` towards ``V_{i-1}``.
    The host has ``H = max(1, ⌈h/2⌉ - 1)`` copies of the pair host, with
    every edge between copies pointing to the later copy.
    """
    if h < 2 or delta < 2:
        raise InvalidRequest("need h >= 2 and Δ >= 2")
    pair = build_bipartite_pair(n, delta // 2, child_seed(seed, "layered-pair"), c0, c1, max_host)
    s = pair.guest.n
    if h == 2:
        return LayeredConstruction(pair.guest.to_graded(), pair.host, (range(pair.host.n),), pair, 1, seed)
    edges = []
    for i in range(h - 1):
        for u, v in pair.guest.digraph.edges:
            edges.append((i * s + u, i * s + v))  # v already carries the +s offset
    layers = tuple(tuple(range(i * s, (i + 1) * s)) for i in range(h))
    D = GradedDigraph(Digraph(h * s, tuple(edges)), layers)
    H = max(1, math.ceil(h / 2) - 1)
    r = pair.host.n
    if H * r > max_host:
        raise InvalidRequest(f"host on {H * r} vertices exceeds the budget {max_host}")
    adj = np.zeros((H * r, H * r), dtype=bool)
    for i in range(H):
        adj[i * r : (i + 1) * r, (i + 1) * r :] = True
        adj[i * r : (i + 1) * r, i * r : (i + 1) * r] = pair.host.adj
    parts = tuple(range(i * r, (i + 1) * r) for i in range(H))
    return LayeredConstruction(D, Tournament(adj), parts, pair, H, seed)


def check_no_copy(D, T: Tournament, mode: str = "exact", budget: int = 10**7, attempts: int = 1000, seed: int = 0, node_budget: int = 20000):
    """Is there no copy of ``D`` in ``T``?

    ``exact`` runs the exhaustive containment search.  ``randomized`` makes
    ``attempts`` budgeted searches on randomly relabelled hosts and, for
    graded ``D``, a few pipeline runs; a found copy is a verified
    :class:`Violated`, otherwise the answer is one-sided.
    """
    from .exact import contains
    from .pipeline import find_embedding, verify_embedding

    if mode == "exact":
        res = contains(D, T, budget=budget)
        if res.status == "found":
            return Violated(list(res.witness), {"mode": mode, "nodes": res.nodes})
        if res.status == "absent":
            return Holds({"mode": mode, "nodes": res.nodes})
        return Unknown("node budget exhausted", {"mode": mode, "nodes": res.nodes})
    if mode != "randomized":
        raise InvalidRequest(f"unknown mode {mode!r}")
    if isinstance(D, GradedDigraph) and D.h >= 2:
        from .params import fit_parameters

        try:
            ps = fit_parameters(D, T.n)
        except Exception:  # host too small for the windows
            ps = None
        for r in range(min(8, attempts) if ps is not None else 0):
            out = find_embedding(D, T, ps, child_seed(seed, "no-copy-pipeline", r))
            if hasattr(out, "phi") and verify_embedding(D, T, out.phi)[0]:
                return Violated(list(out.phi), {"mode": mode, "attempt": r, "via": "pipeline"})
    for r in range(attempts):
        perm = stream(seed, "no-copy", r).permutation(T.n)
        res = contains(D, T.subtournament(perm), budget=node_budget)
        if res.status == "found":
            phi = [int(perm[x]) for x in res.witness]
            assert verify_embedding(D, T, phi)[0]
            return Violated(phi, {"mode": mode, "attempt": r, "via": "search"})
        if res.status == "absent":
            return Holds({"mode": mode, "attempt": r, "nodes": res.nodes, "via": "exhaustive search"})
    return NoCounterexampleFound(attempts, {"mode": mode, "node_budget": node_budget})


# ----------------------------------------------------------------------------
# monotone index audit
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditReport:
    H: int
    fractions: tuple[tuple[Fraction, ...], ...]  # f_i(U_j), i = 1..h, j = 1..H
    j: tuple[int, ...]
    failures: tuple[tuple, ...]
    key_failures: tuple[tuple[int, int], ...] = ()

    @property
    def consistent(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "schema": "graded-ramsey/audit@1",
            "H": self.H,
            "fractions": [[str(x) for x in row] for row in self.fractions],
            "j": list(self.j),
            "failures": [list(f) for f in self.failures],
            "key_failures": [list(k) for k in self.key_failures],
            "consistent": self.consistent,
        }


def monotone_index_audit(D: GradedDigraph, parts, phi) -> AuditReport:
    """Suffix fractions ``f_i(U_j)`` and top indices ``j_i`` for a claimed map.

    ``U_j`` is the union of parts ``j..H``; ``j_i`` is the largest ``j`` with
    ``f_i(U_j) >= 0.99``.  Failures are reported as ``("monotone", i)`` for
    ``j_{i+1} < j_i`` and ``("strict", i)`` for ``j_{i+2} <= j_i`` (1-based).
    When ``H < h/2`` no map can pass both.  ``key_failures`` lists the
    ``(i, j)`` with ``f_i(U_j) >= 0.01`` but ``f_{i+1}(U_j) < 0.99``; a valid
    map with an intersecting guest has none.
    """
    H = len(parts)
    part_of = {}
    for pi, part in enumerate(parts):
        for x in part:
            part_of[int(x)] = pi + 1
    hi, lo = Fraction(99, 100), Fraction(1, 100)
    fractions, js = [], []
    for layer in D.layers:
        counts = [0] * (H + 2)
        for v in layer:
            counts[part_of.get(int(phi[v]), 0)] += 1
        row = []
        suffix = 0
        for j in range(H, 0, -1):
            suffix += counts[j]
            row.append(Fraction(suffix, len(layer)))
        row.reverse()
        fractions.append(tuple(row))
        js.append(max((j for j in range(1, H + 1) if row[j - 1] >= hi), default=0))
    h = D.h
    failures = []
    for i in range(h - 1):
        if js[i + 1] < js[i]:
            failures.append(("monotone", i + 1))
    for i in range(h - 2):
        if js[i + 2] <= js[i]:
            failures.append(("strict", i + 1))
    key = []
    for i in range(h - 1):
        for j in range(1, H + 1):
            if fractions[i][j - 1] >= lo and fractions[i + 1][j - 1] < hi:
                key.append((i + 1, j))
    return AuditReport(H, tuple(fractions), tuple(js), tuple(failures), tuple(key))
