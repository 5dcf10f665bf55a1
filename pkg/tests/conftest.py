"""Shared generators and brute-force oracles for the test suite."""

from __future__ import annotations

import itertools
import math
import sys
from fractions import Fraction

import numpy as np
import pytest

from graded_ramsey.digraph import (
    Digraph,
    Tournament,
    directed_path,
    make_grid,
    make_hypercube,
    random_graded_digraph,
    random_tournament,
)
from graded_ramsey.drc import DrcRequest
from graded_ramsey.lll import LayerInstance
from graded_ramsey.median import local_median_order


def corpus():
    """The generator corpus: (name, graded digraph)."""
    out = [(f"grid-2-{k}", make_grid(2, k)) for k in range(2, 7)]
    out += [(f"grid-3-{k}", make_grid(3, k)) for k in (2, 3)]
    out += [(f"Q{d}", make_hypercube(d)) for d in range(0, 6)]
    out += [(f"path-{n}", directed_path(n)) for n in (1, 2, 5, 12)]
    shapes = [([3, 5, 4], 3), ([6, 6], 3), ([2, 4, 6, 4, 2], 3), ([8, 16, 16, 16, 8], 4), ([5, 3, 5, 3], 4), ([1, 4, 8], 4)]
    for seed, (layers, deg) in enumerate(shapes):
        out.append((f"random-{seed}", random_graded_digraph(layers, deg, seed)))
    return out


@pytest.fixture(scope="session")
def digraph_corpus():
    return corpus()


# ----------------------------------------------------------------------------
# oracles
# ----------------------------------------------------------------------------


def naive_contains(pattern: Digraph, host: Tournament):
    """First injective map (lexicographic) carrying every edge forward, or None."""
    edges = list(pattern.edges)
    for phi in itertools.permutations(range(host.n), pattern.n):
        if all(host.adj[phi[u], phi[v]] for u, v in edges):
            return phi
    return None


def naive_bad_count(A, B, delta, s, t: Tournament) -> int:
    """delta-subsets of A whose common out-neighbourhood in B has at most s vertices."""
    bad = 0
    for S in itertools.combinations(A, delta):
        common = sum(1 for y in B if all(t.adj[x, y] for x in S))
        bad += common <= s
    return bad


def naive_layer_ok(inst: LayerInstance, phi) -> bool:
    if len(set(phi)) != len(phi):
        return False
    if any(x not in inst.f[v] for v, x in enumerate(phi)):
        return False
    for u in range(inst.n_left, inst.d_bip.n):
        nu = [phi[v] for v in inst.d_bip.pred[u]]
        if sum(1 for y in inst.B if all(inst.t.adj[x, y] for x in nu)) < inst.c:
            return False
    return True


def exhaustive_layer(inst: LayerInstance):
    """Some valid phi by full search over the option lists, or None."""
    for phi in itertools.product(*inst.f):
        if naive_layer_ok(inst, phi):
            return phi
    return None


# ----------------------------------------------------------------------------
# instance generators
# ----------------------------------------------------------------------------


def layer_instance(seed: int, max_left: int = 3, b_size: int = 48) -> LayerInstance:
    """A layer instance meeting the local-lemma hypotheses.

    ``b = 32|V_1|``, ``a`` a little above ``b``, every list of size ``b``.
    ``c`` is the largest threshold whose bad-subset fraction ``x`` still
    satisfies the delta bound, and ``delta_sq = x²``.
    """
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, max_left + 1))
    q = int(rng.integers(1, 5))
    dmax = int(rng.integers(1, min(p, 2) + 1))
    edges = []
    for u in range(p, p + q):
        k = int(rng.integers(1, dmax + 1))
        for v in sorted(rng.choice(p, size=k, replace=False)):
            edges.append((int(v), u))
    D = Digraph(p + q, edges)
    dm, dp = max(D.max_in, 1), max(D.max_out, 1)
    b = 32 * p
    a = b + int(rng.integers(0, 9))
    t = random_tournament(a + b_size, int(rng.integers(2**31)))
    A = list(range(a))
    B = list(range(a, a + b_size))
    f = [sorted(int(x) for x in rng.choice(a, size=b, replace=False)) for _ in range(p)]
    rhs = Fraction(b, a) ** (2 * dm) / (2**dm * (4 * dp * dm) ** 2)
    total = math.comb(a, dm)
    rows = t.adj[np.ix_(A, B)]
    common = [int(rows[list(S)].all(axis=0).sum()) for S in itertools.combinations(range(a), dm)]
    c, frac = 0, Fraction(0)
    for cand in range(1, b_size + 1):
        x = Fraction(sum(1 for m in common if m < cand), total)
        if x * x > rhs:
            break
        c, frac = cand, x
    return LayerInstance(D, p, t, tuple(A), tuple(B), tuple(tuple(x) for x in f), b, c, frac * frac)


def drc_request(seed: int, N: int = 120) -> tuple[DrcRequest, Tournament]:
    """A valid request at desk scale: ``a' <= 30``, ``Δ⁻ <= 2``, ``ℓ <= 4``."""
    rng = np.random.default_rng(seed)
    t = random_tournament(N, seed)
    order = local_median_order(t, seed)
    k = 2
    a_prime = int(rng.integers(8, 21))
    a = int(rng.integers(a_prime, min(2 * a_prime, N - 2 * k * a_prime) + 1))
    j = int(rng.integers(2 * k * a_prime + 1, N - a + 2))
    window = list(order.perm[j - 1 : j - 1 + a])
    b = int(rng.integers(max(1, a // 2), a + 1))
    B = tuple(int(v) for v in rng.choice(window, size=b, replace=False))
    ell = int(rng.integers(0, 5))
    delta = int(rng.integers(1, 3))
    s = int(rng.integers(0, max(1, b // 4) + 1))
    req = DrcRequest(j, a, a_prime, b, ell, s, k, delta, B, order)
    return req, t


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance")
        for line in mod.LINES:
            terminalreporter.write_line(line)
