import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graded_ramsey.digraph import (
    BlowupSpec,
    Digraph,
    GradedDigraph,
    Tournament,
    blowup,
    cyclic_triangle,
    directed_path,
    infer_graded_partition,
    make_grid,
    make_hypercube,
    mask_of,
    members,
    paley_tournament,
    random_graded_digraph,
    random_tournament,
    transitive_digraph,
    transitive_tournament,
)
from graded_ramsey.errors import BudgetExceeded, NotGraded, SizeMismatch


@pytest.mark.parametrize("bad", [[(0, 0)], [(0, 1), (0, 1)], [(0, 1), (1, 0)], [(0, 5)]])
def test_digraph_rejects_malformed_edges(bad):
    with pytest.raises(ValueError):
        Digraph(3, bad)


def test_grid_counts():
    # [k]^d has k^d vertices and d k^{d-1}(k-1) edges, height d(k-1)+1
    for d, k in [(1, 5), (2, 3), (2, 6), (3, 4)]:
        G = make_grid(d, k)
        assert G.n == k**d
        assert len(G.edges) == d * k ** (d - 1) * (k - 1)
        assert G.h == d * (k - 1) + 1
        assert G.max_in == d and G.max_out == d


def test_hypercube_layers_are_binomial():
    for d in range(0, 8):
        Q = make_hypercube(d)
        assert Q.sizes == [math.comb(d, i) for i in range(d + 1)]
        assert 2 * len(Q.edges) == d * 2**d
        # Δ⁻ of the pair (i, i+1) is i+1
        assert [Q.delta_in(i) for i in range(0, d + 2)] == [0] + list(range(1, d + 1)) + [0]


def test_hypercube_labels_match_edges():
    Q = make_hypercube(4)
    for u, v in Q.edges:
        diff = [a != b for a, b in zip(Q.labels[u], Q.labels[v])]
        assert sum(diff) == 1 and sum(Q.labels[v]) == sum(Q.labels[u]) + 1


def test_vertex_budget():
    with pytest.raises(BudgetExceeded):
        make_hypercube(12, budget=1000)


def test_graded_rejects_skipping_edge():
    with pytest.raises(NotGraded):
        GradedDigraph(Digraph(3, [(0, 2)]), ((0,), (1,), (2,)))


def test_infer_partition_recovers_generators(digraph_corpus):
    for _, G in digraph_corpus:
        H = infer_graded_partition(G.base)
        assert H.layers == G.layers


def test_infer_partition_cycle_witness():
    g = Digraph(3, [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(NotGraded) as exc:
        infer_graded_partition(g)
    assert exc.value.witness is not None


def test_infer_partition_transitive_triangle_not_graded():
    with pytest.raises(NotGraded):
        infer_graded_partition(transitive_digraph(3))


def test_random_graded_is_seeded_and_bounded():
    a = random_graded_digraph([3, 5, 4], 3, seed=7)
    b = random_graded_digraph([3, 5, 4], 3, seed=7)
    assert a == b
    assert a.sizes == [3, 5, 4]
    assert a.base.max_degree <= 3
    assert len(a.base.weak_components()) == 1


@given(st.integers(1, 12), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_tournament_bits_round_trip(n, seed):
    t = random_tournament(n, seed)
    assert Tournament.from_bits(n, t.bits) == t
    assert t.edge_count() == n * (n - 1) // 2
    assert np.array_equal(t.adj | t.adj.T, ~np.eye(n, dtype=bool))


def test_tournament_rejects_bad_input():
    with pytest.raises(SizeMismatch):
        Tournament.from_bits(4, "101")
    with pytest.raises(ValueError):
        Tournament(np.zeros((3, 3), dtype=bool))


def test_bitset_views_agree():
    t = random_tournament(70, 3)
    for v in range(t.n):
        assert members(t.out_bits[v]) == list(np.flatnonzero(t.adj[v]))
        assert mask_of(np.flatnonzero(t.adj[:, v])) == t.in_bits[v]
        words = t.out_words[v]
        assert sum(int(w) << (64 * i) for i, w in enumerate(words)) == t.out_bits[v]


def test_named_tournaments():
    assert cyclic_triangle().out_degree.tolist() == [1, 1, 1]
    assert transitive_tournament(5).out_degree.tolist() == [4, 3, 2, 1, 0]
    P = paley_tournament(7)
    assert set(P.out_degree.tolist()) == {3}
    with pytest.raises(ValueError):
        paley_tournament(5)


def test_blowup_orients_cross_edges_by_outer():
    outer = random_tournament(4, 1)
    spec = BlowupSpec(outer, (2, 3, 1, 4))
    T = blowup(spec, seed=5)
    parts = spec.parts()
    for i, j in itertools.permutations(range(4), 2):
        for u in parts[i]:
            for v in parts[j]:
                assert T.adj[u, v] == outer.adj[i, j]
    assert blowup(spec, seed=5) == T
    tt = blowup(BlowupSpec(outer, (3, 3, 3, 3), "transitive"))
    for p in BlowupSpec(outer, (3, 3, 3, 3)).parts():
        assert tt.subtournament(list(p)) == transitive_tournament(3)


def test_layer_pair_relabels_left_first():
    G = make_grid(2, 3)
    bip, left, right = G.layer_pair(1)
    assert bip.n == len(left) + len(right)
    for u, v in bip.edges:
        assert u < len(left) <= v


def test_path_shape():
    P = directed_path(6)
    assert P.h == 6 and P.sizes == [1] * 6
