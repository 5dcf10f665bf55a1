import itertools

import numpy as np
import pytest

from graded_ramsey.digraph import cyclic_triangle, random_tournament, transitive_tournament
from graded_ramsey.median import (
    Ordering,
    exact_max_forward,
    forward_edge_count,
    local_median_order,
    relocation_stable,
    verify_median_property,
)


def brute_max_forward(t):
    return max(forward_edge_count(t, p) for p in itertools.permutations(range(t.n)))


@pytest.mark.parametrize("n", [1, 2, 5, 20, 60])
def test_local_order_has_median_property(n):
    for seed in range(10):
        t = random_tournament(n, seed)
        o = local_median_order(t, seed)
        assert sorted(o.perm) == list(range(n))
        assert o.forward_edges == forward_edge_count(t, o.perm)
        assert verify_median_property(t, o) == (True, None)
        assert relocation_stable(t, o)


def test_transitive_order_is_optimal():
    t = transitive_tournament(9)
    o = local_median_order(t, 3)
    assert o.forward_edges == 36
    assert list(o.perm) == list(range(9))


def test_violation_is_reported_1_based():
    t = transitive_tournament(4)
    ok, where = verify_median_property(t, [3, 2, 1, 0])
    assert not ok and where == (1, 2)


def test_violation_smallest_i_then_j():
    # TT_3 as 0, 2, 1: the window [2, 3) = {2} sends nothing into 1
    ok, where = verify_median_property(transitive_tournament(3), [0, 2, 1])
    assert not ok and where == (2, 3)
    assert verify_median_property(cyclic_triangle(), [0, 1, 2]) == (True, None)


def test_exact_dp_matches_permutations():
    for n in range(1, 8):
        for seed in range(5):
            t = random_tournament(n, 100 * n + seed)
            assert exact_max_forward(t) == brute_max_forward(t)


def test_restarts_never_worse():
    t = random_tournament(40, 11)
    one = local_median_order(t, 5, restarts=1)
    many = local_median_order(t, 5, restarts=6)
    assert many.forward_edges >= one.forward_edges


def test_deterministic():
    t = random_tournament(50, 2)
    assert local_median_order(t, 9) == local_median_order(t, 9)


def test_ordering_round_trip():
    o = local_median_order(random_tournament(12, 1), 0)
    assert Ordering.from_dict(o.to_dict()) == o
    assert np.array_equal(o.position()[list(o.perm)], np.arange(12))


def test_rejects_non_permutation():
    with pytest.raises(ValueError):
        verify_median_property(random_tournament(4, 0), [0, 0, 1, 2])
