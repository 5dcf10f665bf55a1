import math
from fractions import Fraction

import pytest

from graded_ramsey.digraph import Digraph, GradedDigraph, directed_path, make_grid, make_hypercube
from graded_ramsey.errors import DisconnectedReduction, InvalidRequest
from graded_ramsey.params import (
    check_parameters,
    compute_parameters,
    easy_bound,
    fit_parameters,
    hypercube_exact_layer_sum,
    hypercube_layer_sum,
    layer_sum,
    recurrence_holds,
    theorem_bound,
    uniform_layer_sum,
)


def cascade_n(sizes, deltas, eps):
    """n_i = (2+ε)^{2(Δ_{i-1}+Δ_i)} |V_i| + n_{i+1}/2, top-down."""
    out, nxt = [], Fraction(0)
    for i in range(len(sizes), 0, -1):
        nxt = (2 + eps) ** (2 * (deltas[i - 1] + deltas[i])) * sizes[i - 1] + nxt / 2
        out.append(nxt)
    return out[::-1]


def test_q3_frozen():
    ps = compute_parameters(make_hypercube(3))
    assert ps.eps == Fraction(2, 3) and ps.k == 16
    assert ps.deltas == (0, 1, 2, 3, 0)
    assert list(ps.n) == cascade_n([1, 3, 3, 1], ps.deltas, ps.eps)
    assert ps.n[-1] == Fraction(262144, 729)  # (8/3)^6
    assert ps.N == 3604011209336
    assert ps.ell == (2, 4, 6)
    assert ps.violated == ()
    assert layer_sum(make_hypercube(3)) == 3332
    assert theorem_bound(make_hypercube(3)) == 89964000000000


def test_cascade_invariants_on_corpus(digraph_corpus):
    for name, D in digraph_corpus:
        if D.h < 2:
            continue
        ps = compute_parameters(D)
        assert check_parameters(ps) == [], name
        assert recurrence_holds(ps), name
        assert list(ps.n) == cascade_n(D.sizes, ps.deltas, ps.eps), name
        for i in range(ps.h - 1):
            assert ps.a[i] >= ps.a[i + 1] / 2
        for i in range(ps.h):
            assert ps.s[i] >= 32 * D.sizes[i]


def test_delta_squared_matches_definition():
    D = make_grid(2, 3)
    ps = compute_parameters(D)
    dm, dp = 2, 2
    for i in range(1, ps.h):
        r = ps.s[i] / ps.b[i]
        d = ps.deltas[i]
        assert ps.delta_sq[i - 1] == r ** (2 * d) / (2**d * (4 * dm * dp) ** 2)


def test_scaled_mode_reports_failures():
    ps = compute_parameters(make_hypercube(3), "scaled")
    assert "literal constants" in ps.violated
    assert ps.N < compute_parameters(make_hypercube(3)).N


def test_unknown_mode():
    with pytest.raises(InvalidRequest):
        compute_parameters(make_hypercube(2), "other")


def test_edgeless_layers_need_components():
    D = GradedDigraph(Digraph(3, [(0, 1)]), ((0, 2), (1,)))
    assert compute_parameters(D).violated == ()
    E = GradedDigraph(Digraph(4, [(0, 1)]), ((0,), (1,), (2, 3)))
    with pytest.raises(DisconnectedReduction):
        compute_parameters(E)


@pytest.mark.parametrize("d", range(1, 13))
def test_hypercube_layer_sums(d):
    assert hypercube_layer_sum(d) == 4 * 17**d
    # layer i (weight i) has Δ⁻_{i-1} = i and Δ⁻_i = i + 1, except the top sentinel
    exact = sum(4 ** (i + (i + 1 if i < d else 0)) * math.comb(d, i) for i in range(d + 1))
    assert hypercube_exact_layer_sum(d) == exact
    if d <= 10:
        assert layer_sum(make_hypercube(d)) == exact <= 4 * 17**d


def test_theorem_bound_formula():
    G = make_grid(2, 4)
    ls = sum(4 ** (G.delta_in(i - 1) + G.delta_in(i)) * s for i, s in enumerate(G.sizes, 1))
    assert theorem_bound(G) == 10**9 * 2**2 * 2 * ls


def test_uniform_specialization():
    for sizes, delta, dp in [([3, 5, 2], 2, 3), ([1] * 7, 1, 1), ([4, 4], 4, 2)]:
        n = sum(sizes)
        assert 10**9 * delta**2 * dp * uniform_layer_sum(sizes, delta) == easy_bound(delta, dp, n)
        assert easy_bound(delta, dp, n) == 10**9 * dp * delta**2 * 2 ** (4 * delta) * n


def test_path_bound():
    # every Δ⁻_i is 1 except the sentinels: 4 + 16 (n-2) + 4
    for n in range(2, 9):
        assert layer_sum(directed_path(n)) == 16 * (n - 2) + 8


def test_fit_parameters_fit_host():
    D = make_grid(2, 4)
    for host in (200, 320, 1000):
        ps = fit_parameters(D, host)
        a = [int(x) for x in ps.a]
        assert a[-1] + 2 * ps.k * sum(a[:-1]) <= host
        assert all(x >= s for x, s in zip(a, D.sizes))
        assert all(a[i] >= -(-a[i + 1] // 2) for i in range(len(a) - 1))
        assert ps.ell == (0,) * (D.h - 1)
    with pytest.raises(InvalidRequest):
        fit_parameters(D, 10)


def test_to_dict_is_exact_strings():
    d = compute_parameters(make_hypercube(2)).to_dict()
    assert d["eps"] == "1" and all(isinstance(x, str) for x in d["n"])
