"""The constant cascade of the upper-bound embedding and the bound formulas.

Everything is exact: ``Fraction`` for the cascade, Python ints for bounds.
``δ_i`` carries a factor ``2^{-Δ_i/2}`` and is irrational for odd ``Δ_i``,
so it is stored squared.  Layers are 1-based (``i = 1..h``) with the
sentinels ``Δ⁻_0 = Δ⁻_h = 0``.

Three modes share the same shape:

``theoretical``
    The literal constants ``c_s = 32``, ``c_b = 2000 Δ⁺ Δ⁻ c_s``,
    ``c_a = 2 c_b`` and ``k = 4Δ⁻ + 4``.
``scaled``
    The same cascade with ``(c_s, c_b, c_a)`` multiplied by shrink factors;
    the proof inequalities that then fail are listed in ``violated``.
``fit``
    Desk-scale sizing for a given host: interval lengths ``a_i`` follow the
    shape of ``n_i`` with a tunable growth base and are scaled so that the
    worst-case span ``a_h + 2k Σ_{i<h} a_i`` fits the host.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .digraph import GradedDigraph
from .errors import DisconnectedReduction, InvalidRequest

THEOREM_CONSTANT = 10**9
DEFAULT_SHRINK = (Fraction(1, 4), Fraction(1, 1000), Fraction(1, 1000))


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class ParameterSet:
    mode: str
    h: int
    sizes: tuple[int, ...]
    deltas: tuple[int, ...]  # Δ⁻_0 .. Δ⁻_h
    delta_in: int
    delta_out: int
    eps: Fraction
    k: int
    c_s: Fraction
    c_b: Fraction
    c_a: Fraction
    n: tuple[Fraction, ...]  # n_1 .. n_h
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    s: tuple[Fraction, ...]
    delta_sq: tuple[Fraction, ...]  # δ_1² .. δ_{h-1}²
    o: tuple[Fraction, ...]
    N: int
    ell: tuple[int, ...]  # ℓ_1 .. ℓ_{h-1}
    violated: tuple[str, ...] = ()
    shrink: tuple[Fraction, Fraction, Fraction] | None = None
    notes: dict = field(default_factory=dict)

    # 1-based accessors, integer sizes rounded up
    def a_int(self, i: int) -> int:
        return _ceil(self.a[i - 1])

    def b_int(self, i: int) -> int:
        return _ceil(self.b[i - 1])

    def s_int(self, i: int) -> int:
        return _ceil(self.s[i - 1])

    def d(self, i: int) -> int:
        return self.deltas[i]

    def to_dict(self) -> dict:
        fr = lambda xs: [str(x) for x in xs]  # noqa: E731
        return {
            "schema": "graded-ramsey/parameters@1",
            "mode": self.mode,
            "h": self.h,
            "sizes": list(self.sizes),
            "deltas": list(self.deltas),
            "delta_in": self.delta_in,
            "delta_out": self.delta_out,
            "eps": str(self.eps),
            "k": self.k,
            "c_s": str(self.c_s),
            "c_b": str(self.c_b),
            "c_a": str(self.c_a),
            "n": fr(self.n),
            "a": fr(self.a),
            "b": fr(self.b),
            "s": fr(self.s),
            "delta_sq": fr(self.delta_sq),
            "o": fr(self.o),
            "N": self.N,
            "ell": list(self.ell),
            "violated": list(self.violated),
        }


def _profile(D: GradedDigraph):
    h = D.h
    deltas = tuple(D.delta_in(i) for i in range(h + 1))
    missing = [i for i in range(1, h) if deltas[i] == 0]
    if missing:
        raise DisconnectedReduction(
            f"layers {missing[0]} and {missing[0] + 1} share no edge; embed each component separately",
            D.base.weak_components(),
        )
    return h, tuple(D.sizes), deltas


def _n_values(sizes, deltas, base: Fraction) -> list[Fraction]:
    h = len(sizes)
    n = [Fraction(0)] * (h + 2)
    for i in range(h, 0, -1):
        n[i] = base ** (deltas[i - 1] + deltas[i]) * sizes[i - 1] + n[i + 1] / 2
    return n[1 : h + 1]


def _cascade(D, c_s, c_b_unit, c_a_unit):
    h, sizes, deltas = _profile(D)
    dm, dp = max(D.max_in, 1), max(D.max_out, 1)
    eps = Fraction(2, dm)
    k = 4 * dm + 4
    g = (2 + eps) ** 2
    c_b = c_b_unit * dp * dm
    c_a = c_a_unit * dp * dm
    n = _n_values(sizes, deltas, g)
    a = [c_a * x for x in n]
    b = [c_b * x / g ** deltas[i + 1] for i, x in enumerate(n)]
    s = [c_s * x / g ** (deltas[i + 1] + deltas[i]) for i, x in enumerate(n)]
    dsq = []
    for i in range(1, h):
        r = s[i] / b[i]  # s_{i+1} / b_{i+1}
        dsq.append(r ** (2 * deltas[i]) / (2 ** deltas[i] * (4 * dm * dp) ** 2))
    o = [2 * k * sum(a[i - 1 :]) for i in range(1, h + 1)]
    ell = tuple(2 * deltas[i] for i in range(1, h))
    return h, sizes, deltas, dm, dp, eps, k, c_b, c_a, n, a, b, s, dsq, o, ell


def compute_parameters(D: GradedDigraph, mode: str = "theoretical", shrink=None) -> ParameterSet:
    """The exact cascade for ``D`` in ``theoretical`` or ``scaled`` mode.

    ``shrink`` multiplies ``(c_s, c_b, c_a)``; scaled mode defaults to
    ``DEFAULT_SHRINK`` (``c_s = 8``, ``c_b = 64 Δ⁺Δ⁻``, ``c_a = 128 Δ⁺Δ⁻``).
    """
    if mode not in ("theoretical", "scaled"):
        raise InvalidRequest(f"unknown mode {mode!r}")
    if mode == "theoretical":
        shrink = (Fraction(1), Fraction(1), Fraction(1))
    elif shrink is None:
        shrink = DEFAULT_SHRINK
    shrink = tuple(Fraction(x) for x in shrink)
    c_s = 32 * shrink[0]
    c_b_unit = 2000 * 32 * shrink[1]
    c_a_unit = 2 * 2000 * 32 * shrink[2]
    h, sizes, deltas, dm, dp, eps, k, c_b, c_a, n, a, b, s, dsq, o, ell = _cascade(D, c_s, c_b_unit, c_a_unit)
    ps = ParameterSet(
        mode, h, sizes, deltas, D.max_in, D.max_out, eps, k, c_s, c_b, c_a,
        tuple(n), tuple(a), tuple(b), tuple(s), tuple(dsq), tuple(o), _ceil(o[0]), ell,
        shrink=shrink,
    )
    bad = tuple(check_parameters(ps))
    return ParameterSet(**{**ps.__dict__, "violated": bad})


def check_parameters(ps: ParameterSet) -> list[str]:
    """Names of the proof inequalities that fail for ``ps`` (exact)."""
    out = []
    h, d = ps.h, ps.deltas
    g = (2 + ps.eps) ** 2
    if Fraction(2 * ps.k, ps.k - 1) > 2 + ps.eps:
        out.append("2k/(k-1) <= 2+eps")
    for i in range(1, h + 1):
        nxt = ps.n[i] if i < h else Fraction(0)
        if ps.mode != "fit" and ps.n[i - 1] != g ** (d[i - 1] + d[i]) * ps.sizes[i - 1] + nxt / 2:
            out.append(f"recurrence n_{i}")
        if i < h and ps.a[i - 1] < ps.a[i] / 2:
            out.append(f"a_{i} >= a_{i + 1}/2")
        if ps.s[i - 1] < 32 * ps.sizes[i - 1]:
            out.append(f"s_{i} >= 32|V_{i}|")
    if ps.mode != "fit":
        if ps.c_s != 32 or ps.c_b != 2000 * ps.c_s * max(ps.delta_in, 1) * max(ps.delta_out, 1):
            out.append("literal constants")
    return out


def recurrence_holds(ps: ParameterSet) -> bool:
    g = (2 + ps.eps) ** 2
    d = ps.deltas
    for i in range(1, ps.h + 1):
        nxt = ps.n[i] if i < ps.h else Fraction(0)
        if ps.n[i - 1] != g ** (d[i - 1] + d[i]) * ps.sizes[i - 1] + nxt / 2:
            return False
    return True


def fit_parameters(
    D: GradedDigraph,
    host_size: int,
    k: int = 2,
    growth: Fraction | int = 2,
    ell_factor: Fraction | int = 0,
    list_ratio: Fraction = Fraction(1),
) -> ParameterSet:
    """Desk-scale sizes for a host on ``host_size`` vertices.

    ``a_i`` is proportional to ``growth^{Δ⁻_{i-1}} |V_i|``, the expected
    shrinkage of a common out-neighbourhood of an in-neighbourhood, scaled
    to the largest factor with
    ``a_h + 2k Σ_{i<h} a_i <= host_size`` and rounded down (at least
    ``|V_i|``, and at least ``⌈a_{i+1}/2⌉`` so the location constraint
    holds).  ``b_i = ⌈list_ratio · |V_i|⌉`` and ``s_i = |V_i|`` are the
    minimal sizes an embedding can use; ``ℓ_i = ⌊ell_factor · 2Δ⁻_i⌋``.
    """
    h, sizes, deltas = _profile(D)
    dm, dp = max(D.max_in, 1), max(D.max_out, 1)
    growth = Fraction(growth)
    n = [growth ** deltas[i - 1] * sizes[i - 1] for i in range(1, h + 1)]
    span = lambda xs: xs[-1] + 2 * k * sum(xs[:-1])  # noqa: E731

    def sized(scale: Fraction) -> list[int]:
        xs = [max(math.floor(scale * x), sizes[i]) for i, x in enumerate(n)]
        for i in range(h - 2, -1, -1):
            xs[i] = max(xs[i], -(-xs[i + 1] // 2))
        return xs

    if span(sized(Fraction(0))) > host_size:
        raise InvalidRequest(f"host of {host_size} vertices is too small for this digraph at k={k}")
    # largest scale on a 2^-20 grid whose rounded sizes still fit
    top = Fraction(host_size) / span(n)
    lo, hi = 0, 1 << 20
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if span(sized(top * Fraction(mid, 1 << 20))) <= host_size:
            lo = mid
        else:
            hi = mid - 1
    a = sized(top * Fraction(lo, 1 << 20))
    af = [Fraction(x) for x in a]
    b = [Fraction(math.ceil(list_ratio * sizes[i])) for i in range(h)]
    s = [Fraction(sizes[i]) for i in range(h)]
    o = [2 * k * sum(af[i - 1 :]) for i in range(1, h + 1)]
    ell = tuple(math.floor(Fraction(ell_factor) * 2 * deltas[i]) for i in range(1, h))
    ps = ParameterSet(
        "fit", h, sizes, deltas, D.max_in, D.max_out, Fraction(2, dm), k, Fraction(0), Fraction(0), Fraction(0),
        tuple(n), tuple(af), tuple(b), tuple(s), (), tuple(o), int(a[-1] + 2 * k * sum(a[:-1])), ell,
        notes={"growth": str(growth), "host_size": host_size, "ell_factor": str(Fraction(ell_factor))},
    )
    return ps


# ----------------------------------------------------------------------------
# bound formulas
# ----------------------------------------------------------------------------


def layer_sum(D: GradedDigraph) -> int:
    """``Σ_i 2^{2(Δ⁻_{i-1} + Δ⁻_i)} |V_i|`` with zero sentinels."""
    return sum(4 ** (D.delta_in(i - 1) + D.delta_in(i)) * size for i, size in enumerate(D.sizes, 1))


def theorem_bound(D: GradedDigraph) -> int:
    """``10^9 (Δ⁻)² Δ⁺ Σ_i 2^{2(Δ⁻_{i-1}+Δ⁻_i)} |V_i|`` as an exact integer."""
    return THEOREM_CONSTANT * D.max_in**2 * D.max_out * layer_sum(D)


def easy_bound(delta_in: int, delta_out: int, n: int) -> int:
    """The uniform form ``10^9 Δ⁺ (Δ⁻)² 2^{4Δ⁻} n``."""
    return THEOREM_CONSTANT * delta_out * delta_in**2 * 16**delta_in * n


def uniform_layer_sum(sizes, delta: int) -> int:
    """The layer sum with every ``Δ⁻_i``, sentinels included, set to ``delta``."""
    return sum(16**delta * s for s in sizes)


def hypercube_layer_sum(d: int) -> int:
    """``Σ_i C(d, i) · 4 · 16^i``: each weight-``i`` layer charged ``2^{2(i + (i+1))}``.

    This is the per-layer majorant used for the hypercube estimate; it
    collapses to ``4 · 17^d`` by the binomial theorem.
    """
    return sum(math.comb(d, i) * 4 * 16**i for i in range(d + 1))


def hypercube_exact_layer_sum(d: int) -> int:
    """Closed form of ``layer_sum(Q_d)``: the top layer has sentinel ``Δ⁻ = 0``."""
    if d == 0:
        return 1
    return 4 * 17**d - 4 * 16**d + 4**d
