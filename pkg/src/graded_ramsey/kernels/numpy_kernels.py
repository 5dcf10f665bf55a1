"""Pure numpy / Python-int implementations of the hot kernels.

These define the reference semantics; ``numba_kernels`` mirrors each one
loop-for-loop so both backends return identical results, witnesses included.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# ----------------------------------------------------------------------------
# median order: first-improvement relocation search
# ----------------------------------------------------------------------------


def relocation_search(sign: np.ndarray, perm: np.ndarray) -> tuple[np.ndarray, int]:
    """Local search over single-vertex relocations.

    ``sign[u, v]`` is +1 if ``u -> v`` and -1 otherwise (0 on the diagonal).
    Positions are scanned cyclically; for the vertex at the current position
    the leftmost insertion point with strictly positive gain is taken.  The
    search stops after ``n`` consecutive positions without an improving move.
    Returns the final permutation and the total gain achieved.
    """
    perm = np.array(perm, dtype=np.int64)
    n = perm.size
    total = 0
    pos = 0
    idle = 0
    while idle < n:
        v = perm[pos]
        row = sign[v, perm].astype(np.int64)
        prefix = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(row, out=prefix[1:])
        gains = np.zeros(n, dtype=np.int64)
        gains[:pos] = prefix[pos] - prefix[:pos]
        gains[pos + 1 :] = prefix[pos + 1] - prefix[pos + 2 :]
        hits = np.flatnonzero(gains > 0)
        if hits.size:
            q = int(hits[0])
            total += int(gains[q])
            if q < pos:
                perm[q + 1 : pos + 1] = perm[q:pos].copy()
            else:
                perm[pos:q] = perm[pos + 1 : q + 1].copy()
            perm[q] = v
            idle = 0
        else:
            idle += 1
            pos = (pos + 1) % n
    return perm, total


# ----------------------------------------------------------------------------
# subgraph containment backtracking
# ----------------------------------------------------------------------------


def contains_search(p, out_bits, in_bits, n, in_ptr, in_idx, out_ptr, out_idx, ordered, budget):
    """Backtracking for an injective edge-preserving map.

    Pattern vertices are processed by position ``0..p-1``; ``in_idx`` lists,
    for position ``t``, the earlier positions ``r`` with a pattern edge
    ``r -> t`` (likewise ``out_idx`` for ``t -> r``).  With ``ordered`` the
    candidates are tried by ascending number of in-neighbours among unused
    host vertices, then index.  Returns ``(status, assignment, nodes)`` with
    status 1 = found, 0 = exhaustively absent, -1 = node budget hit.
    """
    assign = [-1] * p
    if p == 0:
        return 1, assign, 0
    if p > n:
        return 0, assign, 0
    unused = (1 << n) - 1

    def build(t):
        m = unused
        for r in in_idx[in_ptr[t] : in_ptr[t + 1]]:
            m &= out_bits[assign[r]]
        for r in out_idx[out_ptr[t] : out_ptr[t + 1]]:
            m &= in_bits[assign[r]]
        cands = []
        while m:
            low = m & -m
            cands.append(low.bit_length() - 1)
            m ^= low
        if ordered:
            cands.sort(key=lambda c: ((in_bits[c] & unused).bit_count(), c))
        return cands

    cands = [None] * p
    ptr = [0] * p
    cands[0] = build(0)
    t = 0
    nodes = 0
    while t >= 0:
        if ptr[t] < len(cands[t]):
            c = cands[t][ptr[t]]
            ptr[t] += 1
            if budget > 0 and nodes >= budget:
                return -1, [-1] * p, nodes
            nodes += 1
            assign[t] = c
            unused &= ~(1 << c)
            if t == p - 1:
                return 1, assign, nodes
            t += 1
            cands[t] = build(t)
            ptr[t] = 0
        else:
            t -= 1
            if t >= 0:
                unused |= 1 << assign[t]
                assign[t] = -1
    return 0, [-1] * p, nodes


def decode_code(n: int, code: int) -> tuple[list[int], list[int]]:
    """Out/in bitmasks of the tournament whose bit string is ``code`` (MSB first)."""
    out = [0] * n
    inn = [0] * n
    bit = n * (n - 1) // 2 - 1
    for i in range(n):
        for j in range(i + 1, n):
            if code >> bit & 1:
                out[i] |= 1 << j
                inn[j] |= 1 << i
            else:
                out[j] |= 1 << i
                inn[i] |= 1 << j
            bit -= 1
    return out, inn


def sweep_free(n, p, in_ptr, in_idx, out_ptr, out_idx, lo, hi):
    """First code in ``[lo, hi)`` whose tournament avoids the pattern, else -1."""
    for code in range(lo, hi):
        out, inn = decode_code(n, code)
        status, _, _ = contains_search(p, out, inn, n, in_ptr, in_idx, out_ptr, out_idx, False, 0)
        if status == 0:
            return code
    return -1


def canonical_code(n: int, out: list[int], perms: np.ndarray) -> int:
    """Minimum bit-string code over all relabellings (``perms`` = all n! orders)."""
    if n < 2:
        return 0
    adj = np.zeros((n, n), dtype=np.int64)
    for u in range(n):
        for v in range(n):
            adj[u, v] = out[u] >> v & 1
    codes = np.zeros(perms.shape[0], dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            codes = (codes << 1) | adj[perms[:, i], perms[:, j]]
    return int(codes.min())


# ----------------------------------------------------------------------------
# dependent random choice: bad subset counting
# ----------------------------------------------------------------------------


def count_bad(rows: np.ndarray, delta: int, s: int) -> int:
    """Number of ``delta``-subsets of rows whose common support has size <= s.

    ``rows`` is a bool matrix, one row per vertex of A, columns indexing B.
    """
    rows = np.asarray(rows, dtype=bool)
    a, b = rows.shape
    if delta == 0:
        return int(b <= s)
    if delta > a:
        return 0
    if delta == 1:
        return int((rows.sum(axis=1) <= s).sum())
    r = rows.astype(np.int64)
    total = 0
    # fix the first delta-2 members, finish the last two with one matrix product
    for head in itertools.combinations(range(a), delta - 2):
        start = head[-1] + 1 if head else 0
        if a - start < 2:
            continue
        common = np.ones(b, dtype=np.int64)
        for i in head:
            common &= r[i]
        tail = r[start:] * common
        pair = tail @ r[start:].T
        iu = np.triu_indices(a - start, 1)
        total += int((pair[iu] <= s).sum())
    return total


# ----------------------------------------------------------------------------
# host tournament weight maximisation
# ----------------------------------------------------------------------------


def _best_alpha(R, cap, ws, es):
    """Maximise the greedy g-value over ``alpha = f(i0)``.

    ``alpha`` ranges over ``[max(0, R - cap), min(1, R)]`` and the g-mass is
    ``G = R - alpha``.  With ``m = floor(G)`` full picks the value is
    ``P + Q*alpha + (G - m)(w_m + alpha*e_m)``, a concave quadratic while ``m``
    is constant.  Returns ``(value, alpha)``.
    """
    lo = max(0.0, R - cap)
    hi = min(1.0, R)
    if lo > hi + 1e-12:
        return -math.inf, 0.0
    hi = max(hi, lo)
    points = [lo]
    frac = R - math.floor(R)
    if lo + 1e-12 < frac < hi - 1e-12:
        points.append(frac)
    points.append(hi)
    best_v, best_a = -math.inf, lo
    for a0, a1 in zip(points[:-1], points[1:]):
        m = min(int(math.floor(R - 0.5 * (a0 + a1) + 1e-12)), cap)
        P = float(ws[:m].sum())
        Q = float(es[:m].sum())
        wm = float(ws[m]) if m < cap else 0.0
        em = float(es[m]) if m < cap else 0.0
        c0 = P + (R - m) * wm
        c1 = Q + (R - m) * em - wm
        c2 = -em
        cands = [a0, a1]
        if c2 < 0:
            star = -c1 / (2.0 * c2)
            if a0 < star < a1:
                cands.append(star)
        for a in cands:
            v = c0 + c1 * a + c2 * a * a
            if v > best_v + 1e-12:
                best_v, best_a = v, a
    return best_v, best_a


def host_exact(adj: np.ndarray, two_x: float):
    """Max of ``sum_{i->j} f(i) g(j)`` over admissible weight pairs.

    Enumerates the integral part ``T`` of ``f`` and its single fractional
    coordinate ``i0`` (or none).  For fixed ``f`` the optimal ``g`` is the
    fractional greedy fill of vertices outside ``T ∪ {i0}`` by in-weight; that
    order does not change for ``alpha = f(i0)`` in ``[0, 1)``.
    Returns ``(W, T_mask, i0, alpha)``; ``W = -inf`` when no pair exists.
    """
    k = adj.shape[0]
    A = adj.astype(np.int64)
    best = (-math.inf, 0, -1, 0.0)
    if two_x > k + 1e-12 or two_x < 0:
        return best
    for T in range(1 << k):
        t = T.bit_count()
        if t > two_x + 1e-12:
            continue
        R = two_x - t
        in_T = np.array([(T >> i) & 1 for i in range(k)], dtype=np.int64)
        w = in_T @ A
        for i0 in range(-1, k):
            if i0 >= 0 and in_T[i0]:
                continue
            e = A[i0] if i0 >= 0 else np.zeros(k, dtype=np.int64)
            order = sorted((j for j in range(k) if not in_T[j] and j != i0), key=lambda j: (-w[j], -e[j], j))
            ws = np.array([w[j] for j in order], dtype=np.float64)
            es = np.array([e[j] for j in order], dtype=np.float64)
            cap = len(order)
            if i0 < 0:
                if R > cap + 1e-12:
                    continue
                m = min(int(math.floor(R + 1e-12)), cap)
                v = float(ws[:m].sum()) + ((R - m) * ws[m] if m < cap else 0.0)
                a = 0.0
            else:
                v, a = _best_alpha(R, cap, ws, es)
            if v > best[0] + 1e-9:
                best = (v, T, i0, a)
    return best


def host_lattice(adj: np.ndarray, two_x: float, steps: int = 10) -> float:
    """Lattice oracle: f on the ``1/steps`` grid, g by exact fractional greedy."""
    k = adj.shape[0]
    A = adj.astype(np.float64)
    if two_x > k + 1e-9 or two_x < 0:
        return -math.inf
    budget = int(math.floor(two_x * steps + 1e-9))
    pts = np.zeros((1, 0), dtype=np.int64)
    for _ in range(k):
        ext = np.arange(steps + 1, dtype=np.int64)
        pts = np.concatenate(
            [np.repeat(pts, steps + 1, axis=0), np.tile(ext, pts.shape[0])[:, None]], axis=1
        )
        pts = pts[pts.sum(axis=1) <= budget]
    best = -math.inf
    for chunk in np.array_split(pts, max(1, pts.shape[0] // 200000 + 1)):
        if chunk.size == 0:
            continue
        f = chunk / steps
        G = two_x - f.sum(axis=1)
        capv = 1.0 - f
        ok = (G >= -1e-12) & (G <= capv.sum(axis=1) + 1e-12)
        if not ok.any():
            continue
        f, G, capv = f[ok], G[ok], capv[ok]
        w = f @ A
        order = np.argsort(-w, axis=1, kind="stable")
        ws = np.take_along_axis(w, order, axis=1)
        cs = np.take_along_axis(capv, order, axis=1)
        before = np.cumsum(cs, axis=1) - cs
        g = np.clip(G[:, None] - before, 0.0, cs)
        vals = (ws * g).sum(axis=1)
        best = max(best, float(vals.max()))
    return best


# ----------------------------------------------------------------------------
# guest intersection property
# ----------------------------------------------------------------------------


def guest_exact(nbr_masks: list[int], nb: int, t: int):
    """Search t-subsets X' of A for a non-neighbourhood of size >= t in B.

    Returns the first offending subset (tuple of A indices) or None.
    """
    full = (1 << nb) - 1
    na = len(nbr_masks)
    for X in itertools.combinations(range(na), t):
        m = 0
        for x in X:
            m |= nbr_masks[x]
        if (full & ~m).bit_count() >= t:
            return X
    return None
