"""numba-compiled kernels; loop-for-loop mirrors of ``numpy_kernels``.

Bitsets are rows of ``uint64`` words (bit ``v`` of row ``u`` lives in word
``v >> 6``).  Single-word variants are used by the tournament enumerators,
which only ever see hosts on at most 11 vertices.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


# ----------------------------------------------------------------------------
# median order
# ----------------------------------------------------------------------------


@njit(cache=True)
def relocation_search(sign, perm_in):
    perm = perm_in.copy()
    n = perm.size
    total = 0
    pos = 0
    idle = 0
    prefix = np.zeros(n + 1, dtype=np.int64)
    while idle < n:
        v = perm[pos]
        for x in range(n):
            prefix[x + 1] = prefix[x] + sign[v, perm[x]]
        q = -1
        gain = 0
        for y in range(n):
            if y < pos:
                g = prefix[pos] - prefix[y]
            elif y > pos:
                g = prefix[pos + 1] - prefix[y + 1]
            else:
                continue
            if g > 0:
                q = y
                gain = g
                break
        if q >= 0:
            total += gain
            if q < pos:
                for x in range(pos, q, -1):
                    perm[x] = perm[x - 1]
            else:
                for x in range(pos, q):
                    perm[x] = perm[x + 1]
            perm[q] = v
            idle = 0
        else:
            idle += 1
            pos = (pos + 1) % n
    return perm, total


# ----------------------------------------------------------------------------
# containment
# ----------------------------------------------------------------------------


@njit(cache=True)
def _search(p, out_w, in_w, n, W, in_ptr, in_idx, out_ptr, out_idx, ordered, budget,
            assign, cands, ncand, ptr, unused, mask, keys):
    """Shared backtracking core; all work arrays are supplied by the caller."""
    for t in range(p):
        assign[t] = -1
    if p == 0:
        return 1, 0
    if p > n:
        return 0, 0
    for w in range(W):
        unused[w] = np.uint64(0)
    for v in range(n):
        unused[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    t = 0
    nodes = 0
    building = True
    while t >= 0:
        if building:
            for w in range(W):
                mask[w] = unused[w]
            for q in range(in_ptr[t], in_ptr[t + 1]):
                c = assign[in_idx[q]]
                for w in range(W):
                    mask[w] &= out_w[c, w]
            for q in range(out_ptr[t], out_ptr[t + 1]):
                c = assign[out_idx[q]]
                for w in range(W):
                    mask[w] &= in_w[c, w]
            cnt = 0
            for w in range(W):
                m = mask[w]
                while m != np.uint64(0):
                    low = m & (~m + np.uint64(1))
                    b = popcount(low - np.uint64(1))
                    cands[t, cnt] = w * 64 + b
                    cnt += 1
                    m ^= low
            if ordered and cnt > 1:
                for i in range(cnt):
                    c = cands[t, i]
                    pc = 0
                    for w in range(W):
                        pc += popcount(in_w[c, w] & unused[w])
                    keys[i] = pc * (n + 1) + c
                # insertion sort by key
                for i in range(1, cnt):
                    kk = keys[i]
                    cc = cands[t, i]
                    j = i - 1
                    while j >= 0 and keys[j] > kk:
                        keys[j + 1] = keys[j]
                        cands[t, j + 1] = cands[t, j]
                        j -= 1
                    keys[j + 1] = kk
                    cands[t, j + 1] = cc
            ncand[t] = cnt
            ptr[t] = 0
            building = False
        if ptr[t] < ncand[t]:
            c = cands[t, ptr[t]]
            ptr[t] += 1
            if budget > 0 and nodes >= budget:
                for q in range(p):
                    assign[q] = -1
                return -1, nodes
            nodes += 1
            assign[t] = c
            unused[c >> 6] &= ~(np.uint64(1) << np.uint64(c & 63))
            if t == p - 1:
                return 1, nodes
            t += 1
            building = True
        else:
            t -= 1
            if t >= 0:
                c = assign[t]
                unused[c >> 6] |= np.uint64(1) << np.uint64(c & 63)
                assign[t] = -1
    return 0, nodes


@njit(cache=True)
def contains_search(p, out_w, in_w, n, in_ptr, in_idx, out_ptr, out_idx, ordered, budget):
    W = out_w.shape[1]
    assign = np.full(max(p, 1), -1, dtype=np.int64)
    cands = np.zeros((max(p, 1), max(n, 1)), dtype=np.int64)
    ncand = np.zeros(max(p, 1), dtype=np.int64)
    ptr = np.zeros(max(p, 1), dtype=np.int64)
    unused = np.zeros(W, dtype=np.uint64)
    mask = np.zeros(W, dtype=np.uint64)
    keys = np.zeros(max(n, 1), dtype=np.int64)
    status, nodes = _search(p, out_w, in_w, n, W, in_ptr, in_idx, out_ptr, out_idx, ordered, budget,
                            assign, cands, ncand, ptr, unused, mask, keys)
    return status, assign[:p].copy(), nodes


@njit(cache=True)
def _decode(n, code, out_w, in_w):
    for v in range(n):
        out_w[v, 0] = np.uint64(0)
        in_w[v, 0] = np.uint64(0)
    bit = n * (n - 1) // 2 - 1
    for i in range(n):
        for j in range(i + 1, n):
            if (code >> bit) & 1:
                out_w[i, 0] |= np.uint64(1) << np.uint64(j)
                in_w[j, 0] |= np.uint64(1) << np.uint64(i)
            else:
                out_w[j, 0] |= np.uint64(1) << np.uint64(i)
                in_w[i, 0] |= np.uint64(1) << np.uint64(j)
            bit -= 1


@njit(cache=True)
def sweep_free(n, p, in_ptr, in_idx, out_ptr, out_idx, lo, hi):
    out_w = np.zeros((n, 1), dtype=np.uint64)
    in_w = np.zeros((n, 1), dtype=np.uint64)
    assign = np.full(max(p, 1), -1, dtype=np.int64)
    cands = np.zeros((max(p, 1), n), dtype=np.int64)
    ncand = np.zeros(max(p, 1), dtype=np.int64)
    ptr = np.zeros(max(p, 1), dtype=np.int64)
    unused = np.zeros(1, dtype=np.uint64)
    mask = np.zeros(1, dtype=np.uint64)
    keys = np.zeros(n, dtype=np.int64)
    for code in range(lo, hi):
        _decode(n, code, out_w, in_w)
        status, _ = _search(p, out_w, in_w, n, 1, in_ptr, in_idx, out_ptr, out_idx, False, 0,
                            assign, cands, ncand, ptr, unused, mask, keys)
        if status == 0:
            return code
    return -1


@njit(cache=True)
def canonical_code(n, out, perms):
    if n < 2:
        return 0
    nbits = n * (n - 1) // 2
    best = np.int64(-1)
    for r in range(perms.shape[0]):
        code = np.int64(0)
        bit = nbits - 1
        tied = best >= 0
        worse = False
        for i in range(n):
            pi = perms[r, i]
            for j in range(i + 1, n):
                b = (out[pi] >> perms[r, j]) & 1
                code = (code << 1) | b
                if tied:
                    bb = (best >> bit) & 1
                    if b > bb:
                        worse = True
                        break
                    if b < bb:
                        tied = False
                bit -= 1
            if worse:
                break
        if not worse and (best < 0 or code < best):
            best = code
    return best


# ----------------------------------------------------------------------------
# bad subset counting
# ----------------------------------------------------------------------------


@njit(cache=True)
def count_bad(rows, delta, s):
    """``rows`` is (|A|, words) uint64 over B; ``nb`` bits are meaningful."""
    a = rows.shape[0]
    W = rows.shape[1]
    if delta == 0:
        return -1  # handled by the caller, needs |B|
    if delta > a:
        return 0
    acc = np.zeros((delta + 1, W), dtype=np.uint64)
    for w in range(W):
        acc[0, w] = ~np.uint64(0)
    idx = np.zeros(delta, dtype=np.int64)
    for i in range(delta):
        idx[i] = i
    total = 0
    # rebuild the AND stack from the first changed level
    level = 0
    while True:
        for lv in range(level, delta):
            for w in range(W):
                acc[lv + 1, w] = acc[lv, w] & rows[idx[lv], w]
        pc = 0
        for w in range(W):
            pc += popcount(acc[delta, w])
        if pc <= s:
            total += 1
        # next combination
        i = delta - 1
        while i >= 0 and idx[i] == a - delta + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, delta):
            idx[j] = idx[j - 1] + 1
        level = i
    return total


# ----------------------------------------------------------------------------
# host weight maximisation
# ----------------------------------------------------------------------------


@njit(cache=True)
def _best_alpha(R, cap, ws, es):
    lo = max(0.0, R - cap)
    hi = min(1.0, R)
    if lo > hi + 1e-12:
        return -np.inf, 0.0
    hi = max(hi, lo)
    pts = np.empty(3)
    npts = 0
    pts[npts] = lo
    npts += 1
    frac = R - math.floor(R)
    if lo + 1e-12 < frac < hi - 1e-12:
        pts[npts] = frac
        npts += 1
    pts[npts] = hi
    npts += 1
    best_v = -np.inf
    best_a = lo
    for k in range(npts - 1):
        a0 = pts[k]
        a1 = pts[k + 1]
        m = min(int(math.floor(R - 0.5 * (a0 + a1) + 1e-12)), cap)
        P = 0.0
        Q = 0.0
        for r in range(m):
            P += ws[r]
            Q += es[r]
        wm = ws[m] if m < cap else 0.0
        em = es[m] if m < cap else 0.0
        c0 = P + (R - m) * wm
        c1 = Q + (R - m) * em - wm
        c2 = -em
        for which in range(3):
            if which == 0:
                a = a0
            elif which == 1:
                a = a1
            else:
                if c2 >= 0:
                    continue
                a = -c1 / (2.0 * c2)
                if not (a0 < a < a1):
                    continue
            v = c0 + c1 * a + c2 * a * a
            if v > best_v + 1e-12:
                best_v = v
                best_a = a
    return best_v, best_a


@njit(cache=True)
def host_exact(adj, two_x):
    k = adj.shape[0]
    best_v = -np.inf
    best_T = 0
    best_i0 = -1
    best_a = 0.0
    if two_x > k + 1e-12 or two_x < 0:
        return best_v, best_T, best_i0, best_a
    w = np.zeros(k, dtype=np.int64)
    order = np.zeros(k, dtype=np.int64)
    keys = np.zeros(k, dtype=np.int64)
    ws = np.zeros(k)
    es = np.zeros(k)
    for T in range(1 << k):
        t = 0
        for i in range(k):
            t += (T >> i) & 1
        if t > two_x + 1e-12:
            continue
        R = two_x - t
        for j in range(k):
            acc = 0
            for i in range(k):
                if (T >> i) & 1 and adj[i, j]:
                    acc += 1
            w[j] = acc
        for i0 in range(-1, k):
            if i0 >= 0 and (T >> i0) & 1:
                continue
            cap = 0
            for j in range(k):
                if (T >> j) & 1 or j == i0:
                    continue
                e = 1 if (i0 >= 0 and adj[i0, j]) else 0
                # sort key: -w, -e, j  ->  ascending on (k+1)*((k+1)*(k - w) + (1 - e)) + j
                keys[cap] = ((k - w[j]) * 2 + (1 - e)) * (k + 1) + j
                order[cap] = j
                cap += 1
            for i in range(1, cap):
                kk = keys[i]
                oo = order[i]
                j = i - 1
                while j >= 0 and keys[j] > kk:
                    keys[j + 1] = keys[j]
                    order[j + 1] = order[j]
                    j -= 1
                keys[j + 1] = kk
                order[j + 1] = oo
            for r in range(cap):
                ws[r] = w[order[r]]
                es[r] = 1.0 if (i0 >= 0 and adj[i0, order[r]]) else 0.0
            if i0 < 0:
                if R > cap + 1e-12:
                    continue
                m = min(int(math.floor(R + 1e-12)), cap)
                v = 0.0
                for r in range(m):
                    v += ws[r]
                if m < cap:
                    v += (R - m) * ws[m]
                a = 0.0
            else:
                v, a = _best_alpha(R, cap, ws, es)
            if v > best_v + 1e-9:
                best_v = v
                best_T = T
                best_i0 = i0
                best_a = a
    return best_v, best_T, best_i0, best_a


@njit(cache=True)
def host_lattice(adj, two_x, steps):
    # f = digits / steps; weights and capacities kept in integer units
    k = adj.shape[0]
    mass = two_x * steps
    if mass > k * steps + 1e-9 or mass < 0:
        return -np.inf
    budget = int(np.floor(mass + 1e-9))
    digits = np.zeros(k, dtype=np.int64)
    w = np.zeros(k, dtype=np.int64)
    order = np.zeros(k, dtype=np.int64)
    best = -np.inf
    total = 0
    while True:
        for i in range(k):
            order[i] = i
        for i in range(1, k):
            oo = order[i]
            j = i - 1
            while j >= 0 and w[order[j]] < w[oo]:
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = oo
        rem = mass - total
        val = 0.0
        for r in range(k):
            if rem <= 0:
                break
            j = order[r]
            take = min(rem, float(steps - digits[j]))
            val += take * w[j]
            rem -= take
        if val > best:
            best = val
        i = 0
        while i < k:
            if digits[i] < steps and total < budget:
                digits[i] += 1
                total += 1
                for j in range(k):
                    if adj[i, j]:
                        w[j] += 1
                break
            d = digits[i]
            if d:
                total -= d
                for j in range(k):
                    if adj[i, j]:
                        w[j] -= d
                digits[i] = 0
            i += 1
        if i == k:
            break
    return best / (steps * steps)


# ----------------------------------------------------------------------------
# guest intersection
# ----------------------------------------------------------------------------


@njit(cache=True)
def guest_exact(nbr, nb, t):
    """``nbr`` is (|A|, words) uint64 over B.  Returns the offending subset or -1s."""
    na = nbr.shape[0]
    W = nbr.shape[1]
    res = np.full(max(t, 1), -1, dtype=np.int64)
    if t > na or t == 0:
        if t == 0 and nb >= 0:
            res[0] = -2  # empty subset always offends; caller handles
        return res
    acc = np.zeros((t + 1, W), dtype=np.uint64)
    idx = np.zeros(t, dtype=np.int64)
    for i in range(t):
        idx[i] = i
    level = 0
    while True:
        for lv in range(level, t):
            for w in range(W):
                acc[lv + 1, w] = acc[lv, w] | nbr[idx[lv], w]
        pc = 0
        for w in range(W):
            pc += popcount(acc[t, w])
        if nb - pc >= t:
            for i in range(t):
                res[i] = idx[i]
            return res
        i = t - 1
        while i >= 0 and idx[i] == na - t + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, t):
            idx[j] = idx[j - 1] + 1
        level = i
    return res
