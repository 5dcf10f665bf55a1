"""Numba vs numpy kernel timings.

Each workload runs once per backend to warm up (numba compiles here), then
``--repeat`` timed runs; results of the two backends must agree.

    python benchmarks/bench_kernels.py --repeat 5
"""

import argparse
import time

import numpy as np

from graded_ramsey import kernels
from graded_ramsey.digraph import directed_path, random_tournament, transitive_digraph
from graded_ramsey.exact import _perms, _position_lists, pattern_order
from graded_ramsey.median import _sign


def workloads(quick):
    n = 120 if quick else 300
    t = random_tournament(n, 1)
    sign = _sign(t)
    perm = np.random.default_rng(0).permutation(n)

    host = random_tournament(64, 2)
    path = directed_path(64).base
    order = pattern_order(path, "degree-major")
    pin, pout = _position_lists(path, order)

    tt4 = transitive_digraph(4)
    o4 = pattern_order(tt4, "degree-major")
    tin, tout = _position_lists(tt4, o4)

    rows = random_tournament(80, 3).adj[:40, 40:]
    k = 10 if quick else 12
    R = random_tournament(k, 4).adj
    small = random_tournament(7, 5).adj
    perms8 = _perms(8)
    out8 = [int(sum(1 << j for j in range(8) if x[j])) for x in random_tournament(8, 6).adj]
    nbr = np.random.default_rng(7).random((16, 16)) < 0.45

    return [
        ("relocation_search", lambda: kernels.relocation_search(sign, perm)[1]),
        ("contains P_64", lambda: kernels.contains_search(host, pin, pout, True, 10**6)[0]),
        ("sweep TT_4 N=7", lambda: kernels.sweep_free(7, tin, tout, 0, 1 << (15 if quick else 18))),
        ("count_bad delta=3", lambda: kernels.count_bad(rows, 3, 8)),
        (f"host_exact k={k}", lambda: round(kernels.host_exact(R, k / 2)[0], 9)),
        ("host_lattice k=7", lambda: round(kernels.host_lattice(small, 4.5, 10), 9)),
        ("canonical_code n=8", lambda: kernels.canonical_code(8, out8, perms8)),
        ("guest_exact n=16", lambda: kernels.guest_exact(nbr, 5)),
    ]


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = fn()
        best = min(best, time.perf_counter() - t0)
    return res, best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()

    print(f"{'kernel':<22}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for name, fn in workloads(args.quick):
        with kernels.use_backend("numpy"):
            fn()
            r_np, t_np = timed(fn, args.repeat)
        with kernels.use_backend("numba"):
            fn()  # compile / load from cache
            r_nb, t_nb = timed(fn, args.repeat)
        if r_np != r_nb:
            raise SystemExit(f"{name}: backends disagree ({r_np!r} vs {r_nb!r})")
        print(f"{name:<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / max(t_nb, 1e-9):>9.1f}x")


if __name__ == "__main__":
    main()
