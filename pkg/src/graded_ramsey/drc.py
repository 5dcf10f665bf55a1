"""Dependent random choice inside a median order.

Positions are 1-based throughout, matching interval notation ``[i, j)`` over
an ordering ``v_1, ..., v_N``.  Given a late window ``[j, j + a)`` holding a
set ``B``, the selector looks in ``J = [j - 2k a', j)``, picks the
length-``a'`` block ``I`` sending the most edges into ``B``, samples ``ℓ``
vertices ``L`` of ``B`` with repetition and keeps ``M`` = the vertices of
``I`` beating all of ``L``.  A trial is accepted once ``M`` meets both
explicit bounds, which are evaluated in exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .digraph import Tournament
from .errors import BudgetExceeded, GradedRamseyError, InvalidRequest, MedianPropertyViolation
from .median import Ordering
from .rng import stream

DEFAULT_COUNT_BUDGET = 10**7
DEFAULT_MAX_TRIALS = 10**4
DEFAULT_SAMPLES = 20000


@dataclass(frozen=True)
class DrcRequest:
    j: int
    a: int
    a_prime: int
    b: int
    ell: int
    s: int
    k: int
    delta: int
    B: tuple[int, ...]
    ordering: Ordering

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(sorted(int(v) for v in self.B)))
        for name in ("j", "a", "a_prime", "b"):
            if getattr(self, name) < 1:
                raise InvalidRequest(f"{name} must be positive")
        if self.k < 2:
            raise InvalidRequest("k must be at least 2")
        for name in ("ell", "s", "delta"):
            if getattr(self, name) < 0:
                raise InvalidRequest(f"{name} must be non-negative")
        N = self.ordering.n
        if 2 * self.a_prime < self.a:
            raise InvalidRequest(f"need 2a' >= a, got a'={self.a_prime}, a={self.a}")
        if not 2 * self.k * self.a_prime < self.j <= N - self.a + 1:
            raise InvalidRequest(
                f"need 2ka' < j <= N - a + 1, got 2ka'={2 * self.k * self.a_prime}, j={self.j}, N-a+1={N - self.a + 1}"
            )
        pos = self.ordering.position()
        for v in self.B:
            if not 0 <= v < N or not self.j <= pos[v] + 1 < self.j + self.a:
                raise InvalidRequest(f"vertex {v} of B lies outside [j, j + a)")
        if len(self.B) < self.b:
            raise InvalidRequest(f"|B| = {len(self.B)} < b = {self.b}")

    @property
    def size_bound(self) -> Fraction:
        return size_bound(self.a_prime, self.k, self.ell)

    @property
    def bad_bound(self) -> Fraction:
        return bad_bound(self.a_prime, self.k, self.ell, self.delta, self.s, self.b)

    def interval(self, i: int) -> list[int]:
        """Vertices in block ``i`` (1-based) of ``J``, in order."""
        start = self.j - 2 * self.k * self.a_prime + (i - 1) * self.a_prime
        return list(self.ordering.perm[start - 1 : start - 1 + self.a_prime])


def request_to_dict(req: DrcRequest) -> dict:
    out = {name: getattr(req, name) for name in ("j", "a", "a_prime", "b", "ell", "s", "k", "delta")}
    out.update(schema="graded-ramsey/drc-request@1", B=list(req.B), ordering=req.ordering.to_dict())
    return out


def request_from_dict(data: dict) -> DrcRequest:
    from .serialize import FormatError

    try:
        fields = {name: int(data[name]) for name in ("j", "a", "a_prime", "b", "ell", "s", "k", "delta")}
        return DrcRequest(B=tuple(int(v) for v in data["B"]), ordering=Ordering.from_dict(data["ordering"]), **fields)
    except KeyError as exc:
        raise FormatError("missing field", exc.args[0]) from exc


def size_bound(a_prime: int, k: int, ell: int) -> Fraction:
    return Fraction(a_prime, 2) * Fraction(k - 1, 2 * k) ** ell


def bad_bound(a_prime: int, k: int, ell: int, delta: int, s: int, b: int) -> Fraction:
    return 4 * Fraction(2 * k, k - 1) ** ell * math.comb(a_prime, delta) * Fraction(s, b) ** ell


@dataclass(frozen=True)
class Estimate:
    value: float
    samples: int
    stderr: float


@dataclass(frozen=True)
class DrcTrace:
    interval_index: int
    interval_sum: int
    L: tuple[int, ...]
    M: tuple[int, ...]
    trials: int


@dataclass(frozen=True)
class DrcResult:
    j_prime: int
    A: tuple[int, ...]
    size_bound: Fraction
    bad_bound: Fraction
    bad_count: int | Estimate
    exact: bool
    trace: DrcTrace

    def to_dict(self) -> dict:
        bc = self.bad_count
        return {
            "schema": "graded-ramsey/drc-result@1",
            "j_prime": self.j_prime,
            "A": list(self.A),
            "size_bound": str(self.size_bound),
            "bad_bound": str(self.bad_bound),
            "bad_count": bc if isinstance(bc, int) else {"value": bc.value, "samples": bc.samples, "stderr": bc.stderr},
            "exact": self.exact,
            "trace": {
                "interval_index": self.trace.interval_index,
                "interval_sum": self.trace.interval_sum,
                "L": list(self.trace.L),
                "M": list(self.trace.M),
                "trials": self.trace.trials,
            },
        }


class DrcFailure(GradedRamseyError):
    """No trial met both bounds; ``trace`` describes the best trial seen."""

    def __init__(self, message, trace: DrcTrace | None, bad_count=None):
        super().__init__(message)
        self.trace = trace
        self.bad_count = bad_count


def choose_interval(req: DrcRequest, t: Tournament) -> tuple[int, list[int], int]:
    """Block of ``J`` with the most edges into ``B``; ties to the smallest index.

    Returns ``(i, I, sum)``.  Raises :class:`MedianPropertyViolation` if the
    best sum falls below ``b (k - 1) a' / (2k)``, which cannot happen when
    the ordering has the half-in-neighbour property on the relevant range.
    """
    if t.n != req.ordering.n:
        raise InvalidRequest("ordering and tournament sizes differ")
    B = list(req.B)
    into_B = t.adj[:, B].sum(axis=1) if B else np.zeros(t.n, dtype=np.int64)
    best_i, best_sum = 0, -1
    for i in range(1, 2 * req.k + 1):
        total = int(into_B[req.interval(i)].sum())
        if total > best_sum:
            best_i, best_sum = i, total
    if Fraction(best_sum) < Fraction(req.b * (req.k - 1) * req.a_prime, 2 * req.k):
        raise MedianPropertyViolation(
            f"best block sends {best_sum} edges into B, below the pigeonhole bound", _window_violation(req, t)
        )
    return best_i, req.interval(best_i), best_sum


def _window_violation(req: DrcRequest, t: Tournament):
    """A 1-based ``(j, i)`` with too few in-neighbours of ``v_i`` in ``[j, i)``."""
    perm = req.ordering.perm
    pos = req.ordering.position()
    lo = req.j - 2 * req.k * req.a_prime
    for v in req.B:
        i = int(pos[v]) + 1
        window = perm[lo - 1 : i - 1]
        ins = int(t.adj[list(window), v].sum()) if window else 0
        if 2 * ins < i - lo:
            return (lo, i)
    return None


def count_bad_subsets(A, B, delta: int, s: int, t: Tournament, mode="exact", budget: int = DEFAULT_COUNT_BUDGET):
    """Number of ``delta``-subsets ``S`` of ``A`` with ``|N⁺(S) ∩ B| <= s``.

    ``mode`` is ``"exact"`` or ``("sampled", trials, seed)``; sampled mode
    returns an :class:`Estimate` of the same count.
    """
    A, B = sorted(int(v) for v in A), sorted(int(v) for v in B)
    rows = t.adj[np.ix_(A, B)] if A and B else np.zeros((len(A), len(B)), dtype=bool)
    total = math.comb(len(A), delta)
    if mode == "exact":
        if total > budget:
            raise BudgetExceeded(f"C({len(A)}, {delta}) = {total} subsets exceeds the counting budget {budget}")
        return kernels.count_bad(rows, delta, s)
    _, trials, seed = mode
    if total == 0:
        return Estimate(0.0, 0, 0.0)
    rng = stream(seed, "count-bad")
    bad = 0
    for _ in range(trials):
        S = rng.choice(len(A), size=delta, replace=False)
        common = rows[S].all(axis=0) if delta else np.ones(len(B), dtype=bool)
        bad += int(common.sum() <= s)
    p = bad / trials
    return Estimate(total * p, trials, total * math.sqrt(p * (1 - p) / trials))


def _estimate_value(bc) -> float:
    return bc.value if isinstance(bc, Estimate) else float(bc)


def drc_select(
    req: DrcRequest,
    t: Tournament,
    max_trials: int = DEFAULT_MAX_TRIALS,
    seed: int = 0,
    budget: int = DEFAULT_COUNT_BUDGET,
    samples: int = DEFAULT_SAMPLES,
    min_size: int = 0,
) -> DrcResult:
    """Rejection-sample ``L`` until ``M`` meets the size and bad-count bounds.

    Trial ``r`` draws ``L`` from the ``("drc", r)`` stream.  When the exact
    count would exceed ``budget`` subsets the sampled estimator is used and
    the result is flagged ``exact=False``.  ``min_size`` adds a floor on
    ``|M|`` on top of the size bound.
    """
    i, I, isum = choose_interval(req, t)
    sb, bb = req.size_bound, req.bad_bound
    B = list(req.B)
    beats_B = t.adj[np.ix_(I, B)] if B else np.zeros((len(I), 0), dtype=bool)
    cache: dict[tuple[int, ...], tuple[int | Estimate, bool]] = {}
    best = None  # (score, trace, bad)
    for r in range(max_trials):
        if req.ell and B:
            L = tuple(int(B[x]) for x in stream(seed, "drc", r).integers(0, len(B), size=req.ell))
        else:
            L = ()
        if L:
            cols = [B.index(v) for v in L]
            keep = beats_B[:, cols].all(axis=1)
        else:
            keep = np.ones(len(I), dtype=bool)
        M = tuple(int(v) for v, kflag in zip(I, keep) if kflag)
        trace = DrcTrace(i, isum, L, M, r + 1)
        if len(M) < sb or len(M) < min_size:
            score = (0, len(M))
            if best is None or score > best[0]:
                best = (score, trace, None)
            continue
        if M not in cache:
            if math.comb(len(M), req.delta) <= budget:
                cache[M] = (count_bad_subsets(M, B, req.delta, req.s, t, "exact", budget), True)
            else:
                est = count_bad_subsets(M, B, req.delta, req.s, t, ("sampled", samples, seed), budget)
                cache[M] = (est, False)
        bc, exact = cache[M]
        if Fraction(_estimate_value(bc)) <= bb:
            j_prime = req.j - 2 * req.k * req.a_prime + (i - 1) * req.a_prime
            return DrcResult(j_prime, M, sb, bb, bc, exact, trace)
        score = (1, -_estimate_value(bc))
        if best is None or score > best[0]:
            best = (score, trace, bc)
    raise DrcFailure(
        f"no trial met both bounds in {max_trials} trials", best[1] if best else None, best[2] if best else None
    )


def check_drc_result(req: DrcRequest, t: Tournament, res: DrcResult) -> list[str]:
    """Recheck the conclusions of an accepted result; returns the failures."""
    errs = []
    lo, hi = req.j - 2 * req.k * req.a_prime, req.j - req.a_prime
    if not lo <= res.j_prime <= hi:
        errs.append(f"j' = {res.j_prime} outside [{lo}, {hi}]")
    pos = req.ordering.position()
    for v in res.A:
        if not res.j_prime <= pos[v] + 1 < res.j_prime + req.a_prime:
            errs.append(f"vertex {v} outside [j', j' + a')")
    if Fraction(len(res.A)) < req.size_bound:
        errs.append(f"|A| = {len(res.A)} below size bound {req.size_bound}")
    if res.exact:
        bc = count_bad_subsets(res.A, req.B, req.delta, req.s, t, "exact")
        if bc != res.bad_count:
            errs.append(f"stored bad count {res.bad_count} != recount {bc}")
        if Fraction(bc) > req.bad_bound:
            errs.append(f"bad count {bc} above bound {req.bad_bound}")
    return errs


__all__ = [
    "DrcRequest",
    "DrcResult",
    "DrcTrace",
    "DrcFailure",
    "Estimate",
    "choose_interval",
    "drc_select",
    "count_bad_subsets",
    "check_drc_result",
    "request_from_dict",
    "request_to_dict",
    "size_bound",
    "bad_bound",
]
