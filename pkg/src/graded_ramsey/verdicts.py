"""Checker verdicts.

Exhaustive checks return :class:`Holds` or :class:`Violated`.  Sampled and
heuristic checks can only ever return :class:`Violated` (with a genuine
counterexample) or :class:`NoCounterexampleFound`; they never claim a
property holds.  :class:`Unknown` reports an exhausted budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


@dataclass(frozen=True)
class Holds:
    detail: dict = field(default_factory=dict)
    kind = "holds"

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "detail": _jsonable(self.detail)}


@dataclass(frozen=True)
class Violated:
    witness: object
    detail: dict = field(default_factory=dict)
    kind = "violated"

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "witness": _jsonable(self.witness), "detail": _jsonable(self.detail)}


@dataclass(frozen=True)
class NoCounterexampleFound:
    budget: int
    detail: dict = field(default_factory=dict)
    kind = "no-counterexample-found"

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "budget": self.budget, "detail": _jsonable(self.detail)}


@dataclass(frozen=True)
class Unknown:
    reason: str
    detail: dict = field(default_factory=dict)
    kind = "unknown"

    def to_dict(self) -> dict:
        return {"verdict": self.kind, "reason": self.reason, "detail": _jsonable(self.detail)}


Verdict = Holds | Violated | NoCounterexampleFound | Unknown
