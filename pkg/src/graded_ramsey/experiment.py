"""Batch runs of the embedding pipeline.

An experiment spec is a JSON object::

    {
      "schema": "graded-ramsey/experiment@1",
      "digraphs": [{"family": "hypercube", "d": 3},
                   {"family": "grid", "d": 2, "k": 4},
                   {"family": "path", "n": 6},
                   {"family": "random", "layers": [4, 6, 4], "max_degree": 3, "seed": 1},
                   {"file": "d.json"}],
      "hosts": [{"kind": "random", "factor": 20}, {"kind": "transitive", "size": 200}],
      "seeds": [0, 1, 2],
      "mode": "fit",
      "fit": {"k": 2, "growth": 2},
      "budgets": {"forward_restarts": 8}
    }

One row is written per (digraph, host, seed).  Row ``(d, h, s)`` draws its
host from ``child_seed(s, "host", d, h)`` and runs the pipeline with
``child_seed(s, "embed")``, so rows are independent of each other and of
the worker count.  The CSV and the summary are deterministic; wall-clock
times go to a separate timing file.
"""

from __future__ import annotations

import csv
import io
import os
import signal
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .digraph import (
    GradedDigraph,
    directed_path,
    infer_graded_partition,
    make_grid,
    make_hypercube,
    random_graded_digraph,
    random_tournament,
    transitive_tournament,
)
from .errors import GradedRamseyError, InvalidRequest
from .params import compute_parameters, fit_parameters
from .pipeline import Budgets, EmbeddingMap, find_embedding, find_embedding_by_components
from .rng import child_seed
from .serialize import dumps, load_graded

SPEC_SCHEMA = "graded-ramsey/experiment@1"
CSV_SCHEMA = "graded-ramsey/experiment-csv@1"
COLUMNS = (
    "digraph", "n", "h", "delta_in", "delta_out", "host", "host_size", "seed",
    "success", "verified", "phase", "layer", "resamples", "restarts",
)
BUDGET_ENV = "RAMSEY_BUDGET_MS"


@dataclass(frozen=True)
class ExperimentSpec:
    digraphs: tuple[dict, ...]
    hosts: tuple[dict, ...]
    seeds: tuple[int, ...]
    mode: str = "fit"
    fit: dict | None = None
    budgets: dict | None = None
    base_dir: str = "."

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | os.PathLike = ".") -> "ExperimentSpec":
        if data.get("schema", SPEC_SCHEMA) != SPEC_SCHEMA:
            raise InvalidRequest(f"unsupported schema {data.get('schema')!r}")
        spec = cls(
            tuple(data.get("digraphs", ())),
            tuple(data.get("hosts", ())),
            tuple(int(s) for s in data.get("seeds", ())),
            data.get("mode", "fit"),
            data.get("fit"),
            data.get("budgets"),
            str(base_dir),
        )
        spec.validate()
        return spec

    def validate(self) -> None:
        if self.mode not in ("fit", "theoretical"):
            raise InvalidRequest(f"unknown mode {self.mode!r}")
        for d in self.digraphs:
            if "file" in d and not (Path(self.base_dir) / d["file"]).exists():
                raise InvalidRequest(f"digraph file {d['file']!r} not found")
        for h in self.hosts:
            if h.get("kind", "random") not in ("random", "transitive"):
                raise InvalidRequest(f"unknown host kind {h.get('kind')!r}")
            if ("factor" in h) == ("size" in h):
                raise InvalidRequest("each host needs exactly one of 'factor' and 'size'")


def build_digraph(d: dict, base_dir: str = ".") -> tuple[str, GradedDigraph]:
    if "file" in d:
        G = load_graded(Path(base_dir) / d["file"])
        return d.get("name", Path(d["file"]).stem), G
    fam = d.get("family")
    if fam == "grid":
        G, name = make_grid(int(d["d"]), int(d["k"])), f"grid-{d['d']}-{d['k']}"
    elif fam == "hypercube":
        G, name = make_hypercube(int(d["d"])), f"Q{d['d']}"
    elif fam == "path":
        G, name = directed_path(int(d["n"])), f"path-{d['n']}"
    elif fam == "random":
        layers = [int(x) for x in d["layers"]]
        G = random_graded_digraph(layers, int(d["max_degree"]), int(d.get("seed", 0)), float(d.get("extra_edge_prob", 0.5)))
        name = f"random-{'x'.join(map(str, layers))}-D{d['max_degree']}-s{d.get('seed', 0)}"
    else:
        raise InvalidRequest(f"unknown digraph family {fam!r}")
    return d.get("name", name), G


class _RowTimeout(Exception):
    pass


@contextmanager
def _row_budget(ms: int | None):
    if not ms or not hasattr(signal, "setitimer"):
        yield
        return

    def fire(signum, frame):
        raise _RowTimeout

    try:
        old = signal.signal(signal.SIGALRM, fire)
    except ValueError:  # not the main thread
        yield
        return
    signal.setitimer(signal.ITIMER_REAL, ms / 1000)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _run_row(job) -> tuple[dict, float]:
    spec, di, hi, seed, budget_ms = job
    name, D = build_digraph(spec.digraphs[di], spec.base_dir)
    host = spec.hosts[hi]
    size = int(host["size"]) if "size" in host else int(host["factor"]) * D.n
    kind = host.get("kind", "random")
    row = {
        "digraph": name, "n": D.n, "h": D.h, "delta_in": D.max_in, "delta_out": D.max_out,
        "host": kind, "host_size": size, "seed": seed,
        "success": 0, "verified": 0, "phase": "", "layer": "", "resamples": 0, "restarts": "",
    }
    t0 = time.perf_counter()
    try:
        with _row_budget(budget_ms):
            T = transitive_tournament(size) if kind == "transitive" else random_tournament(size, child_seed(seed, "host", di, hi))
            budgets = Budgets(**(spec.budgets or {}))
            fit = {k: Fraction(v) if isinstance(v, str) else v for k, v in (spec.fit or {}).items()}
            embed_seed = child_seed(seed, "embed")
            if len(D.base.weak_components()) > 1:
                res = find_embedding_by_components(D, T, lambda G, m: fit_parameters(G, m, **fit), embed_seed, budgets)
            else:
                ps = fit_parameters(D, size, **fit) if spec.mode == "fit" else compute_parameters(D)
                res = find_embedding(D, T, ps, embed_seed, budgets)
        if isinstance(res, EmbeddingMap):
            row.update(success=1, verified=int(res.verified), resamples=res.resamples, restarts=res.restarts)
        else:
            row.update(phase=res.phase, layer=res.layer, resamples=res.resamples)
    except _RowTimeout:
        row.update(phase="budget")
    except GradedRamseyError as exc:
        row.update(phase=f"error:{type(exc).__name__}")
    return row, (time.perf_counter() - t0) * 1000


def run_experiment(spec: ExperimentSpec, jobs: int = 1, budget_ms: int | None = None) -> tuple[list[dict], dict, list[float]]:
    """Rows, summary and per-row wall times (ms), rows in spec order."""
    if budget_ms is None and os.environ.get(BUDGET_ENV):
        budget_ms = int(os.environ[BUDGET_ENV])
    work = [
        (spec, di, hi, seed, budget_ms)
        for di in range(len(spec.digraphs))
        for hi in range(len(spec.hosts))
        for seed in spec.seeds
    ]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            out = list(pool.map(_run_row, work))
    else:
        out = [_run_row(w) for w in work]
    rows = [r for r, _ in out]
    walls = [w for _, w in out]
    return rows, summarize(rows), walls


def summarize(rows: list[dict]) -> dict:
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["digraph"], r["host"], r["host_size"]), []).append(r)
    out = []
    for (name, host, size), rs in groups.items():
        ok = [r for r in rs if r["success"]]
        out.append({
            "digraph": name,
            "host": host,
            "host_size": size,
            "trials": len(rs),
            "successes": len(ok),
            "success_rate": round(len(ok) / len(rs), 6),
            "all_verified": all(r["verified"] for r in ok),
            "median_resamples": statistics.median(r["resamples"] for r in rs),
            "failure_phases": sorted({r["phase"] for r in rs if not r["success"]}),
        })
    return {"schema": "graded-ramsey/experiment-summary@1", "rows": len(rows), "groups": out}


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# {CSV_SCHEMA}\n")
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_outputs(rows, summary, walls, csv_path, json_path=None, timing_path=None) -> None:
    Path(csv_path).write_text(rows_to_csv(rows))
    if json_path:
        Path(json_path).write_text(dumps(summary))
    if timing_path:
        Path(timing_path).write_text(dumps({"wall_ms": [round(w, 3) for w in walls]}))
