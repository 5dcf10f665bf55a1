"""Command-line entry point: ``graded-ramsey <command>``.

Exit codes: 0 success, 2 negative verdict (no embedding, property
violated), 3 budget exhausted or unknown, 4 bad input.  Every randomized
command takes ``--seed`` and derives all of its randomness from it.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import serialize
from .digraph import (
    directed_path,
    make_grid,
    make_hypercube,
    paley_tournament,
    random_graded_digraph,
    random_tournament,
    transitive_digraph,
    transitive_tournament,
)
from .errors import BudgetExceeded, GradedRamseyError, InvalidRequest, NotGraded, SizeMismatch

EXIT_OK, EXIT_NEGATIVE, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4


def _emit(data: dict, out: str | None) -> None:
    text = serialize.dumps(data)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _params(value: str | None) -> dict:
    """Inline JSON object or path to one."""
    if not value:
        return {}
    if value.lstrip().startswith("{"):
        try:
            return json.loads(value)
        except json.JSONDecodeError as exc:
            raise serialize.FormatError(exc.msg, f"--params:{exc.colno}") from exc
    return serialize.read_json(value)


def _verdict_code(v) -> int:
    return {"holds": EXIT_OK, "no-counterexample-found": EXIT_OK, "violated": EXIT_NEGATIVE, "unknown": EXIT_BUDGET}[v.kind]


seed_option = click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
out_option = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout).")


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Graded digraphs in tournaments: embeddings, bounds and exact search."""


# ----------------------------------------------------------------------------
# gen
# ----------------------------------------------------------------------------


@cli.group()
def gen():
    """Generate digraphs and tournaments."""


def _write_obj(obj, out, fmt):
    if out:
        serialize.write_any(obj, out, fmt)
    elif fmt == "dot":
        name = serialize.TOURNAMENT_DOT_NAME if hasattr(obj, "bits") else "D"
        click.echo(serialize.to_dot(obj, name), nl=False)
    else:
        data = serialize.tournament_to_dict(obj) if hasattr(obj, "bits") else serialize.digraph_to_dict(obj)
        _emit(data, None)


fmt_option = click.option("--format", "fmt", type=click.Choice(["json", "dot", "bits"]), default=None)


@gen.command("grid")
@click.argument("d", type=int)
@click.argument("k", type=int)
@out_option
@fmt_option
def gen_grid(d, k, out, fmt):
    """Directed grid [k]^d."""
    _write_obj(make_grid(d, k), out, fmt or (serialize.format_of(out) if out else "json"))


@gen.command("hypercube")
@click.argument("d", type=int)
@out_option
@fmt_option
def gen_hypercube(d, out, fmt):
    """Directed hypercube Q_d."""
    _write_obj(make_hypercube(d), out, fmt or (serialize.format_of(out) if out else "json"))


@gen.command("path")
@click.argument("n", type=int)
@out_option
@fmt_option
def gen_path(n, out, fmt):
    """Directed path on n vertices."""
    _write_obj(directed_path(n), out, fmt or (serialize.format_of(out) if out else "json"))


@gen.command("transitive")
@click.argument("n", type=int)
@out_option
@fmt_option
def gen_transitive(n, out, fmt):
    """Transitive pattern TT_n as a digraph."""
    _write_obj(transitive_digraph(n), out, fmt or (serialize.format_of(out) if out else "json"))


@gen.command("random")
@click.option("--layers", required=True, help="Comma-separated layer sizes.")
@click.option("--max-degree", type=int, required=True)
@click.option("--extra-edge-prob", type=float, default=0.5, show_default=True)
@seed_option
@out_option
@fmt_option
def gen_random(layers, max_degree, extra_edge_prob, seed, out, fmt):
    """Connected random graded digraph."""
    sizes = [int(x) for x in layers.split(",") if x.strip()]
    g = random_graded_digraph(sizes, max_degree, seed, extra_edge_prob)
    _write_obj(g, out, fmt or (serialize.format_of(out) if out else "json"))


@gen.command("tournament")
@click.argument("n", type=int)
@click.option("--kind", type=click.Choice(["random", "transitive", "paley"]), default="random", show_default=True)
@seed_option
@out_option
@fmt_option
def gen_tournament(n, kind, seed, out, fmt):
    """Random, transitive or Paley tournament."""
    t = {"random": lambda: random_tournament(n, seed), "transitive": lambda: transitive_tournament(n), "paley": lambda: paley_tournament(n)}[kind]()
    _write_obj(t, out, fmt or (serialize.format_of(out) if out else "json"))


# ----------------------------------------------------------------------------
# median / drc / embed-layer / pipeline
# ----------------------------------------------------------------------------


@cli.command()
@click.argument("tournament", type=click.Path(exists=True, dir_okay=False))
@click.option("--restarts", type=int, default=1, show_default=True)
@seed_option
@out_option
def median(tournament, restarts, seed, out):
    """Relocation-stable median order of a tournament."""
    from .median import local_median_order, verify_median_property

    t = serialize.load_tournament(tournament)
    o = local_median_order(t, seed, restarts)
    ok, witness = verify_median_property(t, o)
    _emit({"ordering": o.to_dict(), "median_property": ok, "witness": list(witness) if witness else None}, out)
    return EXIT_OK if ok else EXIT_NEGATIVE


@cli.command()
@click.argument("request", type=click.Path(exists=True, dir_okay=False))
@click.argument("tournament", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-trials", type=int, default=1000, show_default=True)
@click.option("--budget", type=int, default=10**7, show_default=True, help="Exact counting budget (subsets).")
@seed_option
@out_option
def drc(request, tournament, max_trials, budget, seed, out):
    """Dependent random choice for one request."""
    from .drc import DrcFailure, check_drc_result, drc_select, request_from_dict

    t = serialize.load_tournament(tournament)
    req = request_from_dict(serialize.read_json(request))
    try:
        res = drc_select(req, t, max_trials, seed, budget)
    except DrcFailure as exc:
        trace = exc.trace
        _emit({"schema": "graded-ramsey/drc-failure@1", "message": str(exc),
               "best_M_size": len(trace.M) if trace else None}, out)
        return EXIT_NEGATIVE
    data = res.to_dict()
    data["check_errors"] = check_drc_result(req, t, res)
    _emit(data, out)
    return EXIT_OK


@cli.command("embed-layer")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--cap", type=int, default=None, help="Resample cap (default 50|V1|max(Δ⁺,1)).")
@seed_option
@out_option
def embed_layer_cmd(instance, cap, seed, out):
    """Resampling embedder for one layer instance."""
    from .lll import LayerEmbeddingFailure, check_layer_embedding, embed_layer, instance_from_dict

    inst = instance_from_dict(serialize.read_json(instance))
    try:
        emb = embed_layer(inst, cap, seed)
    except LayerEmbeddingFailure as exc:
        _emit(exc.to_dict(), out)
        return EXIT_BUDGET
    ok, bad = check_layer_embedding(inst, emb.phi)
    data = emb.to_dict()
    data.update(check_ok=ok, violations=[list(v) for v in bad], hypotheses=inst.hypothesis_flags())
    _emit(data, out)
    return EXIT_OK if ok else EXIT_NEGATIVE


@cli.command()
@click.argument("digraph", type=click.Path(exists=True, dir_okay=False))
@click.option("--tournament", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--host-size", type=int, default=None, help="Generate a host of this size instead.")
@click.option("--host-kind", type=click.Choice(["random", "transitive"]), default="random", show_default=True)
@click.option("--mode", type=click.Choice(["fit", "theoretical"]), default="fit", show_default=True)
@seed_option
@out_option
def pipeline(digraph, tournament, host_size, host_kind, mode, seed, out):
    """Embed a graded digraph into a tournament."""
    from .params import compute_parameters, fit_parameters
    from .pipeline import EmbeddingMap, find_embedding, find_embedding_by_components
    from .rng import child_seed

    D = serialize.load_graded(digraph)
    if (tournament is None) == (host_size is None):
        raise InvalidRequest("give exactly one of --tournament and --host-size")
    if tournament:
        T = serialize.load_tournament(tournament)
    elif host_kind == "transitive":
        T = transitive_tournament(host_size)
    else:
        T = random_tournament(host_size, child_seed(seed, "host"))
    if len(D.base.weak_components()) > 1:
        res = find_embedding_by_components(D, T, lambda G, m: fit_parameters(G, m), seed)
    else:
        ps = fit_parameters(D, T.n) if mode == "fit" else compute_parameters(D)
        res = find_embedding(D, T, ps, seed)
    _emit(res.to_dict(), out)
    return EXIT_OK if isinstance(res, EmbeddingMap) else EXIT_NEGATIVE


# ----------------------------------------------------------------------------
# bound
# ----------------------------------------------------------------------------


@cli.command()
@click.argument("digraph", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("--hypercube", type=int, default=None, help="Closed forms for Q_d instead of a file.")
@out_option
def bound(digraph, hypercube, out):
    """Upper-bound formula and parameter cascade."""
    from .params import (
        check_parameters,
        compute_parameters,
        hypercube_exact_layer_sum,
        hypercube_layer_sum,
        layer_sum,
        recurrence_holds,
        theorem_bound,
    )

    if (digraph is None) == (hypercube is None):
        raise InvalidRequest("give exactly one of DIGRAPH and --hypercube")
    D = make_hypercube(hypercube) if hypercube is not None else serialize.load_graded(digraph)
    data = {"schema": "graded-ramsey/bound@1", "n": D.n, "h": D.h, "delta_in": D.max_in, "delta_out": D.max_out,
            "layer_sum": str(layer_sum(D)), "theorem_bound": str(theorem_bound(D))}
    if hypercube is not None:
        data.update(hypercube_majorant=str(hypercube_layer_sum(hypercube)),
                    hypercube_exact=str(hypercube_exact_layer_sum(hypercube)))
    ps = compute_parameters(D)
    data.update(N=str(ps.N), violated=check_parameters(ps), recurrence_holds=recurrence_holds(ps))
    _emit(data, out)
    return EXIT_OK


# ----------------------------------------------------------------------------
# lower
# ----------------------------------------------------------------------------


@cli.group()
def lower():
    """Lower-bound constructions and their checkers."""


params_option = click.option("--params", "params", default=None, help="JSON object, inline or as a file path.")


@lower.command("guest")
@params_option
@seed_option
@out_option
def lower_guest(params, seed, out):
    """Sample a guest and check its intersection (and partition) property."""
    from .lower_bounds import GuestParams, check_guest_intersection, check_guest_partition, sample_guest

    p = _params(params)
    gp = GuestParams(int(p["n"]), int(p["delta"]), float(p.get("c0", 1.5)), float(p.get("c1", 1.2)))
    g = sample_guest(gp, seed)
    mode = p.get("mode", "exact" if gp.n <= 18 else "heuristic")
    v = check_guest_intersection(g, float(p.get("alpha", 0.01)), mode, int(p.get("budget", 2000)), seed)
    data = {"schema": "graded-ramsey/lower-guest@1", "digraph": serialize.digraph_to_dict(g.digraph), "n": g.n,
            "max_degree": g.digraph.max_degree, "capped": g.capped, "intersection": v.to_dict()}
    code = _verdict_code(v)
    if "partition" in p:
        q = p["partition"]
        pv = check_guest_partition(g, int(q["k"]), int(q["part_cap"]), int(q["dust_cap"]), int(q.get("trials", 1000)), seed)
        data["partition"] = pv.to_dict()
        code = max(code, _verdict_code(pv))
    _emit(data, out)
    return code


@lower.command("host")
@params_option
@click.option("--tournament", type=click.Path(exists=True, dir_okay=False), default=None)
@seed_option
@out_option
def lower_host(params, tournament, seed, out):
    """Check the weighted edge-density property of a host."""
    from .lower_bounds import check_host

    p = _params(params)
    R = serialize.load_tournament(tournament) if tournament else random_tournament(int(p["k"]), seed)
    v = check_host(R, Fraction(str(p["x"])), p.get("mode", "exact"), int(p.get("trials", 2000)), seed)
    _emit({"schema": "graded-ramsey/lower-host@1", "tournament": serialize.tournament_to_dict(R), "verdict": v.to_dict()}, out)
    return _verdict_code(v)


@lower.command("pair")
@params_option
@seed_option
@out_option
def lower_pair(params, seed, out):
    """Build the bipartite guest/host pair, optionally probing for a copy."""
    from .lower_bounds import build_bipartite_pair, check_no_copy

    p = _params(params)
    pr = build_bipartite_pair(int(p["n"]), int(p["delta"]), seed, float(p.get("c0", 1.5)), float(p.get("c1", 1.2)))
    data = {"schema": "graded-ramsey/lower-pair@1", "branch": pr.branch,
            "guest": serialize.digraph_to_dict(pr.guest.to_graded()), "host": serialize.tournament_to_dict(pr.host),
            "parts": [[r.start, r.stop] for r in pr.parts]}
    code = EXIT_OK
    if p.get("check"):
        v = check_no_copy(pr.guest.to_graded(), pr.host, p["check"], attempts=int(p.get("attempts", 1000)), seed=seed)
        data["no_copy"] = v.to_dict()
        code = _verdict_code(v)
    _emit(data, out)
    return code


@lower.command("layered")
@params_option
@seed_option
@out_option
def lower_layered(params, seed, out):
    """Build the height-h construction."""
    from .lower_bounds import build_layered

    p = _params(params)
    L = build_layered(int(p["n"]), int(p["delta"]), int(p["h"]), seed, float(p.get("c0", 1.5)), float(p.get("c1", 1.2)))
    data = L.to_dict()
    data["digraph"] = serialize.digraph_to_dict(L.D)
    _emit(data, out)
    return EXIT_OK


@lower.command("audit")
@click.argument("construction", type=click.Path(exists=True, dir_okay=False))
@click.argument("embedding", type=click.Path(exists=True, dir_okay=False))
@out_option
def lower_audit(construction, embedding, out):
    """Monotone-index audit of a claimed embedding into a layered host."""
    from .lower_bounds import monotone_index_audit

    c = serialize.read_json(construction)
    D = serialize.digraph_from_dict(c["digraph"])
    parts = [range(a, b) for a, b in c["parts"]]
    phi = serialize.read_json(embedding)["phi"]
    rep = monotone_index_audit(D, parts, phi)
    _emit(rep.to_dict(), out)
    return EXIT_OK if rep.consistent else EXIT_NEGATIVE


# ----------------------------------------------------------------------------
# brute / audit / convert / experiment
# ----------------------------------------------------------------------------


@cli.group()
def brute():
    """Exact search on tiny instances."""


@brute.command("ramsey")
@click.option("--pattern", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--nmax", type=int, required=True)
@click.option("--mode", type=click.Choice(["labeled", "canonical"]), default="labeled", show_default=True)
@click.option("--time-budget", type=float, default=None, help="Seconds.")
@click.option("--cache", "cache_dir", type=click.Path(file_okay=False), default=None, help="Cache directory.")
@out_option
def brute_ramsey(pattern, nmax, mode, time_budget, cache_dir, out):
    """Oriented Ramsey number of a small pattern."""
    from .exact import RamseyCache, oriented_ramsey

    g = serialize.load_digraph(pattern)
    cache = RamseyCache(cache_dir) if cache_dir else None
    res = oriented_ramsey(g, nmax, mode, time_budget, cache)
    _emit(res.to_dict(), out)
    return EXIT_BUDGET if res.unknown else EXIT_OK


@brute.command("contains")
@click.option("--pattern", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--host", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--budget", type=int, default=10**7, show_default=True, help="Search nodes.")
@out_option
def brute_contains(pattern, host, budget, out):
    """Does the host contain the pattern?"""
    from .exact import contains

    res = contains(serialize.load_digraph(pattern), serialize.load_tournament(host), budget=budget)
    _emit({"schema": "graded-ramsey/contains@1", "status": res.status, "witness": list(res.witness) if res.witness else None, "nodes": res.nodes}, out)
    return {"found": EXIT_OK, "absent": EXIT_NEGATIVE, "unknown": EXIT_BUDGET}[res.status]


@brute.command("witness")
@click.option("--pattern", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--budget", type=int, default=20000, show_default=True, help="Edge flips.")
@seed_option
@out_option
def brute_witness(pattern, n, budget, seed, out):
    """Local search for a pattern-free tournament."""
    from .exact import extremal_witness

    t = extremal_witness(serialize.load_digraph(pattern), n, budget, seed)
    _emit({"schema": "graded-ramsey/witness@1", "found": t is not None, "tournament": serialize.tournament_to_dict(t) if t else None}, out)
    return EXIT_OK if t is not None else EXIT_BUDGET


@cli.command()
@click.argument("digraph", type=click.Path(exists=True, dir_okay=False))
@click.argument("tournament", type=click.Path(exists=True, dir_okay=False))
@click.argument("embedding", type=click.Path(exists=True, dir_okay=False))
@out_option
def audit(digraph, tournament, embedding, out):
    """Independently verify an embedding file."""
    from .pipeline import verify_embedding

    D = serialize.load_digraph(digraph)
    T = serialize.load_tournament(tournament)
    phi = serialize.read_json(embedding).get("phi")
    if phi is None:
        raise InvalidRequest("embedding file has no 'phi'")
    ok, bad = verify_embedding(D, T, phi)
    _emit({"schema": "graded-ramsey/audit@1", "ok": ok, "violations": [list(v) for v in bad]}, out)
    return EXIT_OK if ok else EXIT_NEGATIVE


@cli.command()
@click.argument("src", type=click.Path(exists=True, dir_okay=False))
@click.argument("dst", type=click.Path(dir_okay=False))
@click.option("--from", "src_fmt", type=click.Choice(serialize.FORMATS), default=None)
@click.option("--to", "dst_fmt", type=click.Choice(serialize.FORMATS), default=None)
def convert(src, dst, src_fmt, dst_fmt):
    """Convert between JSON, DOT and bit-string files."""
    serialize.write_any(serialize.read_any(src, src_fmt), dst, dst_fmt)
    return EXIT_OK


@cli.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), required=True)
@click.option("--summary", "json_path", type=click.Path(dir_okay=False), default=None)
@click.option("--timing", "timing_path", type=click.Path(dir_okay=False), default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
def experiment(spec, csv_path, json_path, timing_path, jobs):
    """Run an experiment spec; one CSV row per (digraph, host, seed)."""
    from .experiment import ExperimentSpec, run_experiment, write_outputs

    es = ExperimentSpec.from_dict(serialize.read_json(spec), Path(spec).parent)
    rows, summary, walls = run_experiment(es, jobs)
    write_outputs(rows, summary, walls, csv_path, json_path, timing_path)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="graded-ramsey", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except (serialize.FormatError, InvalidRequest, NotGraded, SizeMismatch, KeyError, ValueError, OSError) as exc:
        where = getattr(exc, "where", None)
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if where is not None:
            payload["where"] = where
        click.echo(json.dumps(payload, sort_keys=True), err=True)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        click.echo(json.dumps({"error": "BudgetExceeded", "message": str(exc)}), err=True)
        return EXIT_BUDGET
    except GradedRamseyError as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        return EXIT_NEGATIVE
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
