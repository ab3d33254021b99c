"""``rainbow-forge`` command line.

Every command prints JSON records, one per line. Exit codes: 0 success,
1 negative verdict, 2 usage or input error, 3 budget or retry abort.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import networkx as nx

from . import __version__
from ._rng import make_rng, rng_info
from .almost import (
    DEFAULT_MAX_SEQUENCES,
    construct_almost_rainbow_lower_bound,
    lower_bound_comments,
    search_almost_rainbow_cycle,
)
from .constructions import (
    DEFAULT_GIRTH_RETRIES,
    RetryExhausted,
    complete_one_factorization,
    hypercube,
    random_regular_girth,
    random_sub_factorization,
    vizing_color,
)
from .expander import extract_expander, verify_robust_expander
from .graph import ColoredGraph, GraphError, dumps_graph, load_graph, save_graph
from .groups import (
    GroupError,
    additive_dimension,
    cayley_even_order_graph,
    dim_transpositions,
    is_dissociated,
    parse_group,
    translation_bipartite_graph,
)
from .process import (
    ProcessConfig,
    color_split_components,
    lemma_grid,
    run_splitting_trial,
    summarize_trials,
)
from .rainbow import (
    DEFAULT_STATE_BUDGET,
    is_rainbow_cycle,
    rainbow_cycle_exact,
    sample_half_palette,
    split_palette_search,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
JOBS_ENV = "RAINBOW_FORGE_JOBS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Emitter:
    """Collects JSON-line records for one invocation."""

    def __init__(self, command: str, config: dict, stream):
        self.command = command
        self.config = config
        self.stream = stream
        self.started = time.perf_counter()

    def emit(self, result: dict, kind: str = "result") -> None:
        record = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "kind": kind,
            "config": self.config,
            "result": result,
            "timing": {"seconds": round(time.perf_counter() - self.started, 6)},
            "version": __version__,
        }
        self.stream.write(json.dumps(record, sort_keys=True, default=str) + "\n")


def resolve_jobs(flag: int | None) -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer") from None
    elif flag is not None:
        value = flag
    else:
        value = os.cpu_count() or 1
    if value < 1:
        raise UsageError("jobs must be positive")
    return value


def run_batch(fn, tasks: list, jobs: int) -> list:
    """Apply ``fn`` to each task; results come back in task order either way."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _load(path: str | None) -> ColoredGraph:
    if path is None:
        raise UsageError("--input is required")
    try:
        if path == "-":
            return load_graph(sys.stdin)
        return load_graph(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _config(args) -> dict:
    skip = {"func", "verb", "noun"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _graph_summary(G: ColoredGraph) -> dict:
    return {"n": G.n, "m": G.m, "colours": G.colour_count}


def _write_graph(G: ColoredGraph, args, emitter: Emitter, comments: list[str], extra=None) -> int:
    comments = comments + [f"generated by rainbow-forge {__version__}"]
    result = {"graph": _graph_summary(G), **(extra or {})}
    if args.output:
        save_graph(G, args.output, comments)
        result["path"] = args.output
        emitter.emit(result)
    else:
        sys.stdout.write(dumps_graph(G, comments))
    return EXIT_OK


# ---------------------------------------------------------------- construct


def cmd_construct(args, emitter) -> int:
    if args.verb == "hypercube":
        G = hypercube(args.m)
        return _write_graph(G, args, emitter, [f"hypercube m={args.m}"])
    if args.verb == "k1f":
        G = complete_one_factorization(args.n)
        return _write_graph(G, args, emitter, [f"complete graph 1-factorization n={args.n}"])
    base = random_regular_girth(args.n, args.d, args.g, seed=args.seed, max_retries=args.max_retries)
    G = vizing_color(base)
    comment = f"random regular graph n={args.n} d={args.d} girth>={args.g} seed={args.seed}"
    return _write_graph(G, args, emitter, [comment, "edge colouring: Vizing"],
                        {"attempts": base.graph["attempts"]})


# ---------------------------------------------------------------- rainbow


def _split_trial(task):
    G, x, seed, budget = task
    out = split_palette_search(G, x, sample_half_palette(G, seed), budget)
    if out.cycle is not None and not is_rainbow_cycle(G, out.cycle):
        raise AssertionError("invalid rainbow cycle")
    return {"seed": seed, "exact": out.exact, "cycle": out.cycle, "meeting": out.meeting,
            "reach_in": len(out.reach_in), "reach_out": len(out.reach_out)}


def cmd_rainbow(args, emitter) -> int:
    G = _load(args.input)
    if args.verb == "find":
        if args.max_len is not None and args.max_len < 3:
            raise UsageError("--max-len must be at least 3")
        limit = G.colour_count if args.max_len is None else min(args.max_len, G.colour_count)
        cycle = rainbow_cycle_exact(G, args.max_len)
        if cycle is not None:
            if not is_rainbow_cycle(G, cycle):
                raise AssertionError("invalid rainbow cycle")
            colours = [G.colour(a, b) for a, b in zip(cycle, cycle[1:] + cycle[:1])]
            emitter.emit({"verdict": "rainbow cycle found", "cycle": cycle, "colours": colours,
                          "graph": _graph_summary(G)})
            return EXIT_OK
        scope = "exhaustive" if limit >= G.colour_count else "bounded"
        emitter.emit({"verdict": f"no rainbow cycle ({scope}, max_len = {'C' if scope == 'exhaustive' else limit})",
                      "max_len": limit, "graph": _graph_summary(G)})
        return EXIT_NEGATIVE
    tasks = [(G, args.x, args.seed + i, args.state_budget) for i in range(args.trials)]
    rows = run_batch(_split_trial, tasks, resolve_jobs(args.jobs))
    for row in rows:
        emitter.emit(row, "trial")
    done = [r for r in rows if r["exact"]]
    found = sum(r["cycle"] is not None for r in rows)
    emitter.emit({"trials": len(rows), "aborted": len(rows) - len(done), "found": found,
                  "frequency": found / len(done) if done else None}, "summary")
    if found:
        return EXIT_OK
    return EXIT_BUDGET if len(done) < len(rows) else EXIT_NEGATIVE


# ---------------------------------------------------------------- expander


def cmd_expander(args, emitter) -> int:
    G = _load(args.input)
    if args.verb == "verify":
        mode = args.mode or "exhaustive"
        cert = verify_robust_expander(G, mode, samples=args.samples, seed=args.seed)
        emitter.emit(cert.to_record())
        return EXIT_OK if cert.passed else EXIT_NEGATIVE
    mode = args.mode or "exact"
    H, cert = extract_expander(G, mode, samples=args.samples, seed=args.seed)
    if args.save:
        save_graph(H, args.save, [f"expander extracted ({mode}) from {args.input}"])
    emitter.emit({"subgraph": _graph_summary(H), "certificate": cert.to_record()})
    return EXIT_OK


# ---------------------------------------------------------------- process


def _process_trial(task):
    G, x, cfg, seed, budget = task
    rec = run_splitting_trial(G, x, cfg, seed, budget)
    if rec.cycle is not None and not is_rainbow_cycle(G, rec.cycle):
        raise AssertionError("invalid rainbow cycle")
    return rec


def _components_trial(task):
    G, seed = task
    sizes = color_split_components(G, seed)
    return {"seed": seed, "largest": sizes[0] if sizes else 0, "components": len(sizes)}


def cmd_process(args, emitter) -> int:
    if args.verb == "lemma42-grid":
        report = lemma_grid(args.T_max)
        emitter.emit(report.to_record())
        return EXIT_OK if report.ok else EXIT_NEGATIVE
    G = _load(args.input)
    jobs = resolve_jobs(args.jobs)
    if args.verb == "components":
        rows = run_batch(_components_trial, [(G, args.seed + i) for i in range(args.trials)], jobs)
        for row in rows:
            emitter.emit(row, "trial")
        fractions = [r["largest"] / G.n for r in rows]
        emitter.emit({"trials": len(rows), "median_largest_fraction": statistics.median(fractions)},
                     "summary")
        return EXIT_OK
    cfg = ProcessConfig.for_graph(G.n, Fraction(args.L_scale))
    tasks = [(G, args.x, cfg, args.seed + i, args.state_budget) for i in range(args.trials)]
    records = run_batch(_process_trial, tasks, jobs)
    for rec in records:
        emitter.emit(rec.to_record(), "trial")
    summary = summarize_trials(records, cfg)
    emitter.emit(summary, "summary")
    return EXIT_BUDGET if summary["aborted"] == len(records) and records else EXIT_OK


# ---------------------------------------------------------------- almost


def cmd_almost(args, emitter) -> int:
    if args.verb == "construct":
        G = construct_almost_rainbow_lower_bound(args.d, args.r, args.n, seed=args.seed,
                                                 max_retries=args.max_retries)
        return _write_graph(G, args, emitter, lower_bound_comments(args.d, args.r, args.n, args.seed))
    G = _load(args.input)
    search = search_almost_rainbow_cycle(G, args.r, args.d, max_sequences=args.max_sequences)
    if search.cycle is not None and not search.cycle.is_valid(G):
        raise AssertionError("invalid almost-rainbow cycle")
    emitter.emit(search.to_record())
    if search.cycle is not None:
        return EXIT_OK
    return EXIT_BUDGET if search.reason.startswith("sequence budget") else EXIT_NEGATIVE


# ---------------------------------------------------------------- group


def cmd_group(args, emitter) -> int:
    if args.verb == "dim-transpositions":
        emitter.emit({"k": args.k, "dimension": dim_transpositions(args.k)})
        return EXIT_OK
    G = parse_group(args.group)
    S = G.elements() if args.set == "all" else G.parse_set(args.set)
    if args.verb == "dissociated":
        verdict = is_dissociated(G, S, args.max_m)
        emitter.emit(verdict.to_record(G))
        return EXIT_OK if verdict else EXIT_NEGATIVE
    if args.verb == "dimension":
        size, subset = additive_dimension(G, S)
        emitter.emit({"dimension": size, "maximizer": [G.format(g) for g in subset]})
        return EXIT_OK
    builder = translation_bipartite_graph if args.kind == "bipartite" else cayley_even_order_graph
    H = builder(G, S)
    return _write_graph(H, args, emitter, [f"{args.kind} graph of {G} with set {args.set}"])


# ---------------------------------------------------------------- experiment


def _scan_instance(task):
    family, n, degree, seed, budget, detector = task
    if family == "complete":
        G = complete_one_factorization(n)
    elif family == "hypercube":
        G = hypercube(int(round(math.log2(n))))
    elif family == "k1f-sub":
        G = random_sub_factorization(n, degree, seed)
    else:
        rng = make_rng(seed)
        p = min(1.0, degree / max(1, n - 1))
        base = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**32)))
        G = vizing_color(base)
    if detector == "exact":
        cycle = rainbow_cycle_exact(G) if G.colour_count >= 3 else None
        exact = True
    else:
        if G.m == 0:
            return False, True
        out = split_palette_search(G, 0, sample_half_palette(G, seed), budget)
        cycle, exact = out.cycle, out.exact
    if cycle is not None and not is_rainbow_cycle(G, cycle):
        raise AssertionError("invalid rainbow cycle")
    return cycle is not None, exact


SCAN_FAMILIES = ("complete", "k1f-sub", "hypercube", "random")


def threshold_scan(family: str, ns: list[int], degrees: list[int], trials: int, base_seed: int,
                   detector: str = "exact", budget: int = DEFAULT_STATE_BUDGET, jobs: int = 1) -> list[dict]:
    """Success frequency of rainbow detection on sampled instances, one row per (n, degree)."""
    if family not in SCAN_FAMILIES:
        raise ValueError(f"unsupported family {family!r}; choose from {SCAN_FAMILIES}")
    rows = []
    for n in ns:
        if family == "hypercube" and (n < 2 or n & (n - 1)):
            raise ValueError("hypercube family needs n a power of two")
        grid = degrees if family in ("k1f-sub", "random") else [None]
        previous = None
        for degree in grid:
            tasks = [(family, n, degree, base_seed + i, budget, detector) for i in range(trials)]
            results = run_batch(_scan_instance, tasks, jobs)
            done = [found for found, exact in results if exact]
            freq = sum(done) / len(done) if done else float("nan")
            flag = previous is not None and freq < previous
            rows.append({"family": family, "n": n,
                         "degree": degree if degree is not None else (n - 1 if family == "complete" else int(math.log2(n))),
                         "trials": trials, "successes": sum(done), "aborted": len(results) - len(done),
                         "frequency": freq, "monotone_flag": flag})
            previous = freq
    return rows


def cmd_experiment(args, emitter) -> int:
    ns = [int(x) for x in args.n.split(",")]
    degrees = [int(x) for x in args.degrees.split(",")] if args.degrees else []
    try:
        rows = threshold_scan(args.family, ns, degrees, args.trials, args.seed, args.detector,
                              args.state_budget, resolve_jobs(args.jobs))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["family"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
        emitter.emit({"rows": len(rows), "path": args.output})
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rainbow-forge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    nouns = parser.add_subparsers(dest="noun", required=True, parser_class=_Parser)

    def common(p, *, graph_in=True, seed=True, trials=False, jobs=False):
        if graph_in:
            p.add_argument("--input", help="graph file, '-' for stdin")
        p.add_argument("--output", help="write results here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if trials:
            p.add_argument("--trials", type=int, default=100)
        if jobs:
            p.add_argument("--jobs", type=int, default=None)

    rb = nouns.add_parser("rainbow").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = rb.add_parser("find")
    common(p, seed=False)
    p.add_argument("--max-len", type=int, default=None)
    p = rb.add_parser("split")
    common(p, trials=True, jobs=True)
    p.add_argument("--x", type=int, default=0)
    p.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    for sub in rb.choices.values():
        sub.set_defaults(func=cmd_rainbow)

    ex = nouns.add_parser("expander").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = ex.add_parser("verify")
    common(p)
    p.add_argument("--mode", choices=["exhaustive", "sampled"])
    p.add_argument("--samples", type=int, default=200)
    p = ex.add_parser("extract")
    common(p)
    p.add_argument("--mode", choices=["exact", "heuristic"])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--save", help="write the extracted subgraph to this file")
    for sub in ex.choices.values():
        sub.set_defaults(func=cmd_expander)

    pr = nouns.add_parser("process").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = pr.add_parser("trial")
    common(p, trials=True, jobs=True)
    p.add_argument("--x", type=int, default=0)
    p.add_argument("--L-scale", dest="L_scale", default="1")
    p.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    p = pr.add_parser("components")
    common(p, trials=True, jobs=True)
    p = pr.add_parser("lemma42-grid")
    common(p, graph_in=False, seed=False)
    p.add_argument("--T-max", dest="T_max", type=int, default=50)
    for sub in pr.choices.values():
        sub.set_defaults(func=cmd_process)

    al = nouns.add_parser("almost").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = al.add_parser("find")
    common(p, seed=False)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--max-sequences", type=int, default=DEFAULT_MAX_SEQUENCES)
    p = al.add_parser("construct")
    common(p, graph_in=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-retries", type=int, default=DEFAULT_GIRTH_RETRIES)
    for sub in al.choices.values():
        sub.set_defaults(func=cmd_almost)

    gr = nouns.add_parser("group").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in ("dissociated", "dimension", "build-graph"):
        p = gr.add_parser(verb)
        common(p, graph_in=False, seed=False)
        p.add_argument("--group", required=True, help="e.g. S3, Z2^4, S3^2, Z6xS3")
        p.add_argument("--set", required=True, help="comma-separated elements, or 'all'")
    gr.choices["dissociated"].add_argument("--max-m", type=int, default=None)
    gr.choices["build-graph"].add_argument("--kind", choices=["bipartite", "cayley"], default="bipartite")
    p = gr.add_parser("dim-transpositions")
    common(p, graph_in=False, seed=False)
    p.add_argument("--k", type=int, required=True)
    for sub in gr.choices.values():
        sub.set_defaults(func=cmd_group)

    co = nouns.add_parser("construct").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = co.add_parser("hypercube")
    common(p, graph_in=False, seed=False)
    p.add_argument("--m", type=int, required=True)
    p = co.add_parser("k1f")
    common(p, graph_in=False, seed=False)
    p.add_argument("--n", type=int, required=True)
    p = co.add_parser("regular-girth")
    common(p, graph_in=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--max-retries", type=int, default=DEFAULT_GIRTH_RETRIES)
    for sub in co.choices.values():
        sub.set_defaults(func=cmd_construct)

    xp = nouns.add_parser("experiment").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = xp.add_parser("threshold-scan")
    common(p, graph_in=False, trials=True, jobs=True)
    p.add_argument("--family", required=True)
    p.add_argument("--n", required=True, help="comma-separated vertex counts")
    p.add_argument("--degrees", default="", help="comma-separated target degrees")
    p.add_argument("--detector", choices=["exact", "split"], default="exact")
    p.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"rainbow-forge: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    command = f"{args.noun} {args.verb}"
    config = _config(args)
    config["rng"] = rng_info()["generator"]
    emitter = Emitter(command, config, sys.stdout)
    out_handle = None
    writes_graph = args.noun == "construct" or args.verb in ("construct", "build-graph", "threshold-scan")
    if getattr(args, "output", None) and not writes_graph:
        out_handle = open(args.output, "w", encoding="utf-8")
        emitter.stream = out_handle
    try:
        return args.func(args, emitter)
    except UsageError as exc:
        sys.stderr.write(f"rainbow-forge: {exc}\n")
        return EXIT_USAGE
    except (GraphError, GroupError) as exc:
        sys.stderr.write(f"rainbow-forge: {exc}\n")
        return EXIT_USAGE
    except RetryExhausted as exc:
        emitter.emit({"verdict": "retry budget exhausted", "attempts": exc.attempts,
                      "params": exc.params}, "abort")
        return EXIT_BUDGET
    except ValueError as exc:
        sys.stderr.write(f"rainbow-forge: {exc}\n")
        return EXIT_USAGE
    finally:
        if out_handle is not None:
            out_handle.close()


if __name__ == "__main__":
    sys.exit(main())
