"""Command-line harness: reproducible experiments with machine-readable outputs.

Exit codes: 0 = completed (including NOT_FOUND / INCONCLUSIVE outcomes),
1 = usage or input error, 2 = internal invariant violation.

Primary outputs (certificates, CSVs) are byte-identical across reruns with
the same arguments and seed; wall-clock fields are the only exception and
are confined to clearly named columns.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
import time
from fractions import Fraction

from . import generators
from .absorber import (absorb, build_absorber, full_pipeline, sample_family)
from .extremal import (approximate_to_theta, is_delta_extremal,
                       lemma3_dichotomy, minimize_edges)
from .graph import PartiteGraph
from .params import as_fraction
from .partition import GridPartition
from .solver import (count_crossing_cliques, find_factor, max_matching,
                     verify_matching)

FUZZ_SCHEMA = "# tilinglab fuzz csv schema 1"
FUZZ_COLUMNS = ["trial", "seed", "k", "n", "floor", "outcome", "cliques",
                "nodes", "wall_secs", "certificate"]
TIMING_COLUMNS = {"wall_secs"}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    return obj


def _dump(path, payload: dict) -> None:
    text = json.dumps(_jsonable(payload), separators=(",", ":"), sort_keys=True)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _load_graph(path: str) -> PartiteGraph:
    try:
        with open(path) as fh:
            return PartiteGraph.from_json(fh.read())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read graph {path}: {exc}")


def _write_graph(g: PartiteGraph, path) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(g.to_json() + "\n")
    else:
        print(g.to_json())


# -- gen ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    fam = args.family
    grid = None
    if fam == "gamma3":
        raise SystemExit(f"error: {generators.GAMMA3_MESSAGE}")
    if fam == "theta":
        g = generators.theta(args.k, args.r)
    elif fam == "blowup":
        sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes \
            else (args.t,) * args.r
        g, grid = generators.theta_blowup(generators.BlowupSpec(args.k, args.r, sizes))
    elif fam == "complete":
        g = generators.complete_partite(args.k, args.n)
    elif fam == "random":
        g = generators.random_partite(args.k, args.n, args.edge_prob, args.seed)
    elif fam == "mindeg":
        g, repairs = generators.random_min_degree(args.k, args.n, args.floor,
                                                  args.seed)
        print(f"repairs: {len(repairs)}", file=sys.stderr)
    elif fam == "perturb":
        g = generators.perturb(_load_graph(args.input), args.flips, args.seed)
    else:  # pragma: no cover - argparse restricts choices
        raise SystemExit(f"error: unknown family {fam}")
    _write_graph(g, args.output)
    if grid is not None and args.output:
        with open(args.output + ".grid.json", "w") as fh:
            fh.write(grid.to_json() + "\n")
    return 0


# -- solve / verify ----------------------------------------------------------

def cmd_solve(args) -> int:
    g = _load_graph(args.graph)
    t0 = time.perf_counter()
    try:
        res = find_factor(g, args.budget_nodes)
    except ValueError as exc:
        raise SystemExit(f"error: {exc}")
    wall = time.perf_counter() - t0
    print(f"decision: {res.status}")
    print(f"nodes: {res.nodes}")
    print(f"wall_secs: {wall:.3f}")
    if args.output and res.found:
        _dump(args.output, {"type": "factor", "graph": args.graph,
                            "matching": res.factor})
        print(f"certificate: {args.output}")
    return 0


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    try:
        with open(args.certificate) as fh:
            data = json.load(fh)
        matching = [tuple(tuple(v) for v in clique)
                    for clique in data["matching"]]
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read certificate: {exc}")
    cover = g.vertices() if args.cover == "all" else None
    ok, diags = verify_matching(g, matching, cover)
    print("verify: PASS" if ok else "verify: FAIL")
    for d in diags:
        print(f"  {d}")
    return 0


# -- absorb ------------------------------------------------------------------

def cmd_absorb(args) -> int:
    g = _load_graph(args.graph)
    build = build_absorber(g, alpha=as_fraction(args.alpha), mode=args.mode,
                           target=args.target_family, seed=args.seed,
                           node_budget=args.budget_nodes)
    print(f"status: {build.status}")
    stats = build.stats
    print(f"family size: {stats['family_size']}")
    print(f"matching size: {stats['matching_size']} "
          f"(bound {stats['matching_size_bound']}"
          f"{', vacuous at this n' if stats['matching_size_bound'] < 1 else ''})")
    print(f"index bound per tuple: {stats['index_bound']}"
          f"{' (vacuous at this n)' if stats['index_bound'] < 1 else ''}")
    print(f"intersecting pairs Y: {stats['intersecting_pairs']}")
    if build.status != "ok":
        print(f"reason: {build.reason}")
    if args.output and build.status == "ok":
        _dump(args.output, {
            "type": "absorber-state",
            "carriers": build.state.carriers,
            "factors": build.state.factors,
            "stats": stats,
        })
        print(f"state: {args.output}")
    return 0


# -- analyze -----------------------------------------------------------------

def cmd_analyze(args) -> int:
    g = _load_graph(args.graph)
    if args.mode == "extremal":
        cert, refuted, stats = is_delta_extremal(
            g, as_fraction(args.delta), node_budget=args.budget_nodes,
            seed=args.seed)
        if cert is None:
            kind = "exhaustively refuted" if refuted else \
                "search exhausted (non-refuting)"
            print(f"extremal: NOT_FOUND ({kind})")
        else:
            print(f"extremal: certificate max_density={cert.max_density}")
            if args.output:
                _dump(args.output, {"type": "extremality",
                                    "sets": cert.sets,
                                    "delta": cert.delta,
                                    "max_density": cert.max_density})
                print(f"certificate: {args.output}")
    elif args.mode == "theta":
        t = as_fraction(args.t) if args.t else Fraction(g.part_sizes[0], args.r)
        cert, refuted, stats = approximate_to_theta(
            g, args.r, t, as_fraction(args.epsilon), as_fraction(args.delta),
            node_budget=args.budget_nodes, seed=args.seed,
            with_complementary=args.complementary)
        if cert is None:
            kind = "exhaustively refuted" if refuted else \
                "search exhausted (non-refuting)"
            print(f"theta: NOT_FOUND ({kind})")
        else:
            print(f"theta: certificate size_slack={cert.size_slack} "
                  f"max_same_row_density={cert.max_same_row_density}")
            if cert.complementary is not None:
                low = min(cert.complementary.values(), default=None)
                print(f"complementary cross-row density >= {low} (informational)")
            if args.output:
                _dump(args.output, {"type": "theta-approximation",
                                    "rows": cert.partition.rows,
                                    "partition": json.loads(cert.partition.to_json()),
                                    "t": cert.t, "epsilon": cert.epsilon,
                                    "delta": cert.delta,
                                    "size_slack": cert.size_slack,
                                    "max_same_row_density": cert.max_same_row_density})
                print(f"certificate: {args.output}")
    elif args.mode == "lemma3":
        t = as_fraction(args.t)
        try:
            report = lemma3_dichotomy(g, t, as_fraction(args.epsilon),
                                      node_budget=args.budget_nodes,
                                      seed=args.seed)
        except ValueError as exc:
            raise SystemExit(f"error: {exc}")
        print(f"clique count: {report['clique_count']} "
              f"(threshold {report['clique_threshold']})")
        print(f"count branch holds: {report['count_branch']}")
        if "approx_branch" in report:
            print(f"derived parameter: {report['derived_parameter']}"
                  f"{' (exceeds 1; trivializes the check)' if report['derived_parameter'] > 1 else ''}")
            print(f"approximation branch holds: {report['approx_branch']}")
    elif args.mode == "minimize":
        try:
            out = minimize_edges(g, args.floor)
        except ValueError as exc:
            raise SystemExit(f"error: {exc}")
        print(f"edges: {g.edge_count()} -> {out.edge_count()}")
        _write_graph(out, args.output)
    return 0


# -- pipeline ----------------------------------------------------------------

def cmd_pipeline(args) -> int:
    g = _load_graph(args.graph)
    t0 = time.perf_counter()
    try:
        res = full_pipeline(g, alpha=as_fraction(args.alpha),
                            delta=as_fraction(args.delta),
                            target=args.target_family, seed=args.seed,
                            floor=args.floor, node_budget=args.budget_nodes)
    except ValueError as exc:
        raise SystemExit(f"error: {exc}")
    wall = time.perf_counter() - t0
    print(f"outcome: {res.status}")
    print(f"stages: {len(res.trace)}")
    if args.output:
        record = {"command": "pipeline", "graph": args.graph,
                  "seed": args.seed, "outcome": res.status,
                  "trace": res.trace}
        if res.factor is not None:
            record["matching"] = res.factor
        if res.certificate is not None:
            record["certificate"] = {
                "rows": res.certificate.partition.rows,
                "partition": json.loads(res.certificate.partition.to_json()),
                "size_slack": res.certificate.size_slack,
                "max_same_row_density": res.certificate.max_same_row_density,
            }
        _dump(args.output, record)
        print(f"record: {args.output}")
    print(f"wall_secs: {wall:.3f}")
    return 0


# -- fuzz --------------------------------------------------------------------

def cmd_fuzz(args) -> int:
    if args.trials < 1:
        raise SystemExit("error: trials must be at least 1")
    if args.floor > args.n:
        raise SystemExit(f"error: floor {args.floor} exceeds n {args.n}")
    rows = []
    outdir = os.path.dirname(os.path.abspath(args.output)) if args.output else "."
    for trial in range(args.trials):
        trial_seed = args.seed ^ trial
        g, _repairs = generators.random_min_degree(args.k, args.n, args.floor,
                                                   trial_seed)
        t0 = time.perf_counter()
        res = find_factor(g, args.budget_nodes)
        wall = time.perf_counter() - t0
        cert_path = ""
        if res.status == "none":
            cert_path = os.path.join(
                outdir, f"fuzz-exception-{args.k}-{args.n}-{trial_seed}.json")
            with open(cert_path, "w") as fh:
                fh.write(g.to_json() + "\n")
            print(f"WARNING: trial {trial} (seed {trial_seed}) found NO factor "
                  f"at floor {args.floor}; instance archived to {cert_path}",
                  file=sys.stderr)
        rows.append([trial, trial_seed, args.k, args.n, args.floor,
                     res.status, count_crossing_cliques(g), res.nodes,
                     f"{wall:.4f}", cert_path])
    out = sys.stdout if not args.output else open(args.output, "w", newline="")
    try:
        out.write(FUZZ_SCHEMA + "\n")
        writer = csv.writer(out)
        writer.writerow(FUZZ_COLUMNS)
        writer.writerows(rows)
    finally:
        if args.output:
            out.close()
    return 0


# -- report ------------------------------------------------------------------

def _read_records(path: str) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    records = list(reader)
    for col in ("outcome",):
        for rec in records:
            if col not in rec or rec[col] is None:
                raise SystemExit(f"error: {path} missing column {col}")
    return records


def cmd_report(args) -> int:
    records: list[dict] = []
    for path in args.inputs:
        records.extend(_read_records(path))
    by_outcome: dict[str, int] = {}
    walls: list[float] = []
    for rec in records:
        by_outcome[rec["outcome"]] = by_outcome.get(rec["outcome"], 0) + 1
        if rec.get("wall_secs"):
            walls.append(float(rec["wall_secs"]))
    total = len(records)
    print(f"records: {total}")
    for outcome in sorted(by_outcome):
        count = by_outcome[outcome]
        rate = count / total if total else 0.0
        print(f"  {outcome}: {count} ({rate:.1%})")
    if walls:
        walls.sort()
        print(f"wall_secs p50: {statistics.median(walls):.4f}")
        print(f"wall_secs p90: {walls[min(len(walls) - 1, int(0.9 * len(walls)))]:.4f}")
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write("# tilinglab report csv schema 1\n")
            writer = csv.writer(fh)
            writer.writerow(["outcome", "count"])
            for outcome in sorted(by_outcome):
                writer.writerow([outcome, by_outcome[outcome]])
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lab", description="k-partite clique-factor laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph_arg=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-nodes", type=int, default=2_000_000)
        p.add_argument("--budget-secs", type=float, default=600.0)
        p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("gen", help="generate a graph family")
    p.add_argument("family", choices=["theta", "blowup", "complete", "random",
                                      "mindeg", "perturb", "gamma3"])
    p.add_argument("-k", type=int, default=3)
    p.add_argument("-n", type=int, default=6)
    p.add_argument("-r", type=int, default=3)
    p.add_argument("-t", type=int, default=1)
    p.add_argument("--sizes", default=None,
                   help="comma-separated column sizes for blowup")
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--floor", type=int, default=0)
    p.add_argument("--flips", type=int, default=0)
    p.add_argument("--input", default=None, help="input graph for perturb")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="exact factor decision")
    p.add_argument("graph")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-check a matching certificate")
    p.add_argument("certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--cover", choices=["all", "none"], default="none")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("absorb", help="build an absorbing family")
    p.add_argument("graph")
    p.add_argument("--alpha", default="0.1")
    p.add_argument("--mode", choices=["paper", "desk"], default="desk")
    p.add_argument("--target-family", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_absorb)

    p = sub.add_parser("analyze", help="extremal-structure analysis")
    p.add_argument("graph")
    p.add_argument("--mode", choices=["extremal", "theta", "lemma3", "minimize"],
                   required=True)
    p.add_argument("--alpha", default="0.1")
    p.add_argument("--delta", default="0.5")
    p.add_argument("--epsilon", default="0")
    p.add_argument("-r", type=int, default=3)
    p.add_argument("-t", default=None)
    p.add_argument("--floor", type=int, default=0)
    p.add_argument("--complementary", action="store_true",
                   help="also report cross-row densities")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pipeline", help="absorber pipeline end to end")
    p.add_argument("graph")
    p.add_argument("--alpha", default="0.1")
    p.add_argument("--delta", default="0.5")
    p.add_argument("--target-family", type=int, default=10)
    p.add_argument("--floor", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("fuzz", help="randomized factor-threshold trials")
    p.add_argument("-k", type=int, default=3)
    p.add_argument("-n", type=int, default=6)
    p.add_argument("--floor", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("report", help="aggregate run-record CSVs")
    p.add_argument("inputs", nargs="*")
    common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if os.environ.get("LAB_LOG"):
        print(f"lab {args.command}: {vars(args)}", file=sys.stderr)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except RuntimeError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
