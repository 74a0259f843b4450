"""Command line entry point: ``dualgraph {run,compare,block-report}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import dispatcher as dsp
from .edge_block import DEFAULT_PIPELINE_COUNT, DEFAULT_PIPELINE_DEPTH, EdgeBlockConfig
from .executor import WORKERS_ENV
from .graph_io import EdgeListError, load_graph
from .harness import comparison_csv, compare, emit_block_report, prepare, run_graph

ALGORITHMS = ("bfs", "pr", "wcc")
STRATEGIES = ("vc", "vch", "ec", "ech", "eb", "dm")


def _graph_args(p):
    p.add_argument("--graph", required=True, help="edge list (src dst [w] per line) or binary cache")
    p.add_argument("--undirected", action="store_true", help="store every edge in both directions")
    p.add_argument("--group-power", type=int, default=None,
                   help="blocks cover 8**N destinations (default: sized from edge count)")
    p.add_argument("--pipeline-depth", type=int, default=DEFAULT_PIPELINE_DEPTH)
    p.add_argument("--pipeline-count", type=int, default=DEFAULT_PIPELINE_COUNT)


def _run_args(p):
    p.add_argument("--algo", choices=ALGORITHMS, default="bfs")
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--alpha", type=float, default=dsp.DEFAULT_ALPHA)
    p.add_argument("--beta", type=float, default=dsp.DEFAULT_BETA)
    p.add_argument("--gamma", type=float, default=dsp.DEFAULT_GAMMA)
    p.add_argument("--hub-threshold", type=int, default=dsp.DEFAULT_HUB_THRESHOLD)
    p.add_argument("--literal-ineq", action="store_true",
                   help="invert the alpha and beta comparisons")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--workers", type=int, default=None, help=f"worker pool size (env {WORKERS_ENV})")


def build_parser():
    parser = argparse.ArgumentParser(prog="dualgraph", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one algorithm under one strategy")
    _graph_args(p)
    _run_args(p)
    p.add_argument("--strategy", choices=STRATEGIES, default="dm")
    p.add_argument("--json", type=Path, help="write the run report here")
    p.add_argument("--csv", type=Path, help="write per-iteration rows here")
    p.add_argument("--output", type=Path, help="write 'vertex value' lines here")

    p = sub.add_parser("compare", help="run several strategies on one graph")
    _graph_args(p)
    _run_args(p)
    p.add_argument("--strategies", default="vc,dm",
                   help="comma separated, e.g. vc,vch,ec,ech,eb,dm or eb:n=1,eb:n=2")
    p.add_argument("--csv", type=Path)

    p = sub.add_parser("block-report", help="per-block edge counts and size classes")
    _graph_args(p)
    p.add_argument("--csv", type=Path)
    return parser


def _pr_params(args):
    return {"damping": args.damping, "epsilon": args.epsilon, "max_iters": args.max_iters}


def _options(args):
    return {"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma,
            "hub_threshold": args.hub_threshold, "literal": args.literal_ineq,
            "workers": args.workers}


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        edges = load_graph(args.graph, directed=not args.undirected)
    except (OSError, EdgeListError) as exc:
        print(f"dualgraph: {exc}", file=sys.stderr)
        return 2
    block_kwargs = {"pipeline_depth": args.pipeline_depth, "pipeline_count": args.pipeline_count}

    if args.command == "block-report":
        if args.group_power is None:
            config = EdgeBlockConfig.auto(max(edges.edge_count, 1), **block_kwargs)
        else:
            config = EdgeBlockConfig(args.group_power, **block_kwargs)
        _emit(emit_block_report(edges, config), args.csv)
        return 0

    if args.source >= max(edges.vertex_count, 1) and args.algo == "bfs":
        print(f"dualgraph: source {args.source} out of range", file=sys.stderr)
        return 2

    if args.command == "compare":
        specs = [s.strip() for s in args.strategies.split(",") if s.strip()]
        try:
            rows = compare(edges, args.algo, specs, args.graph, args.source, args.group_power,
                           _pr_params(args), **_options(args))
        except ValueError as exc:
            print(f"dualgraph: {exc}", file=sys.stderr)
            return 2
        _emit(comparison_csv(rows), args.csv)
        return 0

    graph = prepare(edges, args.algo, args.group_power, **block_kwargs)
    report, res = run_graph(graph, args.algo, args.strategy, args.graph, args.source,
                            _pr_params(args), **_options(args))
    text = report.to_json()
    if args.json:
        args.json.write_text(text)
    else:
        print(text)
    if args.csv:
        report.to_csv(args.csv)
    if args.output:
        values = res.result
        ids = edges.id_map if edges.id_map is not None else np.arange(len(values))
        lines = (f"{i} {v}" for i, v in zip(ids.tolist(), values.tolist()))
        args.output.write_text("\n".join(lines) + "\n")
    if not report.converged:
        print("dualgraph: pagerank did not converge within --max-iters", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
