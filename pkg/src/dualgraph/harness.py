"""Experiment runs, strategy comparisons and block statistics."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algorithms import UNVISITED, make_program
from .edge_block import EdgeBlockConfig, SizeClass, build_edge_blocks
from .executor import RunResult, Strategy, run_program
from .graph import Graph
from .graph_io import RawEdgeList, load_graph
from .metrics import mteps

REPORT_SCHEMA = 1
RUN_OPTION_KEYS = ("alpha", "beta", "gamma", "hub_threshold", "literal", "workers",
                   "pipe_capacity", "batch_blocks", "full_scan", "trace")


@dataclass
class RunReport:
    strategy: str
    algorithm: str
    dataset: str
    vertex_count: int
    edge_count: int
    group_power: int
    total_time: float
    edges_examined: int
    total_loops: int
    iterations: list = field(default_factory=list)
    mode_switches: list = field(default_factory=list)
    converged: bool = True
    summary: dict = field(default_factory=dict)

    @property
    def mteps(self) -> float:
        return mteps(self.edges_examined, self.total_time)

    def to_dict(self):
        return _finite({
            "schema": REPORT_SCHEMA,
            "strategy": self.strategy,
            "algorithm": self.algorithm,
            "dataset": self.dataset,
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "group_power": self.group_power,
            "total_time": self.total_time,
            "edges_examined": self.edges_examined,
            "total_loops": self.total_loops,
            "mteps": self.mteps,
            "converged": self.converged,
            "summary": self.summary,
            "mode_switches": self.mode_switches,
            "iterations": self.iterations,
        })

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, default=_jsonable)
        if path is not None:
            Path(path).write_text(text)
        return text

    def iteration_rows(self):
        for it in self.iterations:
            row = {
                "strategy": self.strategy, "algorithm": self.algorithm,
                "iteration": it["iteration"], "mode": it["mode"], "engine": it["engine"],
                "active_vertices": it["active_vertices"], "edges_examined": it["edges_examined"],
                "total_loops": it["total_loops"], "wall_time": it["wall_time"],
            }
            for c in SizeClass:
                row[f"active_{c.name.lower()}"] = it["active_blocks"][c.name.lower()]
            yield row

    def to_csv(self, path=None) -> str:
        text = _rows_to_csv(list(self.iteration_rows()))
        if path is not None:
            Path(path).write_text(text)
        return text


def _finite(obj):
    """Replace infinite ratios (empty denominators) with None so the JSON stays strict."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float):
        return obj
    raise TypeError(f"cannot serialize {type(obj)}")


def _rows_to_csv(rows, fieldnames=None) -> str:
    buf = io.StringIO()
    if fieldnames is None:
        fieldnames = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def summarize(algorithm, values) -> dict:
    if algorithm == "bfs":
        reached = values != UNVISITED
        return {"reached": int(reached.sum()),
                "max_depth": int(values[reached].max()) if reached.any() else 0}
    if algorithm == "wcc":
        return {"components": int(len(np.unique(values)))}
    top = np.argsort(-values, kind="stable")[:10]
    return {"rank_sum": float(values.sum()), "top": top.tolist()}


def prepare(edges: RawEdgeList, algorithm, group_power=None, **block_kwargs) -> Graph:
    if algorithm == "wcc" and edges.directed:
        edges = edges.symmetrized()
    if group_power is None:
        config = EdgeBlockConfig.auto(max(edges.edge_count, 1), **block_kwargs)
    else:
        config = EdgeBlockConfig(group_power, **block_kwargs)
    return Graph(edges, config)


def run_graph(graph: Graph, algorithm, strategy, dataset="<memory>", source=0,
              pr_params=None, **options) -> tuple[RunReport, RunResult]:
    program = make_program(algorithm, graph, source=source, **(pr_params or {}))
    res = run_program(graph, program, strategy, **options)
    report = RunReport(
        strategy=Strategy(strategy).value,
        algorithm=algorithm,
        dataset=str(dataset),
        vertex_count=graph.vertex_count,
        edge_count=graph.edge_count,
        group_power=graph.block_config.group_power,
        total_time=res.total_time,
        edges_examined=res.edges_examined,
        total_loops=res.total_loops,
        iterations=[m.to_dict() for m in res.iterations],
        mode_switches=res.mode_switches,
        converged=res.converged,
        summary=summarize(algorithm, res.result),
    )
    return report, res


def run(dataset, algorithm="bfs", strategy="dm", directed=True, group_power=None,
        source=0, pr_params=None, **options) -> RunReport:
    edges = load_graph(dataset, directed=directed)
    graph = prepare(edges, algorithm, group_power)
    report, _ = run_graph(graph, algorithm, strategy, dataset, source, pr_params, **options)
    return report


def parse_strategy_spec(spec: str):
    """``"dm"`` or ``"eb:n=2"`` -> (Strategy, group power override or None)."""
    name, _, opt = spec.partition(":")
    power = None
    if opt:
        key, _, value = opt.partition("=")
        if key != "n":
            raise ValueError(f"unknown strategy option {opt!r}")
        power = int(value)
    return Strategy(name.lower()), power


def compare(edges: RawEdgeList, algorithm, strategies, dataset="<memory>", source=0,
            group_power=None, pr_params=None, **options) -> list[dict]:
    """One metrics row per strategy spec, in the order given."""
    if len(strategies) < 2:
        raise ValueError("compare needs at least two strategies")
    base = prepare(edges, algorithm, group_power)
    rows = []
    for spec in strategies:
        strat, power = parse_strategy_spec(spec)
        graph = base
        if power is not None:
            graph = base.with_block_config(EdgeBlockConfig(power))
        report, _ = run_graph(graph, algorithm, strat, dataset, source, pr_params, **options)
        rows.append({
            "strategy": spec,
            "group_power": report.group_power,
            "iterations": len(report.iterations),
            "edges_examined": report.edges_examined,
            "total_loops": report.total_loops,
            "wall_time": report.total_time,
            "mteps": report.mteps,
            "mode_switches": len(report.mode_switches),
        })
    return rows


def comparison_csv(rows) -> str:
    return _rows_to_csv(rows)


BLOCK_REPORT_FIELDS = ["block", "dest_lo", "dest_hi", "edge_count", "size_class"]


def emit_block_report(edges: RawEdgeList, config: EdgeBlockConfig) -> str:
    """CSV with one row per edge block; ``dest_hi`` is inclusive."""
    index = build_edge_blocks(edges, config)
    names = [c.name.lower() for c in SizeClass]
    lo, hi = index.dest_lo, index.dest_hi
    rows = [
        {"block": b, "dest_lo": int(lo[b]), "dest_hi": int(hi[b]) - 1,
         "edge_count": int(index.edge_counts[b]), "size_class": names[index.size_class[b]]}
        for b in range(index.block_count)
    ]
    return _rows_to_csv(rows, BLOCK_REPORT_FIELDS)
