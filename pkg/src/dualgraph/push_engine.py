"""Low-parallelism module: vertex-centric push over the out-edge CSR."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .metrics import IterationMetrics, Mode

GROUP_LANES = 16


@dataclass(frozen=True)
class PushWorkGroup:
    """A 16-lane group owning one active vertex; it loops over out-edges 16 at a time."""

    assigned_vertex: int
    out_degree: int
    lanes: int = GROUP_LANES

    @property
    def loop_count(self) -> int:
        return -(-self.out_degree // self.lanes)


def group_loops(degrees, lanes=GROUP_LANES) -> np.ndarray:
    return -(-np.asarray(degrees, dtype=np.int64) // lanes)


def _split_by_work(active, degrees, parts):
    """Contiguous chunks of the active list with roughly equal edge counts."""
    if parts <= 1 or len(active) <= 1:
        return [active]
    cum = np.cumsum(degrees)
    cuts = np.searchsorted(cum, np.linspace(0, cum[-1], parts + 1)[1:-1], side="right")
    return [c for c in np.split(active, np.unique(cuts)) if len(c)]


def push_iteration(graph: Graph, active, program, pool=None, workers=1,
                   iteration=0, mode=Mode.LOW, full_scan=False) -> IterationMetrics:
    """Scatter every active vertex's update along its out-edges.

    ``active`` is an ascending id array. Chunks are scattered on ``pool`` and
    merged into the program state in chunk order at the barrier. ``full_scan``
    walks every vertex and drops the edges of inactive ones before scattering.
    """
    t0 = time.perf_counter()
    active = np.asarray(active, dtype=np.int64)
    degrees = graph.out_degree[active]
    column = graph.csr.column
    program.begin_iteration()
    scan = np.arange(graph.vertex_count, dtype=np.int64) if full_scan else active
    keep = None
    if full_scan:
        keep = np.zeros(graph.vertex_count, dtype=bool)
        keep[active] = True

    def scatter(chunk):
        src, slots = graph.out_edge_slots(chunk)
        if keep is not None:
            live = keep[src]
            src, slots = src[live], slots[live]
        return program.push_scatter(src, column[slots])

    chunks = _split_by_work(scan, graph.out_degree[scan], workers)
    if pool is not None and len(chunks) > 1:
        parts = list(pool.map(scatter, chunks))
    else:
        parts = [scatter(c) for c in chunks]
    for dst, values in parts:
        program.push_merge(dst, values)

    return IterationMetrics(
        iteration=iteration,
        mode=mode,
        engine="push",
        active_vertices=len(active),
        edges_examined=int(degrees.sum()),
        loop_counts={"push": int(group_loops(degrees).sum())},
        wall_time=time.perf_counter() - t0,
    )
