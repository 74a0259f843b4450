"""Comparison engines without edge blocks: a full edge stream and a vertex-centric pull."""
from __future__ import annotations

import time

import numpy as np

from .graph import Graph, expand_ranges
from .metrics import IterationMetrics, Mode
from .push_engine import GROUP_LANES, group_loops


def edge_stream_iteration(graph: Graph, program, iteration=0, mode=Mode.HIGH) -> IterationMetrics:
    """Stream the whole unordered edge list and apply to every vertex."""
    t0 = time.perf_counter()
    edges = graph.edges
    program.begin_iteration()
    program.pull_gather(edges.src, edges.dst)
    program.pull_apply(np.arange(graph.vertex_count, dtype=np.int64))
    m = edges.edge_count
    return IterationMetrics(
        iteration=iteration, mode=mode, engine="edge_stream",
        edges_examined=m,
        loop_counts={"stream": -(-m // GROUP_LANES)},
        wall_time=time.perf_counter() - t0,
    )


def vertex_pull_iteration(graph: Graph, program, iteration=0, mode=Mode.HIGH) -> IterationMetrics:
    """Each candidate vertex reads its in-edges from the transposed CSR.

    Programs with a ``pull_candidates`` hook restrict the candidates; those with
    ``pull_settles(src)`` stop reading a vertex at the first in-edge that settles
    it (bottom-up BFS).
    """
    t0 = time.perf_counter()
    in_csr = graph.in_csr
    rows = in_csr.row_index
    program.begin_iteration()
    cand = np.flatnonzero(graph.in_degree > 0)
    if hasattr(program, "pull_candidates"):
        cand = cand[program.pull_candidates()[cand]]
    counts = rows[cand + 1] - rows[cand]
    idx = expand_ranges(rows[cand], counts)
    src = in_csr.column[idx]
    dst = np.repeat(cand, counts)
    if hasattr(program, "pull_settles") and len(idx):
        seg = np.concatenate(([0], np.cumsum(counts)[:-1]))
        pos = np.arange(len(idx)) - np.repeat(seg, counts)
        big = np.iinfo(np.int64).max
        first = np.minimum.reduceat(np.where(program.pull_settles(src), pos, big), seg)
        examined = np.where(first == big, counts, first + 1)
        keep = pos < np.repeat(examined, counts)
        src, dst = src[keep], dst[keep]
    else:
        examined = counts
    program.pull_gather(src, dst)
    program.pull_apply(cand)
    return IterationMetrics(
        iteration=iteration, mode=mode, engine="vertex_pull",
        edges_examined=int(examined.sum()),
        loop_counts={"vertex_pull": int(group_loops(examined).sum())},
        wall_time=time.perf_counter() - t0,
    )
