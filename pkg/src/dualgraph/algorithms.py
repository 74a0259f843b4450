"""Gather/apply/scatter programs for BFS, PageRank and WCC.

Each program owns its vertex state and exposes the same hooks to every engine:

* ``begin_iteration()`` once per iteration, before any edge is touched;
* push side: ``push_scatter(src, dst)`` is pure and may run on any worker,
  ``push_merge(dst, values)`` is applied at the barrier in a fixed order;
* pull side: ``pull_gather(src, dst)`` accumulates into a per-iteration buffer
  and ``pull_apply(vertices)`` finalizes those destinations. Concurrent calls
  must touch disjoint destination sets, which the edge-block layout guarantees;
* ``end_iteration()`` returns the next frontier mask.
"""
from __future__ import annotations

import enum
import logging

import numpy as np

from .graph import Graph

log = logging.getLogger(__name__)

UNVISITED = 255
MAX_DEPTH = 254


class InitialFrontier(str, enum.Enum):
    SINGLE_SOURCE = "single_source"
    ALL_VERTICES = "all_vertices"


class Program:
    name = ""
    initial_frontier = InitialFrontier.ALL_VERTICES

    def __init__(self, graph: Graph):
        self.graph = graph
        self.n = graph.vertex_count
        self.frontier = np.zeros(self.n, dtype=bool)
        self.iteration = 0
        self.converged = True

    # a block whose destinations can no longer change is skipped
    def valid_blocks(self):
        return None

    def result(self):
        raise NotImplementedError


class BfsProgram(Program):
    """Level-synchronous BFS; ``depth`` is uint8 with 255 meaning unvisited."""

    name = "bfs"
    initial_frontier = InitialFrontier.SINGLE_SOURCE

    def __init__(self, graph: Graph, source: int):
        super().__init__(graph)
        if not 0 <= source < self.n:
            raise ValueError(f"source {source} out of range")
        self.depth = np.full(self.n, UNVISITED, dtype=np.uint8)
        self.depth[source] = 0
        self.frontier[source] = True
        self.level = 0

    def begin_iteration(self):
        self.next_level = np.uint8(self.level + 1)
        self.reached = np.zeros(self.n, dtype=bool)

    def push_scatter(self, src, dst):
        return dst[self.depth[dst] == UNVISITED], None

    def push_merge(self, dst, values):
        self.depth[dst] = self.next_level

    def pull_gather(self, src, dst):
        m = self.frontier[src]
        m &= self.depth[dst] == UNVISITED
        self.reached[dst[m]] = True

    def pull_apply(self, vertices):
        hit = self.reached[vertices]
        self.depth[vertices[hit]] = self.next_level
        changed = np.zeros(len(vertices), dtype=bool)
        changed[hit] = True
        return changed

    def pull_candidates(self):
        return self.depth == UNVISITED

    def pull_settles(self, src):
        return self.frontier[src]

    def end_iteration(self):
        self.level += 1
        self.iteration += 1
        nxt = self.depth == self.level
        if self.level >= MAX_DEPTH and nxt.any():
            log.warning("BFS depth reached %d; deeper vertices stay at %d", MAX_DEPTH, UNVISITED)
            nxt[:] = False
        self.frontier = nxt
        return nxt

    def valid_blocks(self):
        blocks = self.graph.blocks
        open_dest = (self.depth == UNVISITED) & (self.graph.in_degree > 0)
        if blocks.block_count == 0:
            return np.zeros(0, dtype=bool)
        return np.add.reduceat(open_dest, blocks.dest_lo) > 0

    def result(self):
        return self.depth


class WccProgram(Program):
    """Min-label propagation; run it on a symmetrized graph."""

    name = "wcc"

    def __init__(self, graph: Graph):
        super().__init__(graph)
        self.labels = np.arange(self.n, dtype=np.int32)
        self.frontier[:] = True

    def begin_iteration(self):
        self.prev = self.labels.copy()

    def push_scatter(self, src, dst):
        vals = self.prev[src]
        better = vals < self.prev[dst]
        return dst[better], vals[better]

    def push_merge(self, dst, values):
        np.minimum.at(self.labels, dst, values)

    def pull_gather(self, src, dst):
        m = self.frontier[src]
        np.minimum.at(self.labels, dst[m], self.prev[src[m]])

    def pull_apply(self, vertices):
        return self.labels[vertices] < self.prev[vertices]

    def end_iteration(self):
        self.iteration += 1
        self.frontier = self.labels < self.prev
        return self.frontier

    def result(self):
        return self.labels


class PageRankProgram(Program):
    """Damped PageRank with uniform redistribution of dangling mass.

    The state is ``rank`` plus ``sent``, the value each vertex last propagated.
    Throughout the run ``rank = (1-d)/N + d * M @ sent`` holds (M includes the
    dangling redistribution), so push iterations can forward only the change
    ``rank - sent`` while pull iterations recompute destinations from scratch.
    A vertex is active while ``|rank - sent| >= epsilon``. Ranks start at 1/N;
    the bookkeeping for that start is a pending uniform term cleared by the
    first iteration, in which every vertex is active.
    """

    name = "pr"

    def __init__(self, graph: Graph, damping=0.85, epsilon=1e-4, max_iters=100):
        super().__init__(graph)
        if not 0 < damping < 1:
            raise ValueError("damping must lie in (0, 1)")
        self.d = damping
        self.epsilon = epsilon
        self.max_iters = max_iters
        n = max(self.n, 1)
        self.base = (1.0 - damping) / n
        self.rank = np.full(self.n, 1.0 / n)
        self.sent = np.zeros(self.n)
        self.pending = 1.0
        deg = graph.out_degree
        self.dangling = deg == 0
        self.inv_deg = np.zeros(self.n)
        self.inv_deg[~self.dangling] = 1.0 / deg[~self.dangling]
        self.frontier[:] = True
        self.converged = False

    def begin_iteration(self):
        act = self.frontier
        self.delta = np.where(act, self.rank - self.sent, 0.0)
        dangling_old = self.sent[self.dangling].sum()
        self.sent = np.where(act, self.rank, self.sent)
        self.dangling_mass = self.sent[self.dangling].sum()
        self.dangling_shift = self.dangling_mass - dangling_old - self.pending
        self.pending = 0.0
        self.recomputed = np.zeros(self.n, dtype=bool)
        self.acc = np.zeros(self.n)
        self.push_weight = self.d * self.delta * self.inv_deg

    def push_scatter(self, src, dst):
        return dst, self.push_weight[src]

    def push_merge(self, dst, values):
        np.add.at(self.rank, dst, values)

    def pull_gather(self, src, dst):
        np.add.at(self.acc, dst, self.sent[src] * self.inv_deg[src])

    def pull_apply(self, vertices):
        old = self.rank[vertices]
        new = self.base + self.d * (self.acc[vertices] + self.dangling_mass / self.n)
        self.rank[vertices] = new
        self.recomputed[vertices] = True
        return np.abs(new - old) >= self.epsilon

    def end_iteration(self):
        self.iteration += 1
        rest = ~self.recomputed
        self.rank[rest] += self.d * self.dangling_shift / self.n
        self.frontier = np.abs(self.rank - self.sent) >= self.epsilon
        self.converged = not self.frontier.any()
        if not self.converged and self.iteration >= self.max_iters:
            log.info("pagerank stopped at max_iters=%d without converging", self.max_iters)
            self.frontier = np.zeros(self.n, dtype=bool)
        return self.frontier

    def result(self):
        # the unsent residual (< epsilon per vertex) is all that separates the
        # raw sum from 1, so report the normalized vector
        total = self.rank.sum()
        return self.rank / total if total > 0 else self.rank.copy()


def make_program(name, graph: Graph, source=0, **params) -> Program:
    if name == "bfs":
        return BfsProgram(graph, source)
    if name == "wcc":
        return WccProgram(graph)
    if name == "pr":
        return PageRankProgram(graph, **params)
    raise ValueError(f"unknown algorithm {name!r}")


def bfs(graph, source=0, strategy="dm", **options):
    from .executor import run_program

    graph = _as_graph(graph)
    return run_program(graph, BfsProgram(graph, source), strategy, **options).result


def pagerank(graph, damping=0.85, epsilon=1e-4, max_iters=100, strategy="dm", **options):
    from .executor import run_program

    graph = _as_graph(graph)
    prog = PageRankProgram(graph, damping, epsilon, max_iters)
    return run_program(graph, prog, strategy, **options).result


def wcc(graph, strategy="dm", **options):
    """Weakly connected component labels (minimum vertex id per component)."""
    from .executor import run_program

    graph = _as_graph(graph)
    if graph.edges.directed:
        graph = graph.symmetrized()
    return run_program(graph, WccProgram(graph), strategy, **options).result


def _as_graph(g):
    return g if isinstance(g, Graph) else Graph(g)
