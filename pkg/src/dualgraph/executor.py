"""Iteration driver for the six execution strategies."""
from __future__ import annotations

import enum
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dispatcher as dsp
from .algorithms import InitialFrontier, Program
from .baselines import edge_stream_iteration, vertex_pull_iteration
from .edge_block import SizeClass
from .frontier import Bitmap
from .graph import Graph
from .metrics import IterationMetrics, Mode
from .pull_engine import DEFAULT_BATCH_BLOCKS, DEFAULT_PIPE_CAPACITY, pull_iteration
from .push_engine import push_iteration

WORKERS_ENV = "DUALGRAPH_WORKERS"


class Strategy(str, enum.Enum):
    VC = "vc"    # push every iteration
    VCH = "vch"  # push / vertex-centric pull hybrid
    EC = "ec"    # full edge stream every iteration
    ECH = "ech"  # push for sparse iterations, full edge stream for dense ones
    EB = "eb"    # edge-block pull every iteration
    DM = "dm"    # push + edge-block pull, switched by the dispatcher

    @property
    def hybrid(self) -> bool:
        return self in (Strategy.VCH, Strategy.ECH, Strategy.DM)


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


@dataclass
class RunResult:
    program: Program
    strategy: Strategy
    iterations: list[IterationMetrics] = field(default_factory=list)
    decisions: list[dict] = field(default_factory=list)
    pipe_trace: list[list] = field(default_factory=list)
    total_time: float = 0.0

    @property
    def result(self):
        return self.program.result()

    @property
    def converged(self) -> bool:
        return self.program.converged

    @property
    def edges_examined(self) -> int:
        return sum(m.edges_examined for m in self.iterations)

    @property
    def total_loops(self) -> int:
        return sum(m.total_loops for m in self.iterations)

    @property
    def mode_switches(self) -> list[dict]:
        return [e for e in self.decisions if e["from"] != e["to"]]

    @property
    def modes(self) -> list[str]:
        return [m.mode.value for m in self.iterations]


def active_block_bitmap(graph: Graph, program: Program, vertex_mask):
    """Blocks holding an edge out of the frontier, minus blocks the program marks finished."""
    hit, reads = graph.hit_blocks(vertex_mask)
    valid = program.valid_blocks()
    if valid is not None:
        hit &= valid
    return Bitmap.from_mask(hit), reads


def run_program(graph: Graph, program: Program, strategy="dm", *,
                alpha=dsp.DEFAULT_ALPHA, beta=dsp.DEFAULT_BETA, gamma=dsp.DEFAULT_GAMMA,
                hub_threshold=dsp.DEFAULT_HUB_THRESHOLD, literal=False,
                workers=None, pipe_capacity=DEFAULT_PIPE_CAPACITY,
                batch_blocks=DEFAULT_BATCH_BLOCKS, full_scan=False, trace=False,
                max_iterations=100_000) -> RunResult:
    strategy = Strategy(strategy)
    workers = default_workers() if workers is None else int(workers)
    run = RunResult(program, strategy)
    n = graph.vertex_count
    all_active = program.initial_frontier == InitialFrontier.ALL_VERTICES

    uses_blocks = strategy in (Strategy.EB, Strategy.DM)
    if strategy == Strategy.DM:
        cls = graph.blocks.size_class
        nl = int(np.count_nonzero(cls == SizeClass.LARGE))
        nb, nl = len(cls) - nl, nl
    else:
        # no blocks: the vertex set is the single small+middle population
        nb, nl = n, 0
    state = dsp.initial_state(n, all_active, nb=nb, nl=nl, alpha=alpha, beta=beta, gamma=gamma,
                              hub_degree_threshold=hub_threshold, literal=literal)
    if strategy.hybrid:
        mode = state.mode
    else:
        mode = Mode.LOW if strategy == Strategy.VC else Mode.HIGH

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    t_start = time.perf_counter()
    pending_blocks = None
    try:
        it = 0
        frontier = program.frontier
        while frontier.any() and it < max_iterations:
            t0 = time.perf_counter()
            reads = 0
            if mode == Mode.LOW:
                m = push_iteration(graph, np.flatnonzero(frontier), program, pool, workers,
                                   iteration=it, mode=mode, full_scan=full_scan)
            elif uses_blocks:
                if pending_blocks is None:
                    pending_blocks, reads = active_block_bitmap(graph, program, frontier)
                log = [] if trace else None
                m = pull_iteration(graph, pending_blocks, program, pool, pipe_capacity,
                                   batch_blocks, iteration=it, trace=log, mode=mode,
                                   full_scan=full_scan)
                if trace:
                    run.pipe_trace.append(log)
            elif strategy in (Strategy.EC, Strategy.ECH):
                m = edge_stream_iteration(graph, program, iteration=it, mode=mode)
            else:
                m = vertex_pull_iteration(graph, program, iteration=it, mode=mode)
            pending_blocks = None

            m.active_vertices = int(np.count_nonzero(frontier))
            frontier = program.end_iteration()
            m.newly_active = int(np.count_nonzero(frontier))
            if m.newly_active:
                m.max_new_degree = int(graph.out_degree[frontier].max())

            if strategy.hybrid:
                if mode == Mode.HIGH:
                    if uses_blocks and frontier.any():
                        pending_blocks, more = active_block_bitmap(graph, program, frontier)
                        reads += more
                        cls = graph.blocks.size_class[pending_blocks.to_active_list()]
                        m.next_small_middle_blocks = int(np.count_nonzero(cls != SizeClass.LARGE))
                    elif not uses_blocks:
                        m.next_small_middle_blocks = m.newly_active
                state, event = dsp.advance(state, m)
                m.dispatcher_ratios = {k: event[k] for k in ("na_ni", "na_nb", "fl_nl") if k in event}
                run.decisions.append(event)
                if state.mode != mode:
                    mode = state.mode
                    if mode == Mode.LOW:
                        pending_blocks = None

            m.bookkeeping_reads = reads
            m.wall_time = time.perf_counter() - t0
            run.iterations.append(m)
            it += 1
    finally:
        if pool is not None:
            pool.shutdown()
    run.total_time = time.perf_counter() - t_start
    return run
