"""High-parallelism module: edge-block pull through three class pipelines.

A block dispatcher walks the active blocks in id order and sends each one down
the bounded FIFO pipe of its size class. Each class pipeline drains its pipe
until the halt sentinel, gathering every edge of a block into its destinations
and then applying once per destination.
"""
from __future__ import annotations

import itertools
import queue
import threading
import time
from dataclasses import dataclass

import numpy as np

from .edge_block import EdgeBlockIndex, SizeClass
from .frontier import Bitmap
from .graph import Graph, expand_ranges
from .metrics import IterationMetrics, Mode

LANE_WIDTH = {SizeClass.SMALL: 8, SizeClass.MIDDLE: 64, SizeClass.LARGE: 256}
EDGE_CACHE_BYTES = 64
EDGE_RECORD_BYTES = 8  # two 4-byte vertex ids
DEFAULT_PIPE_CAPACITY = 64
DEFAULT_BATCH_BLOCKS = 32

_HALT = object()


def loop_count(size_class, edge_count) -> int:
    width = LANE_WIDTH[SizeClass(size_class)]
    return -(-int(edge_count) // width)


def loop_counts(size_classes, edge_counts) -> np.ndarray:
    widths = np.array([LANE_WIDTH[c] for c in SizeClass])[np.asarray(size_classes, dtype=np.int64)]
    return -(-np.asarray(edge_counts, dtype=np.int64) // widths)


@dataclass(frozen=True)
class BlockWorkItem:
    block_id: int
    start: int
    stop: int
    size_class: SizeClass
    active: bool = True

    @property
    def edge_count(self) -> int:
        return self.stop - self.start


class Pipe:
    """Bounded FIFO between the block dispatcher and one class pipeline."""

    def __init__(self, capacity=DEFAULT_PIPE_CAPACITY):
        if capacity < 1:
            raise ValueError("pipe capacity must be positive")
        self.capacity = capacity
        self._q = queue.Queue(maxsize=capacity)
        self.closed = False

    def put(self, item: BlockWorkItem):
        assert not self.closed, "put on a closed pipe"
        self._q.put(item)

    def close(self):
        self.closed = True
        self._q.put(_HALT)

    def __iter__(self):
        while True:
            item = self._q.get()
            if item is _HALT:
                return
            yield item


@dataclass
class ClassPipeline:
    size_class: SizeClass
    batch_blocks: int = DEFAULT_BATCH_BLOCKS

    @property
    def lane_width(self) -> int:
        return LANE_WIDTH[self.size_class]

    @property
    def edge_cache_bytes(self) -> int:
        return EDGE_CACHE_BYTES if self.size_class == SizeClass.LARGE else 0

    @property
    def stage_edges(self):
        """Edges staged per pass: every lane fills its register cache once."""
        if self.size_class != SizeClass.LARGE:
            return None
        return self.lane_width * (EDGE_CACHE_BYTES // EDGE_RECORD_BYTES)

    def run(self, pipe: Pipe, index, program, block_changes, pool=None, trace=None, clock=None):
        pending, batch = [], []
        for item in pipe:
            if trace is not None:
                trace.append(("consume", next(clock), item.block_id, int(item.size_class)))
            batch.append(item)
            if len(batch) >= self.batch_blocks:
                pending.append(self._submit(batch, index, program, block_changes, pool))
                batch = []
        if batch:
            pending.append(self._submit(batch, index, program, block_changes, pool))
        for fut in pending:
            if fut is not None:
                fut.result()

    def _submit(self, batch, index, program, block_changes, pool):
        if pool is None:
            self.process(batch, index, program, block_changes)
            return None
        return pool.submit(self.process, batch, index, program, block_changes)

    def process(self, batch, index: EdgeBlockIndex, program, block_changes):
        ids = np.fromiter((it.block_id for it in batch if it.active), dtype=np.int64)
        if len(ids) == 0:
            return
        changed = per_destination_reduce(index, ids, program, self.stage_edges)
        lo = index.dest_lo[ids]
        widths = index.dest_hi[ids] - lo
        offsets = np.concatenate(([0], np.cumsum(widths)[:-1]))
        block_changes[ids] = np.add.reduceat(changed.astype(np.int64), offsets)


def per_destination_reduce(index: EdgeBlockIndex, block_ids, program, stage_edges=None):
    """Gather the edges of ``block_ids`` in slice order, then apply per destination.

    With ``stage_edges`` each block is fed in consecutive stages of that many
    edges, mirroring the per-lane register cache; accumulation continues in
    the same buffer so the per-destination order does not change.
    Returns the changed flag of every destination in the blocks, block by block.
    """
    block_ids = np.asarray(block_ids, dtype=np.int64)
    starts = index.edge_starts[block_ids]
    counts = index.edge_counts[block_ids]
    if stage_edges is None:
        idx = expand_ranges(starts, counts)
        program.pull_gather(index.src[idx], index.dst[idx])
    else:
        for s, c in zip(starts.tolist(), counts.tolist()):
            for a in range(s, s + c, stage_edges):
                b = min(a + stage_edges, s + c)
                program.pull_gather(index.src[a:b], index.dst[a:b])
    lo = index.dest_lo[block_ids]
    vertices = expand_ranges(lo, index.dest_hi[block_ids] - lo)
    return program.pull_apply(vertices)


def pull_iteration(graph: Graph, active_blocks: Bitmap, program, pool=None,
                   pipe_capacity=DEFAULT_PIPE_CAPACITY, batch_blocks=DEFAULT_BATCH_BLOCKS,
                   iteration=0, trace=None, mode=Mode.HIGH, full_scan=False) -> IterationMetrics:
    """One pull iteration over the blocks set in ``active_blocks``.

    ``full_scan`` sends every block through the pipes and lets the pipelines
    skip the inactive ones, the reference the bitmap filter must match.
    """
    t0 = time.perf_counter()
    index = graph.blocks
    ids = active_blocks.to_active_list()
    is_active = None
    if full_scan:
        is_active = active_blocks.to_mask()
        ids = np.arange(index.block_count, dtype=np.int64)
    program.begin_iteration()
    block_changes = np.zeros(index.block_count, dtype=np.int64)
    clock = itertools.count()

    pipes = {c: Pipe(pipe_capacity) for c in SizeClass}
    lines = {c: ClassPipeline(c, batch_blocks) for c in SizeClass}
    errors = []

    def consume(c):
        try:
            lines[c].run(pipes[c], index, program, block_changes, pool, trace, clock)
        except BaseException as exc:
            errors.append(exc)
            for _ in pipes[c]:
                pass

    threads = [threading.Thread(target=consume, args=(c,), daemon=True) for c in SizeClass]
    for t in threads:
        t.start()
    classes = index.size_class[ids].tolist()
    starts = index.edge_starts[ids].tolist()
    stops = index.edge_starts[ids + 1].tolist()
    flags = is_active[ids].tolist() if full_scan else itertools.repeat(True)
    for b, c, s, e, a in zip(ids.tolist(), classes, starts, stops, flags):
        item = BlockWorkItem(b, s, e, SizeClass(c), a)
        if trace is not None:
            trace.append(("emit", next(clock), b, c))
        pipes[item.size_class].put(item)
    for p in pipes.values():
        p.close()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]

    if full_scan:
        ids = ids[is_active]
    counts = index.edge_counts[ids]
    cls = index.size_class[ids]
    loops = loop_counts(cls, counts)
    large = index.size_class == SizeClass.LARGE
    metrics = IterationMetrics(
        iteration=iteration,
        mode=mode,
        engine="block_pull",
        edges_examined=int(counts.sum()),
        active_blocks={c.name.lower(): int(np.count_nonzero(cls == c)) for c in SizeClass},
        loop_counts={c.name.lower(): int(loops[cls == c].sum()) for c in SizeClass},
        large_idle=int(np.count_nonzero(large & (block_changes == 0))),
        wall_time=time.perf_counter() - t0,
    )
    metrics.block_changes = block_changes
    return metrics
