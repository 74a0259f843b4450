"""Destination-range edge blocks and their size classes."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._sort import counting_sort
from .graph_io import RawEdgeList

DEFAULT_PIPELINE_DEPTH = 512
DEFAULT_PIPELINE_COUNT = 3


class SizeClass(enum.IntEnum):
    SMALL = 0
    MIDDLE = 1
    LARGE = 2


@dataclass(frozen=True)
class EdgeBlockConfig:
    group_power: int = 1
    pipeline_depth: int = DEFAULT_PIPELINE_DEPTH
    pipeline_count: int = DEFAULT_PIPELINE_COUNT
    small_threshold: int = 64
    large_threshold: int = 2048

    def __post_init__(self):
        if self.group_power < 1:
            raise ValueError("group_power must be >= 1")
        if self.pipeline_depth < 1 or self.pipeline_count < 1:
            raise ValueError("pipeline depth and count must be positive")
        if not self.small_threshold < self.large_threshold:
            raise ValueError("small_threshold must be below large_threshold")

    @property
    def group_width(self) -> int:
        return 8**self.group_power

    @classmethod
    def auto(cls, edge_count, pipeline_depth=DEFAULT_PIPELINE_DEPTH,
             pipeline_count=DEFAULT_PIPELINE_COUNT, **kwargs):
        n = choose_group_power(edge_count, pipeline_depth, pipeline_count)
        return cls(n, pipeline_depth, pipeline_count, **kwargs)


def choose_group_power(G, D, P) -> int:
    """Largest integer ``n >= 1`` with ``n < (G / (D * P)) ** (1/8)``, else 1."""
    if G < 1 or D < 1 or P < 1:
        raise ValueError("G, D and P must be positive")
    bound = (G / (D * P)) ** 0.125
    # settle the float estimate with exact arithmetic: n**8 * D * P < G
    n = math.floor(bound) + 1
    while n >= 1 and n**8 * D * P >= G:
        n -= 1
    return max(n, 1)


def classify(edge_count, config: EdgeBlockConfig = EdgeBlockConfig()) -> SizeClass:
    if edge_count < config.small_threshold:
        return SizeClass.SMALL
    if edge_count <= config.large_threshold:
        return SizeClass.MIDDLE
    return SizeClass.LARGE


def classify_many(edge_counts, config: EdgeBlockConfig) -> np.ndarray:
    counts = np.asarray(edge_counts)
    out = np.full(counts.shape, SizeClass.MIDDLE, dtype=np.int8)
    out[counts < config.small_threshold] = SizeClass.SMALL
    out[counts > config.large_threshold] = SizeClass.LARGE
    return out


@dataclass(frozen=True)
class EdgeBlockIndex:
    """Edges bucketed by destination range, with per-block count/start arrays."""

    config: EdgeBlockConfig
    vertex_count: int
    edge_counts: np.ndarray
    edge_starts: np.ndarray  # block_count + 1 entries
    size_class: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    weights: np.ndarray | None = None
    build_ops: int = field(default=0, compare=False)
    # bucketed slot -> position in the unordered input list
    edge_ids: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def block_count(self) -> int:
        return len(self.edge_counts)

    @property
    def width(self) -> int:
        return self.config.group_width

    @property
    def dest_lo(self) -> np.ndarray:
        return np.arange(self.block_count, dtype=np.int64) * self.width

    @property
    def dest_hi(self) -> np.ndarray:
        """Exclusive upper bound of each block's destination range."""
        return np.minimum(self.dest_lo + self.width, self.vertex_count)

    def block_of(self, vertex):
        return np.asarray(vertex) // self.width

    def edge_slice(self, b: int) -> slice:
        return slice(int(self.edge_starts[b]), int(self.edge_starts[b + 1]))

    def class_counts(self) -> dict:
        hist = np.bincount(self.size_class, minlength=3)
        return {c.name.lower(): int(hist[c]) for c in SizeClass}


def build_edge_blocks(edges: RawEdgeList, config: EdgeBlockConfig) -> EdgeBlockIndex:
    width = config.group_width
    block_count = -(-edges.vertex_count // width)
    keys = edges.dst // width
    offsets, order, ops = counting_sort(keys, block_count)
    counts = np.diff(offsets)
    weights = edges.weights[order] if edges.weights is not None else None
    return EdgeBlockIndex(
        config=config,
        vertex_count=edges.vertex_count,
        edge_counts=counts,
        edge_starts=offsets,
        size_class=classify_many(counts, config),
        src=edges.src[order],
        dst=edges.dst[order],
        weights=weights,
        build_ops=ops + 2 * len(order),
        edge_ids=order,
    )


def block_state_bytes(index_or_count) -> int:
    """Bytes needed for one validity bit per block."""
    n = index_or_count.block_count if isinstance(index_or_count, EdgeBlockIndex) else int(index_or_count)
    return -(-n // 8)


def block_targets(edges: RawEdgeList, index: EdgeBlockIndex):
    """Per-source CSR of the distinct blocks its out-edges land in.

    The coordinator uses it at the barrier to turn changed vertices into the
    next iteration's active-block set.
    """
    n, nb = edges.vertex_count, index.block_count
    if edges.edge_count == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
    key = np.unique(edges.src * nb + edges.dst // index.width)
    owner = key // nb
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner, minlength=n), out=offsets[1:])
    return offsets, key % nb
