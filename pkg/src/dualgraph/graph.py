from __future__ import annotations

from functools import cached_property

import numpy as np

from .edge_block import EdgeBlockConfig, block_targets, build_edge_blocks
from .graph_io import CsrGraph, RawEdgeList, build_csr


def expand_ranges(starts, counts) -> np.ndarray:
    """Concatenation of ``arange(s, s + c)`` for each pair, without a Python loop."""
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    ends = np.cumsum(counts)
    shift = np.repeat(np.asarray(starts, dtype=np.int64) - (ends - counts), counts)
    return np.arange(total, dtype=np.int64) + shift


class Graph:
    """Both layouts the engines consume: out-edge CSR and destination edge blocks.

    Everything is built once on first use and treated as read-only afterwards.
    """

    def __init__(self, edges: RawEdgeList, block_config: EdgeBlockConfig | None = None):
        self.edges = edges
        self.block_config = block_config or EdgeBlockConfig()

    @property
    def vertex_count(self) -> int:
        return self.edges.vertex_count

    @property
    def edge_count(self) -> int:
        return self.edges.edge_count

    @cached_property
    def csr(self) -> CsrGraph:
        return build_csr(self.edges)

    @cached_property
    def in_csr(self) -> CsrGraph:
        return build_csr(self.edges, transpose=True)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return self.csr.degrees

    @cached_property
    def in_degree(self) -> np.ndarray:
        return self.in_csr.degrees

    @cached_property
    def blocks(self):
        return build_edge_blocks(self.edges, self.block_config)

    @cached_property
    def block_targets(self):
        return block_targets(self.edges, self.blocks)

    def symmetrized(self) -> "Graph":
        return Graph(self.edges.symmetrized(), self.block_config)

    def with_block_config(self, config: EdgeBlockConfig) -> "Graph":
        g = Graph(self.edges, config)
        # the CSR side does not depend on the block layout
        for name in ("csr", "in_csr"):
            if name in self.__dict__:
                g.__dict__[name] = self.__dict__[name]
        return g

    def out_edge_slots(self, vertices) -> tuple[np.ndarray, np.ndarray]:
        """(source per edge, CSR slot per edge) for the out-edges of ``vertices``."""
        vertices = np.asarray(vertices, dtype=np.int64)
        rows = self.csr.row_index
        counts = rows[vertices + 1] - rows[vertices]
        return np.repeat(vertices, counts), expand_ranges(rows[vertices], counts)

    def hit_blocks(self, vertex_mask) -> tuple[np.ndarray, int]:
        """Mask of blocks holding an out-edge of a masked vertex, plus the number of lookups made."""
        offsets, targets = self.block_targets
        active = np.flatnonzero(vertex_mask)
        counts = offsets[active + 1] - offsets[active]
        idx = expand_ranges(offsets[active], counts)
        hit = np.zeros(self.blocks.block_count, dtype=bool)
        hit[targets[idx]] = True
        return hit, len(idx)
