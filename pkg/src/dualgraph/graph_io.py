"""Edge-list ingestion and CSR construction."""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ._sort import counting_sort

INDEX_CAPACITY = 2**32
BINARY_MAGIC = b"DGEDGE\x00\x01"
BINARY_VERSION = 1


class EdgeListError(ValueError):
    """Raised for malformed edge-list input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class RawEdgeList:
    """Edges in file order. ``src``/``dst`` are int64 arrays of dense ids."""

    src: np.ndarray
    dst: np.ndarray
    vertex_count: int
    directed: bool = True
    weights: Optional[np.ndarray] = None
    # original external ids when the loader remapped sparse ids
    id_map: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.src) != len(self.dst):
            raise ValueError("src and dst differ in length")
        if self.weights is not None and len(self.weights) != len(self.src):
            raise ValueError("weights length does not match edge count")
        if len(self.src) and max(int(self.src.max()), int(self.dst.max())) >= self.vertex_count:
            raise ValueError("vertex id out of range")

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def edges(self):
        return list(zip(self.src.tolist(), self.dst.tolist()))

    @classmethod
    def from_pairs(cls, pairs, vertex_count=None, directed=True):
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if vertex_count is None:
            vertex_count = int(arr.max()) + 1 if len(arr) else 0
        return cls(arr[:, 0].copy(), arr[:, 1].copy(), vertex_count, directed)

    def symmetrized(self) -> "RawEdgeList":
        """Both directions of every edge, interleaved so file order is kept."""
        src = np.empty(2 * self.edge_count, dtype=np.int64)
        dst = np.empty_like(src)
        src[0::2], src[1::2] = self.src, self.dst
        dst[0::2], dst[1::2] = self.dst, self.src
        weights = None
        if self.weights is not None:
            weights = np.repeat(self.weights, 2)
        return RawEdgeList(src, dst, self.vertex_count, False, weights, self.id_map)


@dataclass(frozen=True)
class CsrGraph:
    row_index: np.ndarray
    column: np.ndarray
    weights: Optional[np.ndarray] = None
    build_ops: int = field(default=0, compare=False)
    # position of each CSR slot in the source edge list
    edge_ids: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def vertex_count(self) -> int:
        return len(self.row_index) - 1

    @property
    def edge_count(self) -> int:
        return len(self.column)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.row_index)

    def neighbors(self, v: int) -> np.ndarray:
        return self.column[self.row_index[v]:self.row_index[v + 1]]

    def iter_edges(self):
        for v in range(self.vertex_count):
            for u in self.neighbors(v).tolist():
                yield v, u


def build_csr(edges: RawEdgeList, transpose: bool = False) -> CsrGraph:
    """Counting pass over sources, then a stable placement pass.

    With ``transpose=True`` rows are keyed by destination, giving in-edges.
    """
    keys, other = (edges.dst, edges.src) if transpose else (edges.src, edges.dst)
    offsets, order, ops = counting_sort(keys, edges.vertex_count)
    column = other[order]
    weights = edges.weights[order] if edges.weights is not None else None
    return CsrGraph(offsets, column, weights, build_ops=ops + 2 * len(order), edge_ids=order)


def _parse_lines(lines, path):
    src, dst, wts = [], [], []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListError(f"expected 2 or 3 fields, got {len(parts)}", lineno)
        try:
            s, d = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else None
        except ValueError:
            raise EdgeListError(f"non-numeric field in {line!r}", lineno) from None
        if s < 0 or d < 0:
            raise EdgeListError("negative vertex id", lineno)
        if s >= INDEX_CAPACITY or d >= INDEX_CAPACITY:
            raise EdgeListError("vertex id exceeds 32-bit index capacity", lineno)
        src.append(s)
        dst.append(d)
        if w is not None:
            wts.append(w)
    if wts and len(wts) != len(src):
        raise EdgeListError(f"{path}: weights present on some lines only")
    return src, dst, wts


def parse_edge_list(path, directed: bool = True, remap: bool = False) -> RawEdgeList:
    """Read a SNAP-style ``src dst [weight]`` file.

    Undirected input is materialized in both directions. With ``remap`` sparse
    external ids are compacted to ``0..k-1`` and the originals kept in ``id_map``.
    """
    path = Path(path)
    with path.open("r") as fh:
        src, dst, wts = _parse_lines(fh, path)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    weights = np.asarray(wts, dtype=np.float32) if wts else None
    id_map = None
    if remap and len(src):
        id_map, inverse = np.unique(np.concatenate([src, dst]), return_inverse=True)
        src, dst = inverse[: len(src)], inverse[len(src):]
        n = len(id_map)
    else:
        n = int(max(src.max(), dst.max())) + 1 if len(src) else 0
    if n > INDEX_CAPACITY:
        raise EdgeListError("vertex count exceeds 32-bit index capacity")
    edges = RawEdgeList(src, dst, n, True, weights, id_map)
    return edges if directed else edges.symmetrized()


def save_binary(edges: RawEdgeList, path) -> None:
    """Little-endian cache: magic, version, counts, then uint32 src/dst arrays."""
    flags = 1 if edges.directed else 0
    flags |= 2 if edges.weights is not None else 0
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<IIQQ", BINARY_VERSION, flags, edges.vertex_count, edges.edge_count))
        fh.write(edges.src.astype("<u4").tobytes())
        fh.write(edges.dst.astype("<u4").tobytes())
        if edges.weights is not None:
            fh.write(edges.weights.astype("<f4").tobytes())


def load_binary(path) -> RawEdgeList:
    with open(path, "rb") as fh:
        if fh.read(8) != BINARY_MAGIC:
            raise EdgeListError(f"{path}: not an edge cache file")
        version, flags, n, m = struct.unpack("<IIQQ", fh.read(24))
        if version != BINARY_VERSION:
            raise EdgeListError(f"{path}: unsupported cache version {version}")
        src = np.frombuffer(fh.read(4 * m), dtype="<u4").astype(np.int64)
        dst = np.frombuffer(fh.read(4 * m), dtype="<u4").astype(np.int64)
        weights = None
        if flags & 2:
            weights = np.frombuffer(fh.read(4 * m), dtype="<f4").astype(np.float32)
    return RawEdgeList(src, dst, int(n), bool(flags & 1), weights)


def load_graph(path, directed: bool = True) -> RawEdgeList:
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == BINARY_MAGIC:
        edges = load_binary(path)
        return edges if directed or not edges.directed else edges.symmetrized()
    return parse_edge_list(path, directed=directed)


def random_graph(num_vertices, num_edges, seed=None) -> RawEdgeList:
    """Uniform random directed multigraph (self-loops and duplicates allowed)."""
    rng = np.random.default_rng(seed)
    if num_vertices == 0:
        num_edges = 0
    src = rng.integers(0, max(num_vertices, 1), size=num_edges, dtype=np.int64)
    dst = rng.integers(0, max(num_vertices, 1), size=num_edges, dtype=np.int64)
    return RawEdgeList(src, dst, num_vertices)


def power_law_graph(num_vertices, num_edges, exponent=2.0, seed=None, shuffle=False) -> RawEdgeList:
    """Directed Chung-Lu graph whose in- and out-degrees follow a power law.

    Both endpoints are drawn with probability proportional to
    ``(id + 1) ** (-1 / (exponent - 1))``, so low ids are the hubs. ``shuffle``
    relabels sources and destinations with independent random permutations,
    which destroys the locality between vertex id and degree.
    """
    if exponent <= 1:
        raise ValueError("exponent must exceed 1")
    rng = np.random.default_rng(seed)
    weights = np.arange(1, num_vertices + 1, dtype=np.float64) ** (-1.0 / (exponent - 1.0))
    weights /= weights.sum()
    src = rng.choice(num_vertices, size=num_edges, p=weights).astype(np.int64)
    dst = rng.choice(num_vertices, size=num_edges, p=weights).astype(np.int64)
    if shuffle:
        src = rng.permutation(num_vertices)[src]
        dst = rng.permutation(num_vertices)[dst]
    return RawEdgeList(src, dst, num_vertices)
