from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Optional


class Mode(str, enum.Enum):
    LOW = "low"    # vertex-centric push
    HIGH = "high"  # edge-centric pull


@dataclass
class IterationMetrics:
    iteration: int
    mode: Mode
    engine: str
    active_vertices: int = 0
    edges_examined: int = 0
    changed_vertices: int = 0
    active_blocks: dict = field(default_factory=lambda: {"small": 0, "middle": 0, "large": 0})
    loop_counts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    # vertices that entered the frontier this iteration, and their max out-degree
    newly_active: int = 0
    max_new_degree: int = 0
    # per-large-block "no change" flags after this iteration (high mode only)
    large_idle: Optional[int] = None
    next_small_middle_blocks: int = 0
    # dispatcher reads spent turning changed vertices into active blocks
    bookkeeping_reads: int = 0
    dispatcher_ratios: dict = field(default_factory=dict)

    @property
    def total_loops(self) -> int:
        return int(sum(self.loop_counts.values()))

    def to_dict(self):
        d = asdict(self)
        d["mode"] = self.mode.value
        d["total_loops"] = self.total_loops
        return d


def mteps(edges_traversed, seconds) -> float:
    """Millions of traversed edges per second."""
    if seconds <= 0:
        return float("inf") if edges_traversed else 0.0
    return edges_traversed / (seconds * 1e6)
