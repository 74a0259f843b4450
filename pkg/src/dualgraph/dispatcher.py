"""Runtime switch between the low-parallelism (push) and high-parallelism (pull) modules.

Switch up when the active/inactive vertex ratio exceeds ``alpha`` or a hub
vertex becomes active. Switch down when the active fraction of small+middle
blocks falls below ``beta``: immediately if more than ``gamma`` of the large
blocks went idle, otherwise after one more high-mode iteration.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace

from .metrics import IterationMetrics, Mode

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.05
DEFAULT_BETA = 0.05
DEFAULT_GAMMA = 0.9
DEFAULT_HUB_THRESHOLD = 2048


class SwitchDecision(str, enum.Enum):
    STAY = "stay"
    SWITCH_NOW = "switch_now"
    SWITCH_NEXT_ITERATION = "switch_next_iteration"


@dataclass(frozen=True)
class DispatcherState:
    mode: Mode = Mode.LOW
    vertex_count: int = 0
    na: int = 0
    ni: int = 0
    nb: int = 0
    nl: int = 0
    fl: int = 0
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    hub_degree_threshold: int = DEFAULT_HUB_THRESHOLD
    hub_activated: bool = False
    pending_switch_to_low: bool = False
    # invert the switch-up and switch-down comparisons
    literal: bool = False

    @property
    def vertex_ratio(self) -> float:
        return self.na / self.ni if self.ni else float("inf")

    @property
    def block_ratio(self) -> float:
        return self.na / self.nb if self.nb else 0.0

    @property
    def large_idle_ratio(self) -> float:
        return self.fl / self.nl if self.nl else float("inf")


def initial_state(vertex_count, all_active, nb=0, nl=0, **params) -> DispatcherState:
    """Whole-graph initial frontiers start in high mode, single sources in low mode."""
    mode = Mode.HIGH if all_active else Mode.LOW
    na = vertex_count if all_active else 1
    return DispatcherState(mode=mode, vertex_count=vertex_count, na=na,
                           ni=vertex_count - na, nb=nb, nl=nl, **params)


def should_switch_to_high(state: DispatcherState, hub_activated: bool = False) -> bool:
    if hub_activated:
        return True
    if state.ni == 0:
        return state.na > 0
    ratio = state.na / state.ni
    if state.literal:
        return ratio < state.alpha
    return ratio > state.alpha


def should_switch_to_low(state: DispatcherState) -> SwitchDecision:
    if state.nb == 0:
        c2 = True
    elif state.literal:
        c2 = state.na / state.nb > state.beta
    else:
        c2 = state.na / state.nb < state.beta
    if not c2:
        return SwitchDecision.STAY
    c3 = state.nl == 0 or state.fl / state.nl > state.gamma
    return SwitchDecision.SWITCH_NOW if c3 else SwitchDecision.SWITCH_NEXT_ITERATION


def record_iteration(state: DispatcherState, metrics: IterationMetrics,
                     out_degree=None) -> DispatcherState:
    """Refresh counters from the iteration that just finished.

    ``metrics.newly_active`` is the size of the next frontier; in high mode
    ``metrics.next_small_middle_blocks`` holds the next active small+middle block count.
    """
    na_v = metrics.newly_active
    hub = na_v > 0 and metrics.max_new_degree >= state.hub_degree_threshold
    fl = state.fl if metrics.large_idle is None else metrics.large_idle
    if metrics.mode == Mode.HIGH:
        na = metrics.next_small_middle_blocks
        ni = state.vertex_count - na_v
    else:
        na, ni = na_v, state.vertex_count - na_v
    return replace(state, na=na, ni=ni, fl=fl, hub_activated=hub)


def vertex_view(state: DispatcherState, active_vertices: int) -> DispatcherState:
    """State with Na/Ni as vertex counts, for the switch-up test after a high iteration."""
    return replace(state, na=active_vertices, ni=state.vertex_count - active_vertices)


def advance(state: DispatcherState, metrics: IterationMetrics):
    """Apply the switching protocol at an iteration barrier.

    Returns the new state (whose ``mode`` is the mode of the next iteration)
    and a trace event with both ratios so either inequality reading can be audited.
    """
    state = record_iteration(state, metrics)
    event = {"iteration": metrics.iteration, "from": state.mode.value}
    if state.mode == Mode.LOW:
        vr = state.vertex_ratio
        go = should_switch_to_high(state, state.hub_activated)
        event.update(rule="to_high", na_ni=vr, hub=state.hub_activated,
                     decision="switch_now" if go else "stay")
        if go:
            state = replace(state, mode=Mode.HIGH, pending_switch_to_low=False)
    else:
        event.update(rule="to_low", na_nb=state.block_ratio, fl_nl=state.large_idle_ratio)
        if state.pending_switch_to_low:
            event["decision"] = "deferred_switch"
            state = replace(state, mode=Mode.LOW, pending_switch_to_low=False)
        else:
            decision = should_switch_to_low(state)
            event["decision"] = decision.value
            if decision == SwitchDecision.SWITCH_NOW:
                state = replace(state, mode=Mode.LOW)
            elif decision == SwitchDecision.SWITCH_NEXT_ITERATION:
                state = replace(state, pending_switch_to_low=True)
        if state.mode == Mode.LOW:
            # counters are vertex counts again from here on
            state = vertex_view(state, metrics.newly_active)
    event["to"] = state.mode.value
    log.debug("dispatch %s", event)
    return state, event
