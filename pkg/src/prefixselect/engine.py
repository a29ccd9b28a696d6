"""Abstract reachability and the CEGAR driver with full restart.

Exploration is a FIFO worklist over (location, assignment) states with
precision-restricted strongest-post transfer and coverage by implication
against same-location states.  On a spurious counterexample the precision is
refined and exploration restarts from scratch.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .frontend import ControlFlowAutomaton
from .paths import Path, is_feasible
from .refinement import (
    Heuristic,
    Precision,
    RefinementResult,
    check_refinement_progress,
    classify_domain_types,
    refine_selecting,
)
from .values import BOTTOM, TOP, Assignment, restrict, sp

log = logging.getLogger("prefixselect.engine")


@dataclass
class Limits:
    max_refinements: int = 200
    max_states: int = 1_000_000


@dataclass
class RunStats:
    refinements: int = 0
    prefixes_total: int = 0
    interpolation_calls: int = 0
    states_created: int = 0
    coverage_hits: int = 0
    chosen_prefix_indices: list[Optional[int]] = field(default_factory=list)
    chosen_prefix_scores: list[Optional[int]] = field(default_factory=list)
    duration_ms: float = 0.0


@dataclass
class Verdict:
    kind: str  # "TRUE" | "FALSE" | "UNKNOWN"
    witness: Optional[Path] = None
    reason: Optional[str] = None

    def render(self) -> str:
        if self.kind == "UNKNOWN":
            return "UNKNOWN(%s)" % self.reason
        return self.kind


class State:
    __slots__ = ("loc", "value", "parent", "op_in")

    def __init__(self, loc, value, parent=None, op_in=None):
        self.loc = loc
        self.value = value
        self.parent = parent
        self.op_in = op_in


class ReachedSet:
    """States indexed by location, plus the FIFO frontier.

    Coverage is implication against an existing state at the same location,
    which for assignments is the subset relation on binding sets; it is
    checked by enumerating the (at most 2^|def|) sub-binding-sets and probing
    a hash set, so adding a state is near-constant time.
    """

    def __init__(self):
        self.by_loc: dict[int, set[frozenset]] = {}
        self.waitlist: deque[State] = deque()
        self.error_state: Optional[State] = None
        self.size = 0

    def covered(self, loc: int, value: Assignment) -> bool:
        existing = self.by_loc.get(loc)
        if not existing:
            return False
        items = sorted(value.items_set)
        n = len(items)
        for mask in range(1 << n):
            subset = frozenset(items[k] for k in range(n) if mask >> k & 1)
            if subset in existing:
                return True
        return False

    def add(self, state: State) -> None:
        self.by_loc.setdefault(state.loc, set()).add(state.value.items_set)
        self.waitlist.append(state)
        self.size += 1


class StateLimitReached(Exception):
    pass


def reach(
    cfa: ControlFlowAutomaton,
    precision: Precision,
    max_states: int,
    stats: Optional[RunStats] = None,
) -> tuple[ReachedSet, bool]:
    """Explore abstract states under a precision until the error location is
    reached or the frontier empties.

    Raises StateLimitReached when more than max_states states are created.
    """
    reached = ReachedSet()
    root = State(cfa.initial, TOP)
    reached.add(root)
    if stats is not None:
        stats.states_created += 1
    if cfa.error is not None and cfa.initial == cfa.error:
        reached.error_state = root
        return reached, True
    while reached.waitlist:
        state = reached.waitlist.popleft()
        for op, dst in cfa.out_edges(state.loc):
            value = restrict(sp(op, state.value), precision.at(dst))
            if value is BOTTOM:
                continue
            if reached.covered(dst, value):
                if stats is not None:
                    stats.coverage_hits += 1
                continue
            successor = State(dst, value, state, op)
            if reached.size >= max_states:
                raise StateLimitReached()
            reached.add(successor)
            if stats is not None:
                stats.states_created += 1
            if dst == cfa.error:
                reached.error_state = successor
                return reached, True
    return reached, False


def extract_error_path(reached: ReachedSet) -> Path:
    """Walk the predecessor chain from the error state back to the root."""
    state = reached.error_state
    if state is None:
        raise ValueError("reached set contains no error state")
    steps = []
    while state.parent is not None:
        steps.append((state.op_in, state.loc))
        state = state.parent
    steps.reverse()
    return Path(tuple(steps))


class RefinementProgressError(AssertionError):
    """A refinement failed to exclude the path it was derived from."""


def cegar(
    cfa: ControlFlowAutomaton,
    heuristic: Heuristic = Heuristic.DOMAIN_TYPE,
    limits: Limits = Limits(),
    on_refinement: Optional[Callable[[Path, RefinementResult], None]] = None,
) -> tuple[Verdict, RunStats]:
    """CEGAR loop with full restart after each refinement.

    Starts from the empty precision; on each spurious counterexample the
    refinement's precision is checked to exclude that path, then unioned
    pointwise into the running precision before the restart.
    """
    stats = RunStats()
    start = time.perf_counter()
    table = classify_domain_types(cfa)
    precision = Precision()
    verdict: Optional[Verdict] = None
    try:
        while True:
            reached, hit = reach(cfa, precision, limits.max_states, stats)
            if not hit:
                verdict = Verdict("TRUE")
                break
            sigma = extract_error_path(reached)
            if is_feasible(sigma):
                verdict = Verdict("FALSE", witness=sigma)
                break
            if stats.refinements >= limits.max_refinements:
                verdict = Verdict("UNKNOWN", reason="refinement-limit")
                break
            result = refine_selecting(sigma, heuristic, table, cfa.variables)
            if not check_refinement_progress(sigma, result.precision):
                raise RefinementProgressError(
                    "refined precision does not exclude the refuted path"
                )
            if on_refinement is not None:
                on_refinement(sigma, result)
            precision = precision.union(result.precision)
            stats.refinements += 1
            stats.prefixes_total += result.prefix_count
            stats.interpolation_calls += result.interpolation_calls
            stats.chosen_prefix_indices.append(result.chosen_index)
            stats.chosen_prefix_scores.append(result.chosen_score)
            log.debug(
                "refinement %d: %d prefixes, chose %s (score %s), precision size %d",
                stats.refinements,
                result.prefix_count,
                result.chosen_index,
                result.chosen_score,
                precision.total_size(),
            )
    except StateLimitReached:
        verdict = Verdict("UNKNOWN", reason="state-limit")
    stats.duration_ms = (time.perf_counter() - start) * 1000.0
    return verdict, stats
