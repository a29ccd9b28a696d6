"""Precision refinement from infeasible error paths.

Two strategies: classic inductive interpolation over the whole path, and
selection-based refinement that extracts all infeasible sliced prefixes,
interpolates each independently, and picks one by a heuristic.  The
domain-type heuristic scores interpolant sequences by how expensive their
variables are to track (booleans cheap, loop counters dear).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import networkx as nx

from .frontend import ControlFlowAutomaton
from .lang import (
    Assign,
    AssignNondet,
    Assume,
    BinaryOp,
    Comparison,
    Expr,
    IntLit,
    Pred,
    VarRef,
    pred_variables,
)
from .interpolation import (
    InterpolantSequence,
    interpolant_sequence,
    interpolate,
    interpolant_to_constraints,
)
from .paths import (
    FeasiblePathError,
    Path,
    SlicedPrefix,
    extract_sliced_prefixes,
    is_feasible,
)
from .values import BOTTOM, TOP, AbstractAssignment, restrict, sp


class Heuristic(enum.Enum):
    CLASSIC = "classic"
    PREFIX_SHORTEST = "prefix-shortest"
    PREFIX_LONGEST = "prefix-longest"
    DOMAIN_TYPE = "domain-type"


class DomainType(enum.Enum):
    BOOLEAN = "boolean"
    LOOP_COUNTER = "loop-counter"
    INTEGER_OTHER = "integer-other"


#: Lower is better; any strictly ordered weights realize the same preference.
SCORE_WEIGHTS = {
    DomainType.BOOLEAN: 1,
    DomainType.INTEGER_OTHER: 10,
    DomainType.LOOP_COUNTER: 100,
}


@dataclass(frozen=True)
class Precision:
    """Per-location sets of tracked variables; empty everywhere by default."""

    tracked: Mapping[int, frozenset[str]] = field(default_factory=dict)

    def at(self, loc: int) -> frozenset[str]:
        return self.tracked.get(loc, frozenset())

    def union(self, other: "Precision") -> "Precision":
        merged = dict(self.tracked)
        for loc, names in other.tracked.items():
            merged[loc] = merged.get(loc, frozenset()) | names
        return Precision(merged)

    def total_size(self) -> int:
        return sum(len(s) for s in self.tracked.values())


def extract_precision(gamma: AbstractAssignment) -> frozenset[str]:
    """Variables an interpolant references."""
    if gamma is BOTTOM:
        return frozenset()
    return frozenset(gamma)


# --- domain-type classification ----------------------------------------------


def _is_counter_update(op) -> Optional[str]:
    """x := x + c or x := x - c (c a literal); returns x, else None."""
    if not isinstance(op, Assign):
        return None
    e = op.expr
    if not (isinstance(e, BinaryOp) and e.op in ("+", "-")):
        return None
    if (
        isinstance(e.left, VarRef)
        and e.left.name == op.var
        and isinstance(e.right, IntLit)
    ):
        return op.var
    if (
        e.op == "+"
        and isinstance(e.right, VarRef)
        and e.right.name == op.var
        and isinstance(e.left, IntLit)
    ):
        return op.var
    return None


def _direct_comparisons(p: Pred):
    """Yield (var, other_side) for every VarRef appearing as a bare side of an
    ==/!= comparison, and (var, None) for every other occurrence."""
    stack = [p]
    while stack:
        node = stack.pop()
        if isinstance(node, Comparison):
            if node.op in ("==", "!="):
                for side, other in ((node.left, node.right), (node.right, node.left)):
                    if isinstance(side, VarRef):
                        yield side.name, other
                    else:
                        for x in _expr_vars(side):
                            yield x, None
            else:
                for side in (node.left, node.right):
                    for x in _expr_vars(side):
                        yield x, None
        elif hasattr(node, "left"):
            stack.append(node.left)
            stack.append(node.right)
        elif hasattr(node, "operand"):
            stack.append(node.operand)


def _expr_vars(e: Expr):
    from .lang import expr_variables

    return expr_variables(e)


def classify_domain_types(cfa: ControlFlowAutomaton) -> dict[str, DomainType]:
    """Classify every declared variable as boolean, loop counter, or other.

    Loop counter: an x := x ± literal update on a CFA cycle whose cycle also
    carries an assume mentioning x.  Boolean: all assignments are 0/1 literals
    or copies of booleans, all predicate occurrences are ==/!= against 0/1 or
    booleans (greatest fixpoint).  Precedence: loop counter > boolean > other.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(cfa.locations)
    for src, _, dst in cfa.edges:
        graph.add_edge(src, dst)

    scc_of: dict[int, int] = {}
    cyclic_sccs: set[int] = set()
    for idx, comp in enumerate(nx.strongly_connected_components(graph)):
        for loc in comp:
            scc_of[loc] = idx
        if len(comp) > 1 or any(graph.has_edge(l, l) for l in comp):
            cyclic_sccs.add(idx)

    loop_counters: set[str] = set()
    for scc_idx in cyclic_sccs:
        updates: set[str] = set()
        assume_vars: set[str] = set()
        for src, op, dst in cfa.edges:
            if scc_of[src] != scc_idx or scc_of[dst] != scc_idx:
                continue
            x = _is_counter_update(op)
            if x is not None:
                updates.add(x)
            if isinstance(op, Assume):
                assume_vars |= pred_variables(op.pred)
        loop_counters |= updates & assume_vars

    # boolean fixpoint
    candidates = set(cfa.variables)
    changed = True
    while changed:
        changed = False
        for _, op, _ in cfa.edges:
            if isinstance(op, Assign):
                if op.var not in candidates:
                    continue
                e = op.expr
                ok = (isinstance(e, IntLit) and e.value in (0, 1)) or (
                    isinstance(e, VarRef) and e.name in candidates
                )
                if not ok:
                    candidates.discard(op.var)
                    changed = True
            elif isinstance(op, AssignNondet):
                if op.var in candidates:
                    candidates.discard(op.var)
                    changed = True
            else:
                for x, other in _direct_comparisons(op.pred):
                    if x not in candidates:
                        continue
                    ok = other is not None and (
                        (isinstance(other, IntLit) and other.value in (0, 1))
                        or (isinstance(other, VarRef) and other.name in candidates)
                    )
                    if not ok:
                        candidates.discard(x)
                        changed = True

    table = {}
    for x in cfa.variables:
        if x in loop_counters:
            table[x] = DomainType.LOOP_COUNTER
        elif x in candidates:
            table[x] = DomainType.BOOLEAN
        else:
            table[x] = DomainType.INTEGER_OTHER
    return table


def score_interpolant_sequence(
    seq: InterpolantSequence, table: Mapping[str, DomainType]
) -> int:
    """Sum of class weights over the distinct variables the sequence mentions."""
    return sum(SCORE_WEIGHTS[table[x]] for x in seq.variables())


def choose_sliced_prefix(
    prefixes: Sequence[SlicedPrefix],
    sequences: Sequence[InterpolantSequence],
    heuristic: Heuristic,
    table: Mapping[str, DomainType],
) -> int:
    """Index of the prefix the heuristic selects.

    Domain-type scoring breaks ties toward the longest prefix (largest index),
    which keeps refinement local to the error.
    """
    if not prefixes:
        raise ValueError("no sliced prefixes to choose from")
    if heuristic is Heuristic.PREFIX_SHORTEST:
        return 0
    if heuristic is Heuristic.PREFIX_LONGEST:
        return len(prefixes) - 1
    if heuristic is Heuristic.DOMAIN_TYPE:
        best = 0
        best_score = score_interpolant_sequence(sequences[0], table)
        for j in range(1, len(prefixes)):
            score = score_interpolant_sequence(sequences[j], table)
            if score <= best_score:
                best, best_score = j, score
        return best
    raise ValueError("heuristic %s does not select prefixes" % heuristic.value)


# --- refinement procedures ----------------------------------------------------


@dataclass
class RefinementResult:
    precision: Precision
    prefix_count: int
    chosen_index: Optional[int]
    chosen_score: Optional[int]
    interpolation_calls: int


def refine_classic(path: Path, var_order: Sequence[str]) -> RefinementResult:
    """Inductive interpolation along the whole path; precision per location.

    Once the interpolant turns Bottom the path is already refuted and the
    remaining locations keep their empty precision.
    """
    if is_feasible(path):
        raise FeasiblePathError("refinement requires an infeasible path")
    ops = path.ops
    locations = path.locations
    gamma: AbstractAssignment = TOP
    tracked: dict[int, frozenset[str]] = {}
    calls = 0
    for i in range(len(ops) - 1):
        gamma_minus = interpolant_to_constraints(gamma, var_order) + (ops[i],)
        gamma = interpolate(gamma_minus, ops[i + 1 :])
        calls += 1
        if gamma is BOTTOM:
            break
        names = extract_precision(gamma)
        if names:
            loc = locations[i]
            tracked[loc] = tracked.get(loc, frozenset()) | names
    return RefinementResult(Precision(tracked), 0, None, None, calls)


def refine_selecting(
    path: Path,
    heuristic: Heuristic,
    table: Mapping[str, DomainType],
    var_order: Sequence[str],
) -> RefinementResult:
    """Selection-based refinement over all sliced prefixes.

    Interpolant sequences are computed for every prefix before choosing, even
    for heuristics that ignore them, so interpolation effort is comparable
    across heuristics.  With the classic heuristic this degenerates to
    refine_classic on the original path.
    """
    if heuristic is Heuristic.CLASSIC:
        return refine_classic(path, var_order)
    if is_feasible(path):
        raise FeasiblePathError("refinement requires an infeasible path")
    prefixes = extract_sliced_prefixes(path)
    sequences = []
    calls = 0
    for prefix in prefixes:
        seq, n = interpolant_sequence(prefix.path, var_order)
        sequences.append(seq)
        calls += n
    chosen = choose_sliced_prefix(prefixes, sequences, heuristic, table)
    score = score_interpolant_sequence(sequences[chosen], table)
    tracked: dict[int, frozenset[str]] = {}
    for _, loc, gamma in sequences[chosen].entries:
        names = extract_precision(gamma)
        if names:
            tracked[loc] = tracked.get(loc, frozenset()) | names
    return RefinementResult(
        Precision(tracked), len(prefixes), chosen, score, calls
    )


def check_refinement_progress(path: Path, precision: Precision) -> bool:
    """Replaying the path abstractly under the precision must hit Bottom."""
    v: AbstractAssignment = TOP
    for op, loc in path:
        v = restrict(sp(op, v), precision.at(loc))
        if v is BOTTOM:
            return True
    return False
