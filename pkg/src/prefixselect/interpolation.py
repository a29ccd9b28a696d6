"""Interpolation for contradicting constraint sequences, solver-free.

An interpolant is an abstract assignment: Top is trivial, Bottom refutes, and
a map stands for the conjunction of forced equalities ``[x == c]``.  The
engine is deliberately a fixed black box: variables not shared by both sides
are dropped, then the rest are greedily eliminated in lexicographic order.
The caller cannot steer it; refinement quality has to come from choosing the
interpolation problem, not from tuning this engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lang import Assume, Comparison, IntLit, Operation, VarRef, op_variables
from .paths import Path, sp_seq
from .values import BOTTOM, TOP, AbstractAssignment, Assignment, implies


class InterpolationError(ValueError):
    """Contract violation: inputs not jointly contradicting, or Bottom where
    a non-refuting interpolant is required."""


def seq_variables(ops: Sequence[Operation]) -> set[str]:
    out: set[str] = set()
    for op in ops:
        out |= op_variables(op)
    return out


def interpolate(
    gamma_minus: Sequence[Operation], gamma_plus: Sequence[Operation]
) -> AbstractAssignment:
    """Interpolant for two jointly contradicting constraint sequences.

    Guarantees: (1) gamma_minus implies the result, (2) the result still
    contradicts gamma_plus, (3) the result only mentions variables occurring
    syntactically in both sequences.  Deterministic: fixed elimination order.
    """
    if sp_seq(tuple(gamma_minus) + tuple(gamma_plus)) is not BOTTOM:
        raise InterpolationError("constraint sequences are not contradicting")
    v = sp_seq(gamma_minus)
    if v is BOTTOM:
        return BOTTOM
    shared = seq_variables(gamma_minus) & seq_variables(gamma_plus)
    kept = {x: c for x, c in v.items() if x in shared}
    # dropping variables gamma_plus never reads cannot lose the contradiction
    assert sp_seq(gamma_plus, Assignment(kept)) is BOTTOM
    for x in sorted(kept):
        trial = dict(kept)
        del trial[x]
        if sp_seq(gamma_plus, Assignment(trial)) is BOTTOM:
            kept = trial
    return Assignment(kept)


def interpolant_to_constraints(
    gamma: AbstractAssignment, var_order: Sequence[str]
) -> tuple[Operation, ...]:
    """Materialize an interpolant as assume operations, in declaration order."""
    if gamma is BOTTOM:
        raise InterpolationError("Bottom interpolant has no constraint form")
    return tuple(
        Assume(Comparison("==", VarRef(x), IntLit(gamma[x])))
        for x in var_order
        if x in gamma
    )


@dataclass(frozen=True)
class InterpolantSequence:
    """Per-position interpolants for one path.

    ``entries[i]`` is (position, location, interpolant) for the cut after the
    path's first ``position + 1`` operations; positions run 0..w-2.  Keyed by
    position rather than location because locations repeat on looping paths.
    """

    entries: tuple[tuple[int, int, AbstractAssignment], ...]

    def variables(self) -> set[str]:
        out: set[str] = set()
        for _, _, gamma in self.entries:
            if gamma is not BOTTOM:
                out |= set(gamma)
        return out


def interpolant_sequence(
    path: Path, var_order: Sequence[str]
) -> tuple[InterpolantSequence, int]:
    """Inductive interpolation along an infeasible path.

    Each step interpolates the previous interpolant (as constraints) plus the
    next operation against the remaining suffix.  Returns the sequence and the
    number of interpolation calls made.  Stops early if the interpolant turns
    Bottom (the path is refuted before its last operation).
    """
    ops = path.ops
    locations = path.locations
    gamma: AbstractAssignment = TOP
    entries = []
    calls = 0
    for i in range(len(ops) - 1):
        gamma_minus = interpolant_to_constraints(gamma, var_order) + (ops[i],)
        gamma = interpolate(gamma_minus, ops[i + 1 :])
        calls += 1
        entries.append((i, locations[i], gamma))
        if gamma is BOTTOM:
            break
    return InterpolantSequence(tuple(entries)), calls


def check_interpolant(
    gamma: AbstractAssignment,
    gamma_minus: Sequence[Operation],
    gamma_plus: Sequence[Operation],
) -> bool:
    """Independent check of the three interpolant conditions via SP."""
    if not implies(sp_seq(gamma_minus), gamma):
        return False
    if sp_seq(gamma_plus, gamma) is not BOTTOM:
        return False
    if gamma is BOTTOM:
        return True
    shared = seq_variables(gamma_minus) & seq_variables(gamma_plus)
    return set(gamma) <= shared
