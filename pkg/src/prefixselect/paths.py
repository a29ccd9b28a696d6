"""Paths, constraint sequences, feasibility, and sliced-prefix extraction.

A path is a sequence of (operation, location) pairs.  An infeasible path has
one or more contradicting assume operations; each gives rise to one infeasible
sliced prefix, extracted in a single forward sweep that keeps the running
prefix feasible by replacing contradicting assumes with no-ops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .lang import NOOP, Assume, Operation, render_op
from .values import BOTTOM, TOP, AbstractAssignment, sp


class FeasiblePathError(ValueError):
    """Raised when sliced-prefix extraction is handed a feasible path."""


Step = tuple[Operation, int]


@dataclass(frozen=True)
class Path:
    steps: tuple[Step, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)

    @property
    def ops(self) -> tuple[Operation, ...]:
        return tuple(op for op, _ in self.steps)

    @property
    def locations(self) -> tuple[int, ...]:
        return tuple(loc for _, loc in self.steps)


@dataclass(frozen=True)
class SlicedPrefix:
    """A truncated copy of a path with earlier contradicting assumes no-op'd.

    ``replaced`` holds the 0-based positions where the original assume was
    replaced; ``index`` is the 0-based emission order of this prefix.
    """

    path: Path
    replaced: frozenset[int]
    index: int
    original: Path = field(compare=False)

    def __len__(self) -> int:
        return len(self.path)


def sp_seq(
    ops: Sequence[Operation], v0: AbstractAssignment = TOP
) -> AbstractAssignment:
    """Fold the strongest-post operator over a constraint sequence."""
    v = v0
    for op in ops:
        v = sp(op, v)
        if v is BOTTOM:
            return BOTTOM
    return v


def sp_path(path: Path, v0: AbstractAssignment = TOP) -> AbstractAssignment:
    return sp_seq(path.ops, v0)


def is_feasible(path: Path) -> bool:
    return sp_path(path) is not BOTTOM


def extract_sliced_prefixes(path: Path) -> list[SlicedPrefix]:
    """Extract all infeasible sliced prefixes of an infeasible path, in order.

    Sweeps the path once, maintaining an always-feasible copy: whenever the
    next pair contradicts the copy, the copy extended by that pair is emitted
    as a prefix and the pair's operation is replaced by a no-op in the copy.
    Raises FeasiblePathError on feasible input (there would be no prefix).
    """
    prefixes: list[SlicedPrefix] = []
    feasible_steps: list[Step] = []
    replaced: set[int] = set()
    v = TOP
    for pos, (op, loc) in enumerate(path):
        v_next = sp(op, v)
        if v_next is BOTTOM:
            assert isinstance(op, Assume), "only assumes can contradict"
            prefixes.append(
                SlicedPrefix(
                    path=Path(tuple(feasible_steps) + ((op, loc),)),
                    replaced=frozenset(replaced),
                    index=len(prefixes),
                    original=path,
                )
            )
            replaced.add(pos)
            feasible_steps.append((NOOP, loc))
        else:
            feasible_steps.append((op, loc))
            v = v_next
    if not prefixes:
        raise FeasiblePathError("path is feasible; no sliced prefixes exist")
    return prefixes


def render_path(path: Path, replaced: Iterable[int] = (), original: Path | None = None) -> str:
    """One ``(op, l_k)`` pair per line; replaced positions annotated with the
    original assume."""
    replaced = set(replaced)
    lines = []
    for pos, (op, loc) in enumerate(path):
        if pos in replaced and original is not None:
            text = "[true] (was: %s)" % render_op(original.steps[pos][0])
        else:
            text = render_op(op)
        lines.append("(%s, l%d)" % (text, loc))
    return "\n".join(lines)


def render_prefix(prefix: SlicedPrefix) -> str:
    return render_path(prefix.path, prefix.replaced, prefix.original)
