"""Abstract variable assignments and the strongest-post operator.

An abstract assignment is either Bottom (empty concretization) or a partial
map from variables to arbitrary-precision integers; the empty map is Top.
Predicates evaluate three-valued: Unknown whenever a referenced variable is
outside the definition range.
"""

from __future__ import annotations

import enum
from typing import Iterable, Mapping, Optional, Union

from .lang import (
    And,
    Assign,
    AssignNondet,
    Assume,
    BinaryOp,
    BoolLit,
    Comparison,
    Expr,
    IntLit,
    Negate,
    Not,
    Operation,
    Or,
    Pred,
    VarRef,
)


class _BottomType:
    """The contradicting assignment; a singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "⊥"


BOTTOM = _BottomType()


class Assignment(Mapping[str, int]):
    """Immutable partial map from variable names to integers."""

    __slots__ = ("_m", "_items")

    def __init__(self, mapping: Optional[Mapping[str, int]] = None):
        self._m = dict(mapping) if mapping else {}
        self._items = frozenset(self._m.items())

    def __getitem__(self, key: str) -> int:
        return self._m[key]

    def __iter__(self):
        return iter(self._m)

    def __len__(self):
        return len(self._m)

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return self._m == other._m
        return NotImplemented

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        return "Assignment(%r)" % (self._m,)

    @property
    def items_set(self) -> frozenset[tuple[str, int]]:
        return self._items

    def without(self, names: Iterable[str]) -> "Assignment":
        drop = set(names)
        return Assignment({x: c for x, c in self._m.items() if x not in drop})


TOP = Assignment()

AbstractAssignment = Union[Assignment, _BottomType]


class ThreeValued(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


def conjoin(v: AbstractAssignment, v2: AbstractAssignment) -> AbstractAssignment:
    """Conjunction: Bottom absorbs; disagreement on a shared variable is Bottom;
    otherwise the union of the maps."""
    if v is BOTTOM or v2 is BOTTOM:
        return BOTTOM
    for x, c in v2.items():
        if x in v and v[x] != c:
            return BOTTOM
    merged = dict(v)
    merged.update(v2)
    return Assignment(merged)


def implies(v: AbstractAssignment, v2: AbstractAssignment) -> bool:
    """v implies v2: v is Bottom, or v agrees with v2 on all of def(v2)."""
    if v is BOTTOM:
        return True
    if v2 is BOTTOM:
        return False
    return v2.items_set <= v.items_set


def restrict(v: AbstractAssignment, tracked: Iterable[str]) -> AbstractAssignment:
    if v is BOTTOM:
        return BOTTOM
    keep = set(tracked)
    return Assignment({x: c for x, c in v.items() if x in keep})


def eval_expr(exp: Expr, v: Assignment) -> Optional[int]:
    """Evaluate an expression under an assignment.

    Returns None (undefined) when a referenced variable is unbound or a
    division/modulo by zero occurs.  Division truncates toward zero.
    """
    if isinstance(exp, IntLit):
        return exp.value
    if isinstance(exp, VarRef):
        return v[exp.name] if exp.name in v else None
    if isinstance(exp, Negate):
        inner = eval_expr(exp.operand, v)
        return None if inner is None else -inner
    left = eval_expr(exp.left, v)
    right = eval_expr(exp.right, v)
    if left is None or right is None:
        return None
    if exp.op == "+":
        return left + right
    if exp.op == "-":
        return left - right
    if exp.op == "*":
        return left * right
    if right == 0:
        return None
    q = abs(left) // abs(right)
    if (left < 0) != (right < 0):
        q = -q
    if exp.op == "/":
        return q
    return left - right * q  # %


_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_pred(p: Pred, v: Assignment) -> ThreeValued:
    """Kleene three-valued evaluation of a predicate under an assignment."""
    if isinstance(p, BoolLit):
        return ThreeValued.TRUE if p.value else ThreeValued.FALSE
    if isinstance(p, Comparison):
        left = eval_expr(p.left, v)
        right = eval_expr(p.right, v)
        if left is None or right is None:
            return ThreeValued.UNKNOWN
        return ThreeValued.TRUE if _CMP[p.op](left, right) else ThreeValued.FALSE
    if isinstance(p, Not):
        inner = eval_pred(p.operand, v)
        if inner is ThreeValued.TRUE:
            return ThreeValued.FALSE
        if inner is ThreeValued.FALSE:
            return ThreeValued.TRUE
        return ThreeValued.UNKNOWN
    left = eval_pred(p.left, v)
    right = eval_pred(p.right, v)
    if isinstance(p, And):
        if left is ThreeValued.FALSE or right is ThreeValued.FALSE:
            return ThreeValued.FALSE
        if left is ThreeValued.TRUE and right is ThreeValued.TRUE:
            return ThreeValued.TRUE
        return ThreeValued.UNKNOWN
    # Or
    if left is ThreeValued.TRUE or right is ThreeValued.TRUE:
        return ThreeValued.TRUE
    if left is ThreeValued.FALSE and right is ThreeValued.FALSE:
        return ThreeValued.FALSE
    return ThreeValued.UNKNOWN


def _conjuncts(p: Pred) -> Iterable[Pred]:
    if isinstance(p, And):
        yield from _conjuncts(p.left)
        yield from _conjuncts(p.right)
    else:
        yield p


def _forced_bindings(p: Pred, v: Assignment) -> AbstractAssignment:
    """Bindings forced by an assume, extracted from top-level conjuncts.

    Only syntactic equality patterns are considered: ``x == e`` or ``e == x``
    where x is unbound in v and e evaluates under v.  Conflicting forced
    bindings yield Bottom.
    """
    bindings: AbstractAssignment = TOP
    for c in _conjuncts(p):
        if not (isinstance(c, Comparison) and c.op == "=="):
            continue
        for var_side, other_side in ((c.left, c.right), (c.right, c.left)):
            if isinstance(var_side, VarRef) and var_side.name not in v:
                value = eval_expr(other_side, v)
                if value is not None:
                    bindings = conjoin(bindings, Assignment({var_side.name: value}))
                    break
    return bindings


def sp(op: Operation, v: AbstractAssignment) -> AbstractAssignment:
    """Strongest-post transformer of one operation."""
    if v is BOTTOM:
        return BOTTOM
    if isinstance(op, Assign):
        value = eval_expr(op.expr, v)
        base = v.without((op.var,))
        if value is None:
            return base
        return conjoin(base, Assignment({op.var: value}))
    if isinstance(op, AssignNondet):
        return v.without((op.var,))
    # Assume
    if eval_pred(op.pred, v) is ThreeValued.FALSE:
        return BOTTOM
    return conjoin(v, _forced_bindings(op.pred, v))


def render_assignment(v: AbstractAssignment, var_order: Iterable[str]) -> str:
    """Stable textual rendering: ``⊥`` or ``{x=1, y=2}`` in declaration order."""
    if v is BOTTOM:
        return "⊥"
    parts = ["%s=%d" % (x, v[x]) for x in var_order if x in v]
    return "{%s}" % ", ".join(parts)
