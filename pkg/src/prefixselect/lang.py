"""AST and edge operations for the toy imperative integer language.

Expressions and predicates are immutable trees over arbitrary-precision
integers.  Edge operations (assignment, nondeterministic assignment, assume)
label control-flow edges; a no-op is literally ``assume(true)`` so the two
compare equal wherever paths are compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# --- expressions ------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class BinaryOp:
    op: str  # one of + - * / %
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Negate:
    operand: "Expr"


Expr = Union[IntLit, VarRef, BinaryOp, Negate]


# --- predicates -------------------------------------------------------------


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Comparison:
    op: str  # one of == != < <= > >=
    left: Expr
    right: Expr


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class Not:
    operand: "Pred"


Pred = Union[BoolLit, Comparison, And, Or, Not]

TRUE = BoolLit(True)
FALSE = BoolLit(False)


# --- operations -------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class AssignNondet:
    var: str


@dataclass(frozen=True)
class Assume:
    pred: Pred


Operation = Union[Assign, AssignNondet, Assume]

#: The no-op operation; identical to assume(true) by construction.
NOOP: Operation = Assume(TRUE)


def is_noop(op: Operation) -> bool:
    return op == NOOP


# --- variable collection ----------------------------------------------------


def expr_variables(exp: Expr) -> set[str]:
    if isinstance(exp, IntLit):
        return set()
    if isinstance(exp, VarRef):
        return {exp.name}
    if isinstance(exp, Negate):
        return expr_variables(exp.operand)
    return expr_variables(exp.left) | expr_variables(exp.right)


def pred_variables(p: Pred) -> set[str]:
    if isinstance(p, BoolLit):
        return set()
    if isinstance(p, Comparison):
        return expr_variables(p.left) | expr_variables(p.right)
    if isinstance(p, Not):
        return pred_variables(p.operand)
    return pred_variables(p.left) | pred_variables(p.right)


def op_variables(op: Operation) -> set[str]:
    """Variables occurring syntactically in an operation.

    A no-op contributes no variables (its predicate is the literal true).
    """
    if isinstance(op, Assign):
        return {op.var} | expr_variables(op.expr)
    if isinstance(op, AssignNondet):
        return {op.var}
    return pred_variables(op.pred)


# --- rendering --------------------------------------------------------------

_EXPR_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "%": 2}


def render_expr(exp: Expr, parent_prec: int = 0) -> str:
    if isinstance(exp, IntLit):
        return str(exp.value)
    if isinstance(exp, VarRef):
        return exp.name
    if isinstance(exp, Negate):
        return "-" + render_expr(exp.operand, 3)
    prec = _EXPR_PREC[exp.op]
    # right child gets a stricter bound: -, /, % are left-associative
    text = "%s %s %s" % (
        render_expr(exp.left, prec),
        exp.op,
        render_expr(exp.right, prec + 1),
    )
    if prec < parent_prec:
        return "(" + text + ")"
    return text


_PRED_PREC = {"||": 1, "&&": 2}


def render_pred(p: Pred, parent_prec: int = 0) -> str:
    if isinstance(p, BoolLit):
        return "true" if p.value else "false"
    if isinstance(p, Comparison):
        text = "%s %s %s" % (render_expr(p.left), p.op, render_expr(p.right))
        if parent_prec > 0:
            return "(" + text + ")"
        return text
    if isinstance(p, Not):
        return "!" + render_pred(p.operand, 3)
    sym = "&&" if isinstance(p, And) else "||"
    prec = _PRED_PREC[sym]
    text = "%s %s %s" % (render_pred(p.left, prec), sym, render_pred(p.right, prec))
    if prec < parent_prec:
        return "(" + text + ")"
    return text


def render_op(op: Operation) -> str:
    if isinstance(op, Assign):
        return "%s := %s" % (op.var, render_expr(op.expr))
    if isinstance(op, AssignNondet):
        return "%s := nondet()" % op.var
    return "[%s]" % render_pred(op.pred)


# --- statements / program ---------------------------------------------------


@dataclass(frozen=True)
class AssignStmt:
    var: str
    expr: Expr


@dataclass(frozen=True)
class NondetStmt:
    var: str


@dataclass(frozen=True)
class AssumeStmt:
    pred: Pred


@dataclass(frozen=True)
class ErrorStmt:
    pass


@dataclass(frozen=True)
class IfStmt:
    cond: Pred
    then_body: tuple["Stmt", ...]
    else_body: tuple["Stmt", ...] | None


@dataclass(frozen=True)
class WhileStmt:
    cond: Pred
    body: tuple["Stmt", ...]


Stmt = Union[AssignStmt, NondetStmt, AssumeStmt, ErrorStmt, IfStmt, WhileStmt]


@dataclass(frozen=True)
class Program:
    variables: tuple[str, ...]  # declaration order
    body: tuple[Stmt, ...]


def _render_stmt(stmt: Stmt, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(stmt, AssignStmt):
        out.append("%s%s := %s;" % (pad, stmt.var, render_expr(stmt.expr)))
    elif isinstance(stmt, NondetStmt):
        out.append("%s%s := nondet();" % (pad, stmt.var))
    elif isinstance(stmt, AssumeStmt):
        out.append("%sassume(%s);" % (pad, render_pred(stmt.pred)))
    elif isinstance(stmt, ErrorStmt):
        out.append("%serror;" % pad)
    elif isinstance(stmt, IfStmt):
        out.append("%sif (%s) {" % (pad, render_pred(stmt.cond)))
        for s in stmt.then_body:
            _render_stmt(s, indent + 1, out)
        if stmt.else_body is None:
            out.append("%s}" % pad)
        else:
            out.append("%s} else {" % pad)
            for s in stmt.else_body:
                _render_stmt(s, indent + 1, out)
            out.append("%s}" % pad)
    else:
        out.append("%swhile (%s) {" % (pad, render_pred(stmt.cond)))
        for s in stmt.body:
            _render_stmt(s, indent + 1, out)
        out.append("%s}" % pad)


def render_program(program: Program) -> str:
    """Pretty-print a program; parsing the result yields an equal AST."""
    lines: list[str] = []
    if program.variables:
        lines.append("var %s;" % ", ".join(program.variables))
    for stmt in program.body:
        _render_stmt(stmt, 0, lines)
    return "\n".join(lines) + "\n"
