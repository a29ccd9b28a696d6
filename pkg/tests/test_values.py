from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from prefixselect.lang import (
    And,
    Assign,
    AssignNondet,
    Assume,
    BinaryOp,
    BoolLit,
    Comparison,
    IntLit,
    NOOP,
    Or,
    VarRef,
    pred_variables,
)
from prefixselect.values import (
    BOTTOM,
    TOP,
    Assignment,
    ThreeValued,
    conjoin,
    eval_expr,
    eval_pred,
    implies,
    render_assignment,
    restrict,
    sp,
)

VARS = ["x", "y", "z"]

assignments = st.one_of(
    st.just(BOTTOM),
    st.dictionaries(st.sampled_from(VARS), st.integers(-5, 5), max_size=3).map(
        Assignment
    ),
)
nonbottom = st.dictionaries(
    st.sampled_from(VARS), st.integers(-5, 5), max_size=3
).map(Assignment)

exprs = st.recursive(
    st.one_of(
        st.integers(-5, 5).map(IntLit), st.sampled_from(VARS).map(VarRef)
    ),
    lambda inner: st.builds(
        BinaryOp, st.sampled_from(["+", "-", "*", "/", "%"]), inner, inner
    ),
    max_leaves=5,
)

comparisons = st.builds(
    Comparison, st.sampled_from(["==", "!=", "<", "<=", ">", ">="]), exprs, exprs
)
preds = st.recursive(
    st.one_of(st.booleans().map(BoolLit), comparisons),
    lambda inner: st.one_of(st.builds(And, inner, inner), st.builds(Or, inner, inner)),
    max_leaves=4,
)

operations = st.one_of(
    st.builds(Assign, st.sampled_from(VARS), exprs),
    st.sampled_from(VARS).map(AssignNondet),
    preds.map(Assume),
)


class TestConjoin:
    def test_union_of_agreeing_maps(self):
        a = Assignment({"x": 1, "y": 2})
        b = Assignment({"y": 2, "z": 3})
        assert conjoin(a, b) == Assignment({"x": 1, "y": 2, "z": 3})

    def test_disagreement_is_bottom(self):
        assert conjoin(Assignment({"x": 1}), Assignment({"x": 2})) is BOTTOM

    def test_bottom_absorbs(self):
        assert conjoin(BOTTOM, TOP) is BOTTOM

    @given(assignments, assignments)
    def test_commutative(self, a, b):
        assert conjoin(a, b) == conjoin(b, a)

    @given(assignments, assignments, assignments)
    def test_associative(self, a, b, c):
        assert conjoin(conjoin(a, b), c) == conjoin(a, conjoin(b, c))

    @given(assignments)
    def test_idempotent_identity_absorbing(self, a):
        assert conjoin(a, a) == a
        assert conjoin(a, TOP) == a
        assert conjoin(a, BOTTOM) is BOTTOM

    @given(assignments, assignments)
    def test_conjunction_implies_both(self, a, b):
        c = conjoin(a, b)
        assert implies(c, a) and implies(c, b)


class TestImplies:
    def test_bottom_implies_anything(self):
        assert implies(BOTTOM, Assignment({"x": 1}))

    def test_superset_implies_subset(self):
        assert implies(Assignment({"x": 1, "y": 2}), Assignment({"x": 1}))

    def test_missing_binding_fails(self):
        assert not implies(Assignment({"x": 1}), Assignment({"x": 1, "y": 2}))

    @given(assignments)
    def test_reflexive(self, a):
        assert implies(a, a)

    @given(assignments, assignments, assignments)
    def test_transitive(self, a, b, c):
        if implies(a, b) and implies(b, c):
            assert implies(a, c)


class TestEval:
    def test_expr_with_binding(self):
        exp = BinaryOp("+", VarRef("x"), IntLit(3))
        assert eval_expr(exp, Assignment({"x": 2})) == 5

    def test_expr_unbound_is_undefined(self):
        exp = BinaryOp("+", VarRef("x"), IntLit(3))
        assert eval_expr(exp, TOP) is None

    def test_division_by_zero_undefined(self):
        assert eval_expr(BinaryOp("/", IntLit(7), IntLit(0)), TOP) is None

    @pytest.mark.parametrize(
        "op,a,b,expected",
        [("/", 7, 2, 3), ("/", -7, 2, -3), ("%", -7, 2, -1), ("%", 7, -2, 1)],
    )
    def test_truncating_division(self, op, a, b, expected):
        assert eval_expr(BinaryOp(op, IntLit(a), IntLit(b)), TOP) == expected

    def test_pred_false(self):
        p = Comparison("<", VarRef("x"), IntLit(3))
        assert eval_pred(p, Assignment({"x": 5})) is ThreeValued.FALSE

    def test_kleene_disjunction(self):
        p = Or(Comparison("<", VarRef("x"), IntLit(3)), BoolLit(True))
        assert eval_pred(p, TOP) is ThreeValued.TRUE

    def test_unknown_when_unbound(self):
        p = Comparison("<", VarRef("x"), IntLit(3))
        assert eval_pred(p, TOP) is ThreeValued.UNKNOWN


class TestSp:
    def test_constant_assignment(self):
        assert sp(Assign("x", IntLit(5)), TOP) == Assignment({"x": 5})

    def test_forced_equality_binding(self):
        op = Assume(Comparison("==", VarRef("x"), IntLit(7)))
        assert sp(op, TOP) == Assignment({"x": 7})

    def test_forced_binding_reversed_and_var_copy(self):
        op = Assume(Comparison("==", IntLit(7), VarRef("x")))
        assert sp(op, TOP) == Assignment({"x": 7})
        copy = Assume(Comparison("==", VarRef("y"), VarRef("x")))
        assert sp(copy, Assignment({"x": 3})) == Assignment({"x": 3, "y": 3})

    def test_contradicting_assume(self):
        op = Assume(Comparison("<", VarRef("x"), IntLit(3)))
        assert sp(op, Assignment({"x": 5})) is BOTTOM

    def test_nondet_drops_binding(self):
        assert sp(AssignNondet("x"), Assignment({"x": 1, "y": 2})) == Assignment(
            {"y": 2}
        )

    def test_unevaluable_rhs_leaves_undefined(self):
        op = Assign("x", BinaryOp("+", VarRef("y"), IntLit(1)))
        assert sp(op, Assignment({"x": 9})) == TOP

    def test_noop_is_identity(self):
        v = Assignment({"x": 1})
        assert sp(NOOP, v) == v

    def test_bottom_stays_bottom(self):
        assert sp(Assign("x", IntLit(1)), BOTTOM) is BOTTOM

    @given(operations, nonbottom, st.sets(st.sampled_from(VARS)))
    def test_abstraction_monotone(self, op, v, tracked):
        post = sp(op, v)
        assert implies(post, restrict(post, tracked))

    @given(preds, nonbottom)
    def test_assume_invents_no_bindings(self, p, v):
        post = sp(Assume(p), v)
        if post is not BOTTOM:
            assert set(post) <= set(v) | pred_variables(p)

    @given(preds, nonbottom)
    def test_false_predicate_iff_bottom_when_defined(self, p, v):
        post = sp(Assume(p), v)
        if eval_pred(p, v) is ThreeValued.FALSE:
            assert post is BOTTOM
        if pred_variables(p) <= set(v) and post is BOTTOM:
            assert eval_pred(p, v) is ThreeValued.FALSE


class TestRestrict:
    def test_keeps_tracked(self):
        assert restrict(Assignment({"x": 1, "y": 2}), {"x"}) == Assignment({"x": 1})

    def test_top_stays_top(self):
        assert restrict(TOP, {"x"}) == TOP

    def test_bottom_stays_bottom(self):
        assert restrict(BOTTOM, set()) is BOTTOM


class TestRendering:
    def test_bottom(self):
        assert render_assignment(BOTTOM, ["x"]) == "⊥"

    def test_declaration_order(self):
        v = Assignment({"y": 2, "x": 1})
        assert render_assignment(v, ["x", "y"]) == "{x=1, y=2}"

    def test_top(self):
        assert render_assignment(TOP, ["x", "y"]) == "{}"
