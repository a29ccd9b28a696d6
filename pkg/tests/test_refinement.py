from __future__ import annotations

import pytest

from conftest import assign, assume_cmp, mkpath
from prefixselect.engine import cegar, extract_error_path, reach
from prefixselect.frontend import load_cfa
from prefixselect.generators import fig2_program
from prefixselect.interpolation import InterpolantSequence, interpolant_sequence
from prefixselect.paths import (
    FeasiblePathError,
    extract_sliced_prefixes,
    is_feasible,
)
from prefixselect.refinement import (
    DomainType,
    Heuristic,
    Precision,
    check_refinement_progress,
    choose_sliced_prefix,
    classify_domain_types,
    extract_precision,
    refine_classic,
    refine_selecting,
    score_interpolant_sequence,
)
from prefixselect.values import BOTTOM, TOP, Assignment

TWO_REASONS = mkpath(
    (assign("x", 0), 1),
    (assume_cmp("x", ">", 0), 2),
    (assign("y", 1), 3),
    (assume_cmp("y", "==", 0), 4),
)


def first_spurious_path(source, heuristic=Heuristic.DOMAIN_TYPE):
    cfa = load_cfa(source)
    collected = []
    cegar(cfa, heuristic, on_refinement=lambda p, r: collected.append(p))
    return cfa, collected[0]


class TestExtractPrecision:
    def test_single(self):
        assert extract_precision(Assignment({"b": 1})) == {"b"}

    def test_top(self):
        assert extract_precision(TOP) == frozenset()

    def test_pair(self):
        assert extract_precision(Assignment({"x": 1, "y": 2})) == {"x", "y"}


class TestRefineClassic:
    def test_two_step_path(self):
        path = mkpath((assign("x", 0), 1), (assume_cmp("x", ">", 0), 2))
        result = refine_classic(path, ["x"])
        assert result.precision.at(1) == {"x"}
        assert result.precision.at(2) == frozenset()

    def test_boolean_only_contradiction(self):
        path = mkpath(
            (assign("b", 1), 1),
            (assign("i", 0), 2),
            (assume_cmp("b", "==", 0), 3),
        )
        result = refine_classic(path, ["b", "i"])
        assert result.precision.at(1) == {"b"}
        assert result.precision.at(2) == {"b"}

    def test_feasible_input_is_contract_error(self):
        with pytest.raises(FeasiblePathError):
            refine_classic(mkpath((assign("x", 0), 1)), ["x"])

    def test_family_path_tracks_loop_counter(self):
        # interpolating the whole first error path of the family program
        # pulls the loop counter into the precision: the bad outcome
        cfa, path = first_spurious_path(fig2_program(10), Heuristic.CLASSIC)
        result = refine_classic(path, cfa.variables)
        tracked = set()
        for loc in cfa.locations:
            tracked |= result.precision.at(loc)
        assert "i" in tracked


class TestClassify:
    def test_three_classes(self):
        cfa = load_cfa(
            "var b, i, x;"
            "b := 1; x := nondet(); i := 0;"
            "while (i < 10) { i := i + 1; }"
            "if (b == 0) { error; }"
            "if (x < 5) { b := 0; }"
        )
        table = classify_domain_types(cfa)
        assert table["b"] is DomainType.BOOLEAN
        assert table["i"] is DomainType.LOOP_COUNTER
        assert table["x"] is DomainType.INTEGER_OTHER

    def test_counter_needs_cycle_guard(self):
        # increment on a cycle whose guard never mentions the variable: not a
        # loop counter
        cfa = load_cfa(
            "var i, k; k := 0; i := 0;"
            "while (k < 3) { i := i + 1; k := k + 1; }"
        )
        table = classify_domain_types(cfa)
        assert table["k"] is DomainType.LOOP_COUNTER
        assert table["i"] is DomainType.INTEGER_OTHER

    def test_boolean_copy_chain(self):
        cfa = load_cfa("var p, q; p := 1; q := p; if (q != 0) { p := 0; }")
        table = classify_domain_types(cfa)
        assert table["p"] is DomainType.BOOLEAN
        assert table["q"] is DomainType.BOOLEAN

    def test_arithmetic_use_disqualifies_boolean(self):
        cfa = load_cfa("var b; b := 1; if (b < 2) { b := 0; }")
        assert classify_domain_types(cfa)["b"] is DomainType.INTEGER_OTHER

    def test_every_variable_classified(self):
        cfa = load_cfa("var a, b, c; a := 1;")
        assert set(classify_domain_types(cfa)) == {"a", "b", "c"}


def seq_over(*variables):
    entries = tuple(
        (pos, pos + 1, Assignment({x: 0})) for pos, x in enumerate(variables)
    )
    return InterpolantSequence(entries)


TABLE = {
    "b": DomainType.BOOLEAN,
    "x": DomainType.INTEGER_OTHER,
    "i": DomainType.LOOP_COUNTER,
}


class TestScoring:
    def test_boolean_weight(self):
        assert score_interpolant_sequence(seq_over("b"), TABLE) == 1

    def test_loop_counter_weight(self):
        assert score_interpolant_sequence(seq_over("i"), TABLE) == 100

    def test_sum_of_distinct_weights(self):
        assert score_interpolant_sequence(seq_over("b", "x", "b"), TABLE) == 11


class TestChoose:
    def test_domain_type_prefers_boolean(self):
        prefixes = [object(), object()]
        seqs = [seq_over("i"), seq_over("b")]
        idx = choose_sliced_prefix(prefixes, seqs, Heuristic.DOMAIN_TYPE, TABLE)
        assert idx == 1

    def test_shortest_takes_first(self):
        prefixes = [object(), object()]
        seqs = [seq_over("i"), seq_over("b")]
        assert choose_sliced_prefix(prefixes, seqs, Heuristic.PREFIX_SHORTEST, TABLE) == 0

    def test_longest_takes_last(self):
        prefixes = [object(), object()]
        seqs = [seq_over("i"), seq_over("b")]
        assert choose_sliced_prefix(prefixes, seqs, Heuristic.PREFIX_LONGEST, TABLE) == 1

    def test_tie_breaks_toward_longest(self):
        prefixes = [object(), object()]
        seqs = [seq_over("b"), seq_over("b")]
        assert choose_sliced_prefix(prefixes, seqs, Heuristic.DOMAIN_TYPE, TABLE) == 1

    def test_empty_is_contract_error(self):
        with pytest.raises(ValueError):
            choose_sliced_prefix([], [], Heuristic.DOMAIN_TYPE, TABLE)


class TestRefineSelecting:
    def test_family_path_domain_type_tracks_only_flag(self):
        cfa, path = first_spurious_path(fig2_program(10))
        table = classify_domain_types(cfa)
        result = refine_selecting(path, Heuristic.DOMAIN_TYPE, table, cfa.variables)
        tracked = set()
        for loc in cfa.locations:
            tracked |= result.precision.at(loc)
        assert tracked == {"b"}
        assert result.chosen_score == 1

    def test_shortest_on_two_reason_path(self):
        table = {"x": DomainType.INTEGER_OTHER, "y": DomainType.INTEGER_OTHER}
        result = refine_selecting(
            TWO_REASONS, Heuristic.PREFIX_SHORTEST, table, ["x", "y"]
        )
        assert result.precision.at(1) == {"x"}
        assert result.prefix_count == 2 and result.chosen_index == 0

    def test_classic_heuristic_bypasses_selection(self):
        table = {"x": DomainType.INTEGER_OTHER, "y": DomainType.INTEGER_OTHER}
        selecting = refine_selecting(TWO_REASONS, Heuristic.CLASSIC, table, ["x", "y"])
        classic = refine_classic(TWO_REASONS, ["x", "y"])
        assert selecting.precision == classic.precision
        assert selecting.prefix_count == 0

    def test_single_prefix_matches_classic(self, spurious_sample):
        # a sliced prefix has exactly one contradiction, at its final assume,
        # so it is its own sole prefix and selection degenerates to the plain
        # whole-path refinement
        checked = 0
        for path, _, variables in spurious_sample:
            single = extract_sliced_prefixes(path)[0].path
            assert len(extract_sliced_prefixes(single)) == 1
            table = {x: DomainType.INTEGER_OTHER for x in variables}
            selecting = refine_selecting(
                single, Heuristic.DOMAIN_TYPE, table, variables
            )
            classic = refine_classic(single, variables)
            assert selecting.precision == classic.precision
            checked += 1
            if checked >= 10:
                break
        assert checked > 0

    def test_feasible_input_is_contract_error(self):
        with pytest.raises(FeasiblePathError):
            refine_selecting(
                mkpath((assign("x", 0), 1)), Heuristic.DOMAIN_TYPE, {}, ["x"]
            )

    def test_deterministic(self):
        table = {"x": DomainType.INTEGER_OTHER, "y": DomainType.INTEGER_OTHER}
        a = refine_selecting(TWO_REASONS, Heuristic.DOMAIN_TYPE, table, ["x", "y"])
        b = refine_selecting(TWO_REASONS, Heuristic.DOMAIN_TYPE, table, ["x", "y"])
        assert a.precision == b.precision and a.chosen_index == b.chosen_index


class TestProgress:
    @pytest.mark.parametrize("heuristic", list(Heuristic))
    def test_all_heuristics_exclude_the_path(self, heuristic, spurious_sample):
        for path, _, variables in spurious_sample[:30]:
            table = {x: DomainType.INTEGER_OTHER for x in variables}
            result = refine_selecting(path, heuristic, table, variables)
            assert check_refinement_progress(path, result.precision)

    def test_argmin_correctness(self, spurious_sample):
        for path, _, variables in spurious_sample[:30]:
            prefixes = extract_sliced_prefixes(path)
            table = {x: DomainType.INTEGER_OTHER for x in variables}
            seqs = [interpolant_sequence(p.path, variables)[0] for p in prefixes]
            chosen = choose_sliced_prefix(prefixes, seqs, Heuristic.DOMAIN_TYPE, table)
            best = score_interpolant_sequence(seqs[chosen], table)
            assert all(
                best <= score_interpolant_sequence(s, table) for s in seqs
            )


class TestPrecision:
    def test_union_is_pointwise_monotone(self):
        a = Precision({1: frozenset({"x"})})
        b = Precision({1: frozenset({"y"}), 2: frozenset({"z"})})
        merged = a.union(b)
        assert merged.at(1) == {"x", "y"} and merged.at(2) == {"z"}
        assert a.union(b).at(1) >= a.at(1)

    def test_default_empty(self):
        assert Precision().at(42) == frozenset()
