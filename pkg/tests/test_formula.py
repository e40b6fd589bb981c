import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resetsat.formula import (
    BadHeaderError,
    Clause,
    Formula,
    IncompleteAssignmentError,
    InvalidTokenError,
    MissingHeaderError,
    Status,
    UnterminatedClauseError,
    VariableOutOfRangeError,
    brute_force_solve,
    evaluate,
    parse_dimacs,
    to_dimacs,
)
from resetsat.generators import random_kcnf


class TestParse:
    def test_basic(self):
        f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0")
        assert f.num_vars == 2
        assert f.as_lists() == [[1, -2], [2]]

    def test_tautology_dropped_and_counted(self):
        f = parse_dimacs("c comment\np cnf 1 1\n1 -1 0")
        assert f.clauses == ()
        assert f.tautologies_dropped == 1

    def test_duplicates_merged(self):
        f = parse_dimacs("p cnf 3 1\n1 2 1 3 2 0\n")
        assert f.as_lists() == [[1, 2, 3]]

    def test_variable_exceeds_header(self):
        with pytest.raises(VariableOutOfRangeError, match="variable 2 exceeds declared count 1") as ei:
            parse_dimacs("p cnf 1 1\n2 0")
        assert ei.value.line == 2

    def test_missing_header(self):
        with pytest.raises(MissingHeaderError):
            parse_dimacs("1 2 0\n")
        with pytest.raises(MissingHeaderError):
            parse_dimacs("c only a comment\n")

    @pytest.mark.parametrize("header", ["p cnf 2", "p dnf 2 2", "p cnf x 2", "p cnf 2 2 2"])
    def test_garbled_header(self, header):
        with pytest.raises(BadHeaderError):
            parse_dimacs(header + "\n1 0\n")

    def test_non_integer_token(self):
        with pytest.raises(InvalidTokenError) as ei:
            parse_dimacs("p cnf 2 1\n1 a 0\n")
        assert ei.value.line == 2

    def test_unterminated(self):
        with pytest.raises(UnterminatedClauseError) as ei:
            parse_dimacs("p cnf 2 2\n1 2 0\n-1 -2\n")
        assert ei.value.line == 3

    def test_empty_clause_marks_unsat(self):
        f = parse_dimacs("p cnf 2 2\n1 0\n0\n")
        assert f.trivially_unsat

    def test_clause_count_mismatch_is_only_a_warning(self, caplog):
        f = parse_dimacs("p cnf 2 5\n1 0\n")
        assert len(f.clauses) == 1
        assert "declares 5 clauses" in caplog.text

    def test_clause_spanning_lines_and_bytes_input(self):
        f = parse_dimacs(b"p cnf 3 1\n1 2\n3 0\n")
        assert f.as_lists() == [[1, 2, 3]]

    def test_satlib_trailer(self):
        f = parse_dimacs("p cnf 2 1\n1 2 0\n%\n0\n")
        assert f.as_lists() == [[1, 2]]


class TestTypes:
    def test_lbd_iff_learnt(self):
        Clause((1, 2), learnt=True, lbd=2)
        with pytest.raises(ValueError):
            Clause((1, 2), learnt=True)
        with pytest.raises(ValueError):
            Clause((1, 2), lbd=2)

    def test_formula_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Formula(1, (Clause((2,)),))


class TestEvaluate:
    f = Formula.from_lists(2, [[1, -2], [2]])

    def test_satisfied(self):
        assert evaluate(self.f, {1: True, 2: True})

    def test_falsified(self):
        assert not evaluate(self.f, {1: False, 2: True})

    def test_vacuous(self):
        assert evaluate(Formula(3), {1: False, 2: True, 3: False})

    def test_incomplete(self):
        with pytest.raises(IncompleteAssignmentError):
            evaluate(self.f, {1: True})

    def test_sequence_form(self):
        assert evaluate(self.f, [True, True])


class TestBruteForce:
    def test_contradiction(self):
        assert brute_force_solve(Formula.from_lists(1, [[1], [-1]])).status is Status.UNSAT

    def test_lexicographic_first(self):
        out = brute_force_solve(Formula.from_lists(2, [[1, 2]]))
        assert out.status is Status.SAT
        assert out.model == {1: False, 2: True}

    def test_guard(self):
        with pytest.raises(ValueError):
            brute_force_solve(Formula(26))

    def test_matches_naive_enumeration(self):
        # independent pure-python enumeration
        for seed in range(40):
            f = random_kcnf(7, 30, seed=seed)
            first = None
            for bits in itertools.product((False, True), repeat=7):
                m = {v: bits[v - 1] for v in range(1, 8)}
                if evaluate(f, m):
                    first = m
                    break
            out = brute_force_solve(f, chunk_bits=4)
            assert out.model == first


literal = st.integers(1, 6).flatmap(lambda v: st.sampled_from([v, -v]))
formulas = st.lists(st.lists(literal, min_size=0, max_size=5), max_size=12).map(
    lambda cls: Formula.from_lists(6, cls))


@given(formulas)
@settings(max_examples=200, deadline=None)
def test_round_trip(f):
    g = parse_dimacs(to_dimacs(f))
    assert g.num_vars == f.num_vars
    assert g.clauses == f.clauses


@given(formulas)
@settings(max_examples=100, deadline=None)
def test_brute_force_models_evaluate(f):
    out = brute_force_solve(f)
    if out.status is Status.SAT:
        assert evaluate(f, out.model)


@given(st.integers(1, 5), st.integers(6, 40))
def test_parser_never_accepts_out_of_range(n, v):
    with pytest.raises(VariableOutOfRangeError):
        parse_dimacs(f"p cnf {n} 1\n{v} 0\n")
