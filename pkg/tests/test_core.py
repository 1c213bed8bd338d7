"""Clause, resolution, and formula store behavior."""

import random

import pytest

from dratkit import (
    TAUTOLOGY,
    Clause,
    Formula,
    MalformedLiteralError,
    ResolutionError,
    UnknownClauseError,
    formula_from_clauses,
    normalize,
    resolve,
)
from _oracles import naive_entails


class TestClause:
    def test_dedup_keeps_first_occurrence_order(self):
        assert Clause([1, 2, 1]).lits == (1, 2)
        assert Clause([3, -1, 3, -1, 2]).lits == (3, -1, 2)

    def test_set_equality_and_hash(self):
        assert Clause([1, 2]) == Clause([2, 1])
        assert hash(Clause([1, 2])) == hash(Clause([2, 1]))
        assert Clause([1, 2]) != Clause([1, 2, 3])
        assert len({Clause([1, 2]), Clause([2, 1, 2])}) == 1

    def test_empty_unit_tautology_flags(self):
        assert Clause([]).is_empty
        assert Clause([5]).is_unit
        assert Clause([1, -1]).is_tautology
        assert not Clause([1, 2]).is_tautology

    def test_membership_iteration(self):
        c = Clause([4, -2])
        assert 4 in c and -2 in c and 2 not in c
        assert list(c) == [4, -2]
        assert len(c) == 2

    def test_rejects_zero_and_nonint(self):
        with pytest.raises(MalformedLiteralError):
            Clause([1, 0])
        with pytest.raises(MalformedLiteralError):
            Clause([1, "2"])
        with pytest.raises(MalformedLiteralError):
            Clause([True])


class TestNormalize:
    def test_dedup(self):
        assert normalize([1, 2, 1]) == Clause([1, 2])

    def test_tautology(self):
        assert normalize([1, -1]) is TAUTOLOGY
        assert normalize([2, 1, -2]) is TAUTOLOGY

    def test_empty(self):
        assert normalize([]) == Clause([])


class TestResolve:
    def test_basic(self):
        assert resolve(Clause([1, 2]), Clause([-1, 3]), 1) == Clause([2, 3])

    def test_units_give_empty(self):
        assert resolve(Clause([1]), Clause([-1]), 1) == Clause([])

    def test_tautological_result(self):
        assert resolve(Clause([1, 2]), Clause([-1, -2]), 1) is TAUTOLOGY

    def test_pivot_must_occur(self):
        with pytest.raises(ResolutionError):
            resolve(Clause([2]), Clause([-1]), 1)
        with pytest.raises(ResolutionError):
            resolve(Clause([1]), Clause([2]), 1)

    def test_resolvent_entailed_by_premises(self):
        rng = random.Random(11)
        for _ in range(200):
            nv = rng.randint(2, 5)
            pivot = rng.randint(1, nv)
            c = {pivot} | {rng.choice([-1, 1]) * rng.randint(1, nv) for _ in range(rng.randint(0, 3))}
            d = {-pivot} | {rng.choice([-1, 1]) * rng.randint(1, nv) for _ in range(rng.randint(0, 3))}
            c.discard(-pivot)
            d.discard(pivot)
            r = resolve(Clause(sorted(c)), Clause(sorted(d)), pivot)
            if r is TAUTOLOGY:
                assert any(-l in (c | d) - {pivot, -pivot} for l in (c | d) - {pivot, -pivot})
            else:
                assert set(r.lits) == (c | d) - {pivot, -pivot}
                assert naive_entails([sorted(c), sorted(d)], r.lits)


class TestFormula:
    def test_ids_assigned_from_one(self):
        f = Formula()
        assert f.add_clause(Clause([1, 2])) == 1
        assert f.add_clause(Clause([-1])) == 2
        assert f.next_id == 3

    def test_max_var_tracks_additions(self):
        f = Formula()
        f.add_clause(Clause([1, -7]))
        assert f.max_var == 7
        f.declare_variables(9)
        assert f.max_var == 9
        f.declare_variables(2)
        assert f.max_var == 9

    def test_remove_by_content_matches_as_set(self):
        f = formula_from_clauses([[1, 2], [-1]])
        assert f.remove_clause(Clause([2, 1])) is True
        assert len(f) == 1
        assert Clause([1, 2]) not in f

    def test_remove_absent_content_is_counted_noop(self):
        f = formula_from_clauses([[1, 2]])
        assert f.remove_clause(Clause([3])) is False
        assert f.missing_deletes == 1
        assert len(f) == 1

    def test_remove_by_id(self):
        f = formula_from_clauses([[1], [2]])
        assert f.remove_clause(1) is True
        with pytest.raises(UnknownClauseError):
            f.remove_clause(1)

    def test_duplicate_content_lowest_id_removed_first(self):
        f = formula_from_clauses([[1, 2], [2, 1], [1, 2]])
        assert f.ids_for(Clause([1, 2])) == [1, 2, 3]
        f.remove_clause(Clause([1, 2]))
        assert f.ids_for(Clause([1, 2])) == [2, 3]

    def test_forced_ids_must_increase(self):
        f = Formula()
        f.add_clause(Clause([1]), cid=4)
        assert f.next_id == 5
        f.add_clause(Clause([2]))
        assert sorted(f.clauses) == [4, 5]
        with pytest.raises(ValueError):
            f.add_clause(Clause([3]), cid=2)

    def test_occurrence_index(self):
        f = formula_from_clauses([[1, 2], [-1, 2], [3]])
        assert f.occurrence(2) == [1, 2]
        assert f.occurrence(-1) == [2]
        assert f.occurrence(5) == []
        f.remove_clause(1)
        assert f.occurrence(2) == [2]

    def test_empty_clause_tracking(self):
        f = formula_from_clauses([[1], []])
        assert f.has_empty
        assert f.empty_ids() == [2]
        assert f.ids_for(Clause([])) == [2]

    def test_copy_is_independent(self):
        f = formula_from_clauses([[1, 2], [-2]])
        g = f.copy()
        g.remove_clause(1)
        g.add_clause(Clause([9]))
        assert len(f) == 2 and f.occurrence(1) == [1]
        assert f.max_var == 2
        assert Clause([9]) not in f

    def test_items_id_order(self):
        f = formula_from_clauses([[1], [2]])
        f.remove_clause(1)
        f.add_clause(Clause([3]))
        assert [i for i, _ in f.items()] == [2, 3]

    def test_random_trace_occurrence_consistency(self):
        rng = random.Random(7)
        for _ in range(30):
            f = Formula()
            shadow = {}
            for _ in range(60):
                if shadow and rng.random() < 0.4:
                    if rng.random() < 0.5:
                        cid = rng.choice(sorted(shadow))
                        f.remove_clause(cid)
                        del shadow[cid]
                    else:
                        lits = tuple(sorted(rng.choice(list(shadow.values()))))
                        want = sorted(i for i, c in shadow.items() if set(c) == set(lits))
                        assert f.remove_clause(Clause(lits)) is True
                        del shadow[want[0]]
                else:
                    lits = sorted({rng.choice([-1, 1]) * rng.randint(1, 4)
                                   for _ in range(rng.randint(1, 3))})
                    if any(-l in lits for l in lits):
                        continue
                    shadow[f.add_clause(Clause(lits))] = lits
            assert sorted(f.clauses) == sorted(shadow)
            for lit in range(-4, 5):
                if lit == 0:
                    continue
                want = sorted(i for i, c in shadow.items() if lit in c)
                assert f.occurrence(lit) == want
