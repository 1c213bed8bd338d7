"""Format parsing and serialization behavior."""

import random

import pytest

from dratkit.core import Clause
from dratkit.formats import (
    Chain,
    Delete,
    Extend,
    HintBlock,
    ParseError,
    add_step,
    delete_ids_step,
    delete_step,
    extension_clauses,
    parse_dimacs,
    parse_drat,
    parse_drat_binary,
    parse_drat_text,
    parse_er,
    parse_lrat,
    write_dimacs,
    write_drat_binary,
    write_drat_text,
    write_er,
    write_lrat,
)


class TestDimacs:
    def test_two_clause_file(self):
        f, nv, nc = parse_dimacs(b"p cnf 2 2\n1 2 0\n-1 0\n")
        assert dict(f.items()) == {1: Clause([1, 2]), 2: Clause([-1])}
        assert (nv, nc) == (2, 2)
        assert f.max_var == 2

    def test_comment_skipping(self):
        f, _, _ = parse_dimacs(b"c x\np cnf 1 1\n1 0\n")
        assert dict(f.items()) == {1: Clause([1])}

    def test_unterminated_clause(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_dimacs(b"p cnf 2 1\n1 2\n")

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_dimacs(b"1 2 0\n")
        with pytest.raises(ParseError):
            parse_dimacs(b"c only comments\n")

    def test_header_over_declares_variables(self):
        f, nv, _ = parse_dimacs(b"p cnf 9 1\n1 0\n")
        assert f.max_var == 9

    def test_strict_flags_overflow_and_count(self):
        assert parse_dimacs(b"p cnf 1 1\n1 2 0\n")[0].max_var == 2
        with pytest.raises(ParseError):
            parse_dimacs(b"p cnf 1 1\n1 2 0\n", strict=True)
        with pytest.raises(ParseError):
            parse_dimacs(b"p cnf 2 2\n1 0\n", strict=True)

    def test_clause_spanning_lines(self):
        f, _, _ = parse_dimacs(b"p cnf 3 1\n1\n2 3 0\n")
        assert f.clauses[1] == Clause([1, 2, 3])

    def test_roundtrip(self):
        f, _, _ = parse_dimacs(b"p cnf 3 3\n1 2 0\n-3 0\n0\n")
        again, nv, nc = parse_dimacs(write_dimacs(f))
        assert dict(again.items()) == dict(f.items())
        assert (nv, nc) == (3, 3)


class TestDratText:
    def test_unit_then_empty(self):
        steps = parse_drat_text(b"1 0\n0\n")
        assert [(s.kind, s.clause) for s in steps] == [
            ("add", Clause([1])), ("add", Clause([]))]

    def test_deletion_line(self):
        steps = parse_drat_text(b"d 1 2 0\n")
        assert [(s.kind, s.clause) for s in steps] == [("delete", Clause([1, 2]))]

    def test_write_golden(self):
        assert write_drat_text([add_step([1]), add_step([])]) == b"1 0\n0\n"
        assert write_drat_text([delete_step([1, 2])]) == b"d 1 2 0\n"

    def test_tokens_may_span_lines(self):
        steps = parse_drat_text(b"1\n2 0 d\n1\n2 0\n")
        assert [s.kind for s in steps] == ["add", "delete"]
        assert steps[0].clause == steps[1].clause == Clause([1, 2])

    def test_unterminated_step(self):
        with pytest.raises(ParseError):
            parse_drat_text(b"1 2\n")
        with pytest.raises(ParseError):
            parse_drat_text(b"d\n")

    def test_bad_token(self):
        with pytest.raises(ParseError):
            parse_drat_text(b"1 x 0\n")


class TestDratBinary:
    def test_spec_bytes(self):
        steps = parse_drat_binary(bytes([0x61, 0x02, 0x05, 0x00]))
        assert [(s.kind, s.clause) for s in steps] == [("add", Clause([1, -2]))]
        assert write_drat_binary([add_step([1, -2])]) == bytes([0x61, 0x02, 0x05, 0x00])

    def test_multibyte_varint(self):
        steps = [add_step([-1000000, 77])]
        data = write_drat_binary(steps)
        back = parse_drat_binary(data)
        assert back[0].clause == Clause([-1000000, 77])

    def test_unknown_tag(self):
        with pytest.raises(ParseError, match="byte 0"):
            parse_drat_binary(bytes([0x62, 0x00]))

    def test_low_payload_rejected(self):
        with pytest.raises(ParseError):
            parse_drat_binary(bytes([0x61, 0x01, 0x00]))

    def test_every_non_boundary_truncation_rejected(self):
        steps = [add_step([1, -2]), delete_step([300]), add_step([])]
        data = write_drat_binary(steps)
        boundaries = set()
        pos = 0
        for s in steps:
            pos += 1 + sum(len(write_drat_binary([add_step([l])])) - 2 for l in s.clause.lits) + 1
            boundaries.add(pos)
        for cut in range(len(data)):
            if cut in boundaries or cut == 0:
                parse_drat_binary(data[:cut])
            else:
                with pytest.raises(ParseError):
                    parse_drat_binary(data[:cut])

    def test_text_binary_agreement(self):
        steps_t = parse_drat_text(b"1 -2 0\nd 300 0\n0\n")
        steps_b = parse_drat_binary(write_drat_binary(steps_t))
        assert steps_t == steps_b


class TestDratAutoDetect:
    def test_text_detected(self):
        assert parse_drat(b"1 0\n0\n")[0].clause == Clause([1])

    def test_binary_detected(self):
        assert parse_drat(bytes([0x61, 0x02, 0x00]))[0].clause == Clause([1])

    def test_leading_text_deletion_needs_override(self):
        data = b"d 1 2 0\n"
        with pytest.raises(ParseError):
            parse_drat(data)
        steps = parse_drat(data, binary=False)
        assert steps[0].kind == "delete"

    def test_force_binary(self):
        data = write_drat_binary([add_step([1])])
        assert parse_drat(data, binary=True) == parse_drat(data)


class TestLrat:
    def test_addition_line(self):
        steps = parse_lrat(b"3 2 0 1 2 0\n")
        (sid, s), = steps
        assert sid == 3 and s.kind == "add" and s.clause == Clause([2])
        assert s.hints == HintBlock(rup_chain=(1, 2))

    def test_deletion_line(self):
        (sid, s), = parse_lrat(b"4 d 1 0\n")
        assert sid == 4 and s.kind == "delete" and s.ids == (1,)

    def test_empty_clause_line(self):
        (sid, s), = parse_lrat(b"5 0 3 2 0\n")
        assert sid == 5 and s.clause == Clause([]) and s.hints.rup_chain == (3, 2)

    def test_rat_groups_split_at_negative_hints(self):
        (_, s), = parse_lrat(b"9 1 5 0 1 -3 4 -6 0\n")
        assert s.hints.rup_chain == (1,)
        assert s.hints.rat_groups == ((3, (4,)), (6, ()))

    def test_non_monotone_ids_rejected(self):
        with pytest.raises(ParseError):
            parse_lrat(b"3 1 0 1 0\n3 2 0 1 0\n")
        with pytest.raises(ParseError):
            parse_lrat(b"4 1 0 1 0\n3 2 0 1 0\n")

    def test_forward_hint_rejected(self):
        with pytest.raises(ParseError, match="not below"):
            parse_lrat(b"3 2 0 3 0\n")
        with pytest.raises(ParseError, match="not below"):
            parse_lrat(b"3 2 0 -4 1 0\n")

    def test_hintless_nonempty_addition_rejected(self):
        with pytest.raises(ParseError):
            parse_lrat(b"3 2 0 0\n")

    def test_hintless_empty_addition_parses(self):
        (sid, s), = parse_lrat(b"3 0 0\n")
        assert s.clause == Clause([]) and s.hints == HintBlock()

    def test_roundtrip_golden(self):
        text = b"5 1 0 1 3 0\n6 0 5 2 4 0\n"
        assert write_lrat(parse_lrat(text)) == text


class TestEr:
    def test_extension_line(self):
        (sid, s), = parse_er(b"4 e 3 1 2 0\n")
        assert sid == 4 and s == Extend(3, 1, (2,))

    def test_family_shape(self):
        fam = extension_clauses(3, 1, [2])
        assert fam == [Clause([3, -1]), Clause([3, -2]), Clause([-3, 1, 2])]

    def test_family_k0_collapses(self):
        assert extension_clauses(3, 1, []) == [Clause([3, -1]), Clause([3])]

    def test_chain_line(self):
        (sid, s), = parse_er(b"7 2 3 0 4 6 0\n")
        assert sid == 7 and s == Chain(Clause([2, 3]), (4, 6))

    def test_deletion_line(self):
        (sid, s), = parse_er(b"5 d 1 2 0\n")
        assert s == Delete((1, 2))

    def test_extension_claims_id_span(self):
        with pytest.raises(ParseError, match="collides"):
            parse_er(b"4 e 3 1 2 0\n6 9 0 4 0\n")
        steps = parse_er(b"4 e 3 1 2 0\n7 9 0 4 0\n")
        assert [sid for sid, _ in steps] == [4, 7]

    def test_document_freshness(self):
        with pytest.raises(ParseError, match="not fresh"):
            parse_er(b"4 e 3 1 2 0\n7 e 3 1 0\n")
        steps = parse_er(b"4 e 3 1 2 0\n7 e 4 -3 0\n")
        assert steps[1][1] == Extend(4, -3, ())

    def test_chain_needs_antecedents(self):
        with pytest.raises(ParseError):
            parse_er(b"7 2 0 0\n")

    def test_roundtrip_golden(self):
        text = b"4 e 3 1 2 0\n7 2 3 0 4 6 0\n7 d 1 2 0\n"
        assert write_er(parse_er(text)) == text


def _random_clause(rng, maxvar=9, width=4):
    n = rng.randint(0, width)
    vs = rng.sample(range(1, maxvar + 1), min(n, maxvar))
    return [v * rng.choice([-1, 1]) for v in vs]


class TestRoundTripProperties:
    def test_drat_both_encodings(self):
        rng = random.Random(21)
        for _ in range(50):
            steps = []
            for _ in range(rng.randint(0, 12)):
                lits = _random_clause(rng)
                steps.append(delete_step(lits) if rng.random() < 0.3 and lits
                             else add_step(lits))
            assert parse_drat_text(write_drat_text(steps)) == steps
            assert parse_drat_binary(write_drat_binary(steps)) == steps

    def test_lrat(self):
        rng = random.Random(22)
        for _ in range(50):
            steps = []
            sid = rng.randint(3, 6)
            for _ in range(rng.randint(1, 10)):
                if rng.random() < 0.3:
                    steps.append((sid, delete_ids_step(
                        sorted(rng.sample(range(1, sid), min(2, sid - 1))))))
                    continue
                sid += rng.randint(1, 3)
                rup = tuple(sorted(rng.sample(range(1, sid), min(rng.randint(0, 2), sid - 1))))
                groups = []
                for _ in range(rng.randint(0, 2)):
                    cand = rng.randint(1, sid - 1)
                    chain = tuple(sorted(rng.sample(range(1, sid), min(2, sid - 1))))
                    groups.append((cand, chain))
                lits = _random_clause(rng)
                if not lits and not groups:
                    rup = rup or (1,)
                if not lits:
                    groups = []
                block = HintBlock(rup_chain=rup, rat_groups=tuple(groups))
                if lits and not rup and not groups:
                    block = HintBlock(rup_chain=(1,))
                steps.append((sid, add_step(lits, hints=block)))
            assert parse_lrat(write_lrat(steps)) == steps

    def test_er(self):
        rng = random.Random(23)
        for _ in range(50):
            steps = []
            sid = 5
            maxvar = 4
            for _ in range(rng.randint(1, 8)):
                r = rng.random()
                if r < 0.3:
                    maxvar += 1
                    k = rng.randint(0, 2)
                    ls = tuple(v * rng.choice([-1, 1])
                               for v in rng.sample(range(1, maxvar), min(k, maxvar - 1)))
                    p = rng.randint(1, maxvar - 1) * rng.choice([-1, 1])
                    steps.append((sid, Extend(maxvar, p, ls)))
                    sid += len(ls) + 2
                elif r < 0.6:
                    steps.append((sid, Delete(tuple(sorted(rng.sample(range(1, sid), 2))))))
                else:
                    lits = _random_clause(rng, maxvar=maxvar)
                    ants = tuple(sorted(rng.sample(range(1, sid), min(2, sid - 1))))
                    steps.append((sid, Chain(Clause(lits), ants)))
                    sid += 1
            assert parse_er(write_er(steps)) == steps
