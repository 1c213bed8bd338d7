"""Propositional foundations: literals, clauses, formulas, resolution.

Literals are nonzero ints in the DIMACS convention: the variable v is the
positive literal v, its negation is -v.  Clauses keep their literals in
first-occurrence order for display but compare and hash as literal sets.
A Formula is an id-addressed clause store with an occurrence index; clause
ids are assigned in insertion order and never reused.
"""

from __future__ import annotations

from typing import Iterable, Iterator


class MalformedLiteralError(ValueError):
    """A literal was zero or not an integer."""


class ResolutionError(ValueError):
    """resolve() was called with a pivot absent from a premise."""


class UnknownClauseError(KeyError):
    """A clause id was not present in the formula."""


class _Tautology:
    """Singleton marker for a clause containing a literal and its negation."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Tautology"


TAUTOLOGY = _Tautology()


def _check_literals(lits: Iterable[int]) -> tuple[int, ...]:
    out = []
    seen = set()
    for l in lits:
        if not isinstance(l, int) or isinstance(l, bool) or l == 0:
            raise MalformedLiteralError("literal must be a nonzero integer, got %r" % (l,))
        if l not in seen:
            seen.add(l)
            out.append(l)
    return tuple(out)


class Clause:
    """An immutable set of literals, displayed in first-occurrence order.

    Equality and hashing use the literal set, so {1,2} == {2,1}.  A Clause
    may hold a complementary pair (input files legitimately contain
    tautologies); is_tautology reports that.  Use normalize() when the
    tautology case must be surfaced as a distinct result.
    """

    __slots__ = ("lits", "_set", "_hash")

    def __init__(self, lits: Iterable[int] = ()):
        self.lits = _check_literals(lits)
        self._set = frozenset(self.lits)
        self._hash = hash(self._set)

    @property
    def litset(self) -> frozenset[int]:
        return self._set

    @property
    def is_empty(self) -> bool:
        return not self.lits

    @property
    def is_unit(self) -> bool:
        return len(self.lits) == 1

    @property
    def is_tautology(self) -> bool:
        s = self._set
        return any(-l in s for l in s)

    def __contains__(self, lit: int) -> bool:
        return lit in self._set

    def __iter__(self) -> Iterator[int]:
        return iter(self.lits)

    def __len__(self) -> int:
        return len(self.lits)

    def __eq__(self, other) -> bool:
        if isinstance(other, Clause):
            return self._set == other._set
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "Clause(%s)" % (list(self.lits),)


EMPTY_CLAUSE = Clause(())


def normalize(lits: Iterable[int]):
    """Deduplicate a raw literal list into a Clause, or report TAUTOLOGY.

    Raises MalformedLiteralError for zero or non-integer literals.
    """
    c = Clause(lits)
    if c.is_tautology:
        return TAUTOLOGY
    return c


def resolve(c: Clause, d: Clause, pivot: int):
    """Resolvent of c and d on pivot: (c \\ {pivot}) | (d \\ {-pivot}).

    Requires pivot in c and -pivot in d.  Returns TAUTOLOGY when the result
    contains a complementary pair.
    """
    if pivot not in c:
        raise ResolutionError("pivot %d not in first premise %r" % (pivot, c))
    if -pivot not in d:
        raise ResolutionError("negated pivot %d not in second premise %r" % (-pivot, d))
    lits = [l for l in c.lits if l != pivot]
    have = set(lits)
    taut = False
    for l in d.lits:
        if l == -pivot:
            continue
        if l not in have:
            have.add(l)
            lits.append(l)
        if -l in have:
            taut = True
    if taut:
        return TAUTOLOGY
    return Clause(lits)


class Formula:
    """Clause store with stable ids and a literal occurrence index.

    Ids are dense from 1 in insertion order for ordinary adds and never
    reused; add_clause(cid=...) lets id-addressed proof formats claim their
    own (strictly increasing) ids.  Content lookups use set equality, so
    duplicate additions are distinct ids sharing one content key.
    """

    def __init__(self):
        self.clauses: dict[int, Clause] = {}
        self.next_id = 1
        self.max_var = 0
        self.missing_deletes = 0
        self._occ: dict[int, set[int]] = {}

    def declare_variables(self, n: int) -> None:
        """Raise max_var to at least n (DIMACS headers may over-declare)."""
        if n > self.max_var:
            self.max_var = n

    def add_clause(self, clause, cid: int | None = None) -> int:
        if not isinstance(clause, Clause):
            clause = Clause(clause)
        if cid is None:
            cid = self.next_id
        elif cid < self.next_id:
            raise ValueError("clause id %d not above last id %d" % (cid, self.next_id - 1))
        self.next_id = cid + 1
        self.clauses[cid] = clause
        for l in clause.lits:
            self._occ.setdefault(l, set()).add(cid)
            v = abs(l)
            if v > self.max_var:
                self.max_var = v
        return cid

    def remove_by_id(self, cid: int) -> Clause:
        if cid not in self.clauses:
            raise UnknownClauseError(cid)
        clause = self.clauses.pop(cid)
        for l in clause.lits:
            self._occ[l].discard(cid)
        return clause

    def remove_by_content(self, clause) -> int | None:
        """Remove one clause equal to the given literal set; lowest id wins.

        Removing an absent clause is a recorded no-op: returns None and
        bumps missing_deletes.
        """
        if not isinstance(clause, Clause):
            clause = Clause(clause)
        ids = self.ids_for(clause)
        if not ids:
            self.missing_deletes += 1
            return None
        cid = ids[0]
        self.remove_by_id(cid)
        return cid

    def remove_clause(self, c) -> bool:
        """Spec-surface removal: by id (int, unknown id raises) or by content."""
        if isinstance(c, int):
            self.remove_by_id(c)
            return True
        return self.remove_by_content(c) is not None

    def ids_for(self, clause) -> list[int]:
        """All live ids whose clause equals the given content, ascending."""
        if not isinstance(clause, Clause):
            clause = Clause(clause)
        if not clause.lits:
            return sorted(i for i, c in self.clauses.items() if c.is_empty)
        probe = min((self._occ.get(l, ()) for l in clause.lits), key=len, default=())
        return sorted(i for i in probe if self.clauses[i] == clause)

    def occurrence(self, lit: int) -> list[int]:
        """Live clause ids containing lit, in ascending id order."""
        ids = self._occ.get(lit)
        if not ids:
            return []
        return sorted(ids)

    def empty_ids(self) -> list[int]:
        return sorted(i for i, c in self.clauses.items() if c.is_empty)

    @property
    def has_empty(self) -> bool:
        return any(c.is_empty for c in self.clauses.values())

    def items(self):
        """(id, clause) pairs in ascending id order."""
        return sorted(self.clauses.items())

    def copy(self) -> "Formula":
        f = Formula()
        f.clauses = dict(self.clauses)
        f.next_id = self.next_id
        f.max_var = self.max_var
        f._occ = {l: set(ids) for l, ids in self._occ.items()}
        return f

    def __len__(self) -> int:
        return len(self.clauses)

    def __contains__(self, clause) -> bool:
        return bool(self.ids_for(clause))

    def __repr__(self) -> str:
        return "Formula(%d clauses, max_var=%d)" % (len(self.clauses), self.max_var)


def formula_from_clauses(clause_lists: Iterable[Iterable[int]]) -> Formula:
    """Convenience builder: a Formula from raw literal lists, ids 1..n."""
    f = Formula()
    for lits in clause_lists:
        f.add_clause(Clause(lits))
    return f
