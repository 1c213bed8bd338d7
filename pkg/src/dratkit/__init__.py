"""Toolkit for checking and transforming clausal unsatisfiability proofs.

Supports DRAT (unguided, with specified and operational deletion modes),
LRAT (hint-guided), and extended-resolution proofs, plus a pipeline that
backward-checks a DRAT proof, trims it, and emits LRAT or extended
resolution from the trimmed core.
"""

from dratkit.core import (
    TAUTOLOGY,
    Clause,
    EMPTY_CLAUSE,
    Formula,
    MalformedLiteralError,
    ResolutionError,
    UnknownClauseError,
    formula_from_clauses,
    normalize,
    resolve,
)

__all__ = [
    "TAUTOLOGY",
    "Clause",
    "EMPTY_CLAUSE",
    "Formula",
    "MalformedLiteralError",
    "ResolutionError",
    "UnknownClauseError",
    "formula_from_clauses",
    "normalize",
    "resolve",
]

__version__ = "0.1.0"
