"""CNF data model, DIMACS reading/writing, and model checking.

Literals are DIMACS integers throughout: ``v`` is the positive literal of
variable ``v`` and ``-v`` its negation.  Variables are numbered from 1.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

log = logging.getLogger(__name__)

BRUTE_FORCE_MAX_VARS = 25


class DimacsParseError(ValueError):
    """Base class for malformed DIMACS input; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MissingHeaderError(DimacsParseError):
    pass


class BadHeaderError(DimacsParseError):
    pass


class VariableOutOfRangeError(DimacsParseError):
    pass


class InvalidTokenError(DimacsParseError):
    pass


class UnterminatedClauseError(DimacsParseError):
    pass


class IncompleteAssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class Clause:
    literals: tuple[int, ...]
    learnt: bool = False
    lbd: Optional[int] = None

    def __post_init__(self):
        if self.learnt != (self.lbd is not None):
            raise ValueError("lbd must be given exactly for learnt clauses")

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)


@dataclass(frozen=True)
class Formula:
    num_vars: int
    clauses: tuple[Clause, ...] = ()
    tautologies_dropped: int = 0
    declared_clauses: Optional[int] = None

    def __post_init__(self):
        for c in self.clauses:
            for lit in c.literals:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(
                        f"literal {lit} outside 1..{self.num_vars}")

    @classmethod
    def from_lists(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "Formula":
        """Build a formula from integer lists, applying the ingest rules
        (duplicates merged, tautologies dropped and counted)."""
        kept = []
        dropped = 0
        for raw in clauses:
            lits = _normalize(raw)
            if lits is None:
                dropped += 1
            else:
                kept.append(Clause(lits))
        return cls(num_vars, tuple(kept), dropped)

    @property
    def trivially_unsat(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def as_lists(self) -> list[list[int]]:
        return [list(c.literals) for c in self.clauses]


def _normalize(lits: Iterable[int]) -> Optional[tuple[int, ...]]:
    seen: dict[int, None] = {}
    for lit in lits:
        if -lit in seen:
            return None
        seen[lit] = None
    return tuple(seen)


def parse_dimacs(text: Union[str, bytes]) -> Formula:
    """Parse DIMACS CNF.

    Each malformation raises its own :class:`DimacsParseError` subclass
    carrying the offending line number.  A clause count in the header that
    disagrees with the body is only logged.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")

    num_vars: Optional[int] = None
    declared: Optional[int] = None
    clauses: list[Clause] = []
    dropped = 0
    current: list[int] = []
    last_line = 0

    for lineno, line in enumerate(text.splitlines(), start=1):
        last_line = lineno
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            # SATLIB end marker
            break
        if stripped.startswith("p"):
            if num_vars is not None:
                raise BadHeaderError("duplicate problem line", lineno)
            parts = stripped.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise BadHeaderError(f"garbled problem line {stripped!r}", lineno)
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise BadHeaderError(f"garbled problem line {stripped!r}", lineno) from None
            if num_vars < 0 or declared < 0:
                raise BadHeaderError("negative counts in problem line", lineno)
            continue
        if num_vars is None:
            raise MissingHeaderError("clause data before 'p cnf' header", lineno)
        for tok in stripped.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InvalidTokenError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                lits = _normalize(current)
                if lits is None:
                    dropped += 1
                else:
                    clauses.append(Clause(lits))
                current = []
            else:
                if abs(lit) > num_vars:
                    raise VariableOutOfRangeError(
                        f"variable {abs(lit)} exceeds declared count {num_vars}", lineno)
                current.append(lit)

    if num_vars is None:
        raise MissingHeaderError("no 'p cnf' header found", max(last_line, 1))
    if current:
        raise UnterminatedClauseError("final clause is missing its 0 terminator", last_line)
    if declared != len(clauses) + dropped:
        log.warning("header declares %d clauses, found %d", declared, len(clauses) + dropped)
    return Formula(num_vars, tuple(clauses), dropped, declared)


def to_dimacs(formula: Formula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    for c in formula.clauses:
        lines.append(" ".join([*map(str, c.literals), "0"]))
    return "\n".join(lines) + "\n"


def evaluate(formula: Formula, assignment: Union[Mapping[int, bool], Sequence[bool]]) -> bool:
    """True iff every clause has a satisfied literal.

    ``assignment`` maps each variable 1..n to a bool; a sequence is taken
    as 0-indexed (entry ``i`` is variable ``i + 1``).
    """
    if not isinstance(assignment, Mapping):
        assignment = {i + 1: bool(b) for i, b in enumerate(assignment)}
    missing = [v for v in range(1, formula.num_vars + 1) if v not in assignment]
    if missing:
        raise IncompleteAssignmentError(f"no value for variables {missing[:10]}")
    for c in formula.clauses:
        if not any(assignment[abs(lit)] == (lit > 0) for lit in c.literals):
            return False
    return True


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    INDETERMINATE = "INDET"


@dataclass
class Outcome:
    status: Status
    model: Optional[dict[int, bool]] = None
    stats: Optional[object] = field(default=None, repr=False)

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT


def brute_force_solve(formula: Formula, chunk_bits: int = 16) -> Outcome:
    """Exhaustive search in lexicographic order (variable 1 most
    significant, False before True).  Test oracle only."""
    n = formula.num_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VARS} variables, got {n}")
    if formula.trivially_unsat:
        return Outcome(Status.UNSAT)
    if not formula.clauses:
        return Outcome(Status.SAT, {v: False for v in range(1, n + 1)})

    # bit (n - v) of the enumeration index holds variable v
    shifts = np.array([n - v for v in range(1, n + 1)], dtype=np.int64)
    chunk = 1 << min(n, chunk_bits)
    total = 1 << n
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(bool)
        ok = np.ones(len(idx), dtype=bool)
        for c in formula.clauses:
            sat = np.zeros(len(idx), dtype=bool)
            for lit in c.literals:
                col = bits[:, abs(lit) - 1]
                sat |= col if lit > 0 else ~col
            ok &= sat
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            row = bits[hits[0]]
            return Outcome(Status.SAT, {v: bool(row[v - 1]) for v in range(1, n + 1)})
    return Outcome(Status.UNSAT)
