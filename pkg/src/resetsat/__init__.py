"""CDCL SAT solving with bandit-chosen activity resets at restart boundaries."""
from .bandit import Arm, FixedProbabilityPolicy, SWUCBPolicy, ThompsonPolicy
from .engine import RunStats, Solver, SolverConfig, luby, solve
from .formula import (
    Clause,
    DimacsParseError,
    Formula,
    Outcome,
    Status,
    brute_force_solve,
    evaluate,
    parse_dimacs,
    to_dimacs,
)

__all__ = [
    "Arm", "Clause", "DimacsParseError", "FixedProbabilityPolicy", "Formula", "Outcome",
    "RunStats", "SWUCBPolicy", "Solver", "SolverConfig", "Status", "ThompsonPolicy",
    "brute_force_solve", "evaluate", "luby", "parse_dimacs", "solve", "to_dimacs",
]
