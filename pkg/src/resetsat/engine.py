"""Baseline CDCL solver with a restart-boundary hook.

Internally a literal is encoded as ``2*v`` (positive) or ``2*v + 1``
(negative) so that negation is ``lit ^ 1``.  ``value[lit]`` is 1 when the
literal is true, -1 when false and 0 when unassigned.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from .activity import ActivityTable
from .formula import Clause, Formula, Outcome, Status, evaluate
from .reset import POLICY_NAMES, ActionKind, ResetController

TIME_CHECK_INTERVAL = 1024


@dataclass
class SolverConfig:
    policy: str = "baseline"
    reset_probability: float = 0.0
    decay: float = 0.8
    window: int = 30
    explore: float = 0.2
    partial_k: Optional[int] = None
    seed: int = 0
    max_conflicts: Optional[int] = None
    time_limit: Optional[float] = None
    luby_unit: int = 256
    var_decay: float = 0.95
    clause_decay: float = 0.999
    ema_decay: float = 0.8
    flip_success: bool = False
    learnt_limit: Optional[int] = None
    learnt_growth: float = 1.1
    check_invariants: bool = False
    record_trace: bool = False
    record_window_trace: bool = True

    def __post_init__(self):
        if self.policy not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if not 0.0 <= self.reset_probability <= 1.0:
            raise ValueError(f"reset probability must lie in [0, 1], got {self.reset_probability}")
        if not 0.0 < self.decay < 1.0:
            raise ValueError(f"decay must lie in (0, 1), got {self.decay}")
        if not 0.0 < self.ema_decay < 1.0:
            raise ValueError(f"EMA decay must lie in (0, 1), got {self.ema_decay}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if not self.explore > 0:
            raise ValueError(f"exploration constant must be > 0, got {self.explore}")
        if self.partial_k is not None and self.partial_k < 0:
            raise ValueError(f"partial_k must be >= 0, got {self.partial_k}")
        if self.luby_unit < 1:
            raise ValueError("luby_unit must be >= 1")

    @property
    def descriptor(self) -> str:
        """Short policy label such as ``fixed=0.2`` or ``thompson-decay``."""
        if self.policy == "fixed":
            base = f"fixed={self.reset_probability:g}"
        elif self.policy == "thompson-decay":
            base = "thompson-decay" if self.decay == 0.8 else f"thompson-decay(d={self.decay:g})"
        elif self.policy == "swucb" and (self.window, self.explore) != (30, 0.2):
            base = f"swucb(w={self.window},c={self.explore:g})"
        else:
            base = self.policy
        if self.partial_k:
            base += f"/k={self.partial_k}"
        return base


@dataclass
class RunStats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    restarts: int = 0
    resets: int = 0
    learned: int = 0
    deleted: int = 0
    reductions: int = 0
    elapsed: float = 0.0
    rw_glr_trace: list = field(default_factory=list)
    window_summary: dict = field(default_factory=dict)

    def counters(self) -> dict:
        d = asdict(self)
        d.pop("rw_glr_trace")
        d.pop("window_summary")
        d.pop("elapsed")
        return d


def luby(i: int) -> int:
    """i-th term (1-based) of 1, 1, 2, 1, 1, 2, 4, 1, ..."""
    if i < 1:
        raise ValueError("luby index starts at 1")
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


def clause_lbd(levels) -> int:
    """Number of distinct decision levels."""
    return len(set(levels))


def backjump_level(levels) -> int:
    """Second-highest distinct level, or 0 when only one level occurs."""
    distinct = sorted(set(levels))
    return distinct[-2] if len(distinct) > 1 else 0


def to_code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def to_dimacs(code: int) -> int:
    return -(code >> 1) if code & 1 else code >> 1


class _Clause:
    __slots__ = ("lits", "learnt", "lbd", "activity", "deleted")

    def __init__(self, lits: list[int], learnt: bool = False, lbd: int = 0):
        self.lits = lits
        self.learnt = learnt
        self.lbd = lbd
        self.activity = 0.0
        self.deleted = False

    def to_clause(self) -> Clause:
        return Clause(tuple(to_dimacs(c) for c in self.lits), self.learnt,
                      self.lbd if self.learnt else None)


class Solver:
    """One CDCL run over one formula.  Not reusable across formulas."""

    def __init__(self, formula: Formula, config: Optional[SolverConfig] = None):
        self.formula = formula
        self.config = config or SolverConfig()
        n = formula.num_vars
        self.num_vars = n
        self.value = [0] * (2 * n + 2)
        self.level = [0] * (n + 1)
        self.reason: list[Optional[_Clause]] = [None] * (n + 1)
        self.phase = [False] * (n + 1)
        self.seen = [False] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[_Clause]] = [[] for _ in range(2 * n + 2)]
        self.clauses: list[_Clause] = []
        self.learnts: list[_Clause] = []
        self.activity = ActivityTable(n, self.config.var_decay)
        self.cla_inc = 1.0
        self.stats = RunStats()
        self.controller = ResetController.from_config(self.config)
        self.tracker = self.controller.tracker
        if self.config.learnt_limit is not None:
            self.learnt_limit = float(self.config.learnt_limit)
        else:
            self.learnt_limit = float(max(2000, len(formula.clauses) // 3))
        self.trace: Optional[list] = [] if self.config.record_trace else None
        self.ok = True
        self._load()

    # -- setup -----------------------------------------------------------

    def _load(self) -> None:
        for c in self.formula.clauses:
            if not self.ok:
                return
            self.add_clause(list(c.literals))

    def add_clause(self, literals: list[int]) -> bool:
        """Add an original clause at level 0.  Returns False once the
        formula is known UNSAT."""
        assert self.decision_level == 0
        codes = []
        for lit in literals:
            code = to_code(lit)
            v = self.value[code]
            if v == 1:
                return True
            if v == 0 and code not in codes:
                codes.append(code)
        if not codes:
            self.ok = False
            return False
        if len(codes) == 1:
            self._enqueue(codes[0], None)
            if self.propagate() is not None:
                self.ok = False
            return self.ok
        c = _Clause(codes)
        self.clauses.append(c)
        self._attach(c)
        return True

    def _attach(self, c: _Clause) -> None:
        self.watches[c.lits[0]].append(c)
        self.watches[c.lits[1]].append(c)

    # -- trail -----------------------------------------------------------

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def _enqueue(self, code: int, reason: Optional[_Clause]) -> None:
        v = code >> 1
        self.value[code] = 1
        self.value[code ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def backtrack(self, level: int) -> None:
        if self.decision_level <= level:
            return
        value = self.value
        phase = self.phase
        reason = self.reason
        act = self.activity
        stop = self.trail_lim[level]
        trail = self.trail
        for i in range(len(trail) - 1, stop - 1, -1):
            code = trail[i]
            v = code >> 1
            value[code] = 0
            value[code ^ 1] = 0
            reason[v] = None
            phase[v] = not (code & 1)
            act.insert(v)
        del trail[stop:]
        del self.trail_lim[level:]
        self.qhead = len(trail)
        if len(act.heap) > 8 * self.num_vars + 64:
            act.rebuild(v for v in range(1, self.num_vars + 1) if value[2 * v] == 0)

    def is_free(self, var: int) -> bool:
        return self.value[2 * var] == 0

    def lit_value(self, lit: int) -> Optional[bool]:
        v = self.value[to_code(lit)]
        return None if v == 0 else v == 1

    def assume(self, lit: int) -> None:
        """Open a new decision level and assign ``lit`` (DIMACS)."""
        code = to_code(lit)
        if self.value[code] != 0:
            raise ValueError(f"literal {lit} already assigned")
        self.trail_lim.append(len(self.trail))
        self._enqueue(code, None)

    # -- propagation -----------------------------------------------------

    def propagate(self) -> Optional[_Clause]:
        """Unit propagation to fixpoint; returns a conflicting clause or None."""
        value = self.value
        watches = self.watches
        trail = self.trail
        level = self.level
        reason = self.reason
        dl = len(self.trail_lim)
        props = 0
        while self.qhead < len(trail):
            false_lit = trail[self.qhead] ^ 1
            self.qhead += 1
            props += 1
            ws = watches[false_lit]
            kept = []
            keep = kept.append
            watches[false_lit] = kept
            n = len(ws)
            i = 0
            while i < n:
                c = ws[i]
                i += 1
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0] = lits[1]
                    lits[1] = false_lit
                first = lits[0]
                if value[first] == 1:
                    keep(c)
                    continue
                for k in range(2, len(lits)):
                    other = lits[k]
                    if value[other] != -1:
                        lits[1] = other
                        lits[k] = false_lit
                        watches[other].append(c)
                        break
                else:
                    keep(c)
                    if value[first] == -1:
                        kept.extend(ws[i:])
                        self.qhead = len(trail)
                        self.stats.propagations += props
                        return c
                    value[first] = 1
                    value[first ^ 1] = -1
                    v = first >> 1
                    level[v] = dl
                    reason[v] = c
                    trail.append(first)
        self.stats.propagations += props
        return None

    # -- conflict analysis -----------------------------------------------

    def _analyze(self, confl: _Clause) -> tuple[list[int], int, int]:
        seen = self.seen
        level = self.level
        trail = self.trail
        reason = self.reason
        dl = len(self.trail_lim)
        learnt = [0]
        touched = []
        path = 0
        idx = len(trail) - 1
        p = -1
        c = confl
        while True:
            if c.learnt:
                self._bump_clause(c)
            lits = c.lits
            start = 0 if p == -1 else 1
            for j in range(start, len(lits)):
                q = lits[j]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            c = reason[v]
            seen[v] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        for v in touched:
            seen[v] = False

        act = self.activity
        value = self.value
        for v in touched:
            act.bump(v, value[2 * v] == 0)
        act.decay_increment()

        if len(learnt) == 1:
            bj = 0
        else:
            best = 1
            for j in range(2, len(learnt)):
                if level[learnt[j] >> 1] > level[learnt[best] >> 1]:
                    best = j
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bj = level[learnt[1] >> 1]
        lbd = clause_lbd([level[q >> 1] for q in learnt])
        if self.config.check_invariants:
            at_dl = sum(1 for q in learnt if level[q >> 1] == dl)
            assert at_dl == 1, f"learnt clause not asserting: {at_dl} literals at level {dl}"
        return learnt, bj, lbd

    def analyze_conflict(self, conflict: _Clause) -> tuple[Clause, int, int]:
        """First-UIP analysis.  Returns (learnt clause, backjump level, lbd)."""
        if self.decision_level == 0:
            raise ValueError("conflict at level 0: formula is UNSAT")
        learnt, bj, lbd = self._analyze(conflict)
        return Clause(tuple(to_dimacs(q) for q in learnt), True, lbd), bj, lbd

    def _bump_clause(self, c: _Clause) -> None:
        c.activity += self.cla_inc
        if c.activity > 1e20:
            for d in self.learnts:
                d.activity *= 1e-20
            self.cla_inc *= 1e-20

    def _learn(self, learnt: list[int], bj: int, lbd: int) -> None:
        self.backtrack(bj)
        self.stats.learned += 1
        self.tracker.window_learned += 1
        if len(learnt) == 1:
            self._enqueue(learnt[0], None)
        else:
            c = _Clause(learnt, True, lbd)
            self._bump_clause(c)
            self.learnts.append(c)
            self._attach(c)
            self._enqueue(learnt[0], c)
        self.cla_inc /= self.config.clause_decay

    # -- branching -------------------------------------------------------

    def pick_branch_variable(self) -> int:
        value = self.value
        return self.activity.pop_max(lambda v: value[2 * v] == 0)

    def decide(self) -> int:
        """Branch on the most active free variable using its saved phase.
        Returns the DIMACS literal assigned."""
        v = self.pick_branch_variable()
        if v == 0:
            raise ValueError("no unassigned variable left to decide")
        code = 2 * v if self.phase[v] else 2 * v + 1
        self.trail_lim.append(len(self.trail))
        self._enqueue(code, None)
        self.stats.decisions += 1
        self.tracker.window_decisions += 1
        if self.trace is not None:
            self.trace.append(("d", to_dimacs(code)))
        return to_dimacs(code)

    def bump_and_decay(self, variables) -> None:
        self.activity.bump_and_decay(variables, self.is_free)

    # -- clause database -------------------------------------------------

    def _locked(self, c: _Clause) -> bool:
        first = c.lits[0]
        return self.value[first] == 1 and self.reason[first >> 1] is c

    def reduce_db(self) -> int:
        """Delete the worse half of unprotected learnt clauses.  Clauses with
        lbd <= 2 and current reasons are protected.  Returns the number
        deleted."""
        keep = []
        candidates = []
        for c in self.learnts:
            if c.lbd <= 2 or self._locked(c):
                keep.append(c)
            else:
                candidates.append(c)
        candidates.sort(key=lambda c: (-c.lbd, c.activity))
        cut = len(candidates) // 2
        for c in candidates[:cut]:
            c.deleted = True
        if cut:
            self.watches = [[c for c in ws if not c.deleted] for ws in self.watches]
        keep.extend(candidates[cut:])
        self.learnts = keep
        self.stats.deleted += cut
        self.stats.reductions += 1
        self.learnt_limit *= self.config.learnt_growth
        return cut

    # -- main loop -------------------------------------------------------

    def _model(self) -> dict[int, bool]:
        return {v: self.value[2 * v] == 1 for v in range(1, self.num_vars + 1)}

    def solve(self) -> Outcome:
        start = time.perf_counter()
        status = self._search(start)
        self.stats.elapsed = time.perf_counter() - start
        self.stats.rw_glr_trace = [r.rw for r in self.tracker.trace]
        self.stats.window_summary = self.tracker.summary()
        if status is Status.SAT:
            model = self._model()
            if not evaluate(self.formula, model):
                raise AssertionError("solver produced a model that does not satisfy the formula")
            return Outcome(Status.SAT, model, self.stats)
        return Outcome(status, None, self.stats)

    def _search(self, start: float) -> Status:
        if not self.ok or self.formula.trivially_unsat:
            return Status.UNSAT
        cfg = self.config
        stats = self.stats
        max_conflicts = cfg.max_conflicts
        time_limit = cfg.time_limit
        restart_index = 1
        restart_at = luby(restart_index) * cfg.luby_unit
        since_restart = 0
        if self.propagate() is not None:
            return Status.UNSAT
        while True:
            confl = self.propagate()
            if confl is not None:
                stats.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return Status.UNSAT
                learnt, bj, lbd = self._analyze(confl)
                if self.trace is not None:
                    self.trace.append(("c", tuple(to_dimacs(q) for q in learnt)))
                self._learn(learnt, bj, lbd)
                if max_conflicts is not None and stats.conflicts >= max_conflicts:
                    return Status.INDETERMINATE
                if time_limit is not None and stats.conflicts % TIME_CHECK_INTERVAL == 0:
                    if time.perf_counter() - start >= time_limit:
                        return Status.INDETERMINATE
                continue

            if since_restart >= restart_at:
                since_restart = 0
                restart_index += 1
                restart_at = luby(restart_index) * cfg.luby_unit
                self._restart_boundary()
                continue

            if len(self.learnts) > self.learnt_limit:
                self.reduce_db()

            v = self.pick_branch_variable()
            if v == 0:
                return Status.SAT
            code = 2 * v if self.phase[v] else 2 * v + 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(code, None)
            stats.decisions += 1
            self.tracker.window_decisions += 1
            if self.trace is not None:
                self.trace.append(("d", to_dimacs(code)))

    def _restart_boundary(self) -> None:
        action = self.controller.on_restart_boundary(self)
        self.stats.restarts += 1
        if action.kind is not ActionKind.RESTART:
            self.stats.resets += 1
        if self.trace is not None:
            self.trace.append(("r", action.kind.value))


def solve(formula: Formula, config: Optional[SolverConfig] = None) -> Outcome:
    """Solve ``formula``; the outcome's ``stats`` is the run's RunStats."""
    return Solver(formula, config).solve()
