"""Restart-boundary orchestration: reward bookkeeping, policy crediting,
and the activity resets themselves."""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

import numpy as np

from .activity import ActivityTable
from .bandit import Arm, BaselinePolicy, FixedProbabilityPolicy, SWUCBPolicy, ThompsonPolicy

if TYPE_CHECKING:
    from .engine import Solver, SolverConfig


POLICY_NAMES = ("baseline", "fixed", "thompson", "thompson-decay", "swucb")


def rw_glr(window_learned: int, window_decisions: int) -> float:
    """Learned clauses per decision over one restart window (0 when the
    window made no decisions)."""
    if window_decisions <= 0:
        return 0.0
    return window_learned / window_decisions


def classify(rw: float, ema: float, flip: bool = False) -> bool:
    """Success iff the window beat the running average; ``flip`` inverts
    the comparison (success iff ``ema > rw``)."""
    return ema > rw if flip else rw > ema


@dataclass
class WindowRecord:
    window: int
    arm: Optional[Arm]
    rw: float
    ema: float
    success: Optional[bool]
    next_arm: Arm


@dataclass
class RewardTracker:
    lam: float = 0.8
    window_decisions: int = 0
    window_learned: int = 0
    ema: float = 0.0
    windows_seen: int = 0
    pending_arm: Optional[Arm] = None
    trace: list[WindowRecord] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"EMA decay must lie in (0, 1), got {self.lam}")

    def update_ema(self, value: float) -> float:
        if self.windows_seen == 0:
            self.ema = value
        else:
            self.ema = self.lam * self.ema + (1.0 - self.lam) * value
        self.windows_seen += 1
        return self.ema

    def reset_window(self) -> None:
        self.window_decisions = 0
        self.window_learned = 0

    def summary(self) -> dict:
        rws = [r.rw for r in self.trace]
        credited = [r for r in self.trace if r.success is not None]
        return {
            "windows": len(self.trace),
            "rw_glr_mean": float(np.mean(rws)) if rws else 0.0,
            "rw_glr_min": min(rws) if rws else 0.0,
            "rw_glr_max": max(rws) if rws else 0.0,
            "final_ema": self.ema,
            "credits": len(credited),
            "successes": sum(1 for r in credited if r.success),
            "reset_pulls": sum(1 for r in self.trace if r.next_arm is Arm.RESET),
        }

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["window", "arm", "rw_glr", "ema", "success", "next_arm"])
        for r in self.trace:
            w.writerow([r.window,
                        "" if r.arm is None else r.arm.name.lower(),
                        f"{r.rw:.6f}", f"{r.ema:.6f}",
                        "" if r.success is None else int(r.success),
                        r.next_arm.name.lower()])
        return buf.getvalue()


class ActionKind(enum.Enum):
    RESTART = "restart"
    FULL_RESET = "full_reset"
    PARTIAL_RESET = "partial_reset"


@dataclass(frozen=True)
class ResetAction:
    kind: ActionKind
    k: Optional[int] = None

    @classmethod
    def for_reset(cls, partial_k: Optional[int], num_vars: int) -> "ResetAction":
        if partial_k is None or partial_k == 0:
            return cls(ActionKind.FULL_RESET)
        if partial_k < 0:
            raise ValueError(f"partial_k must be >= 0, got {partial_k}")
        if partial_k >= num_vars:
            # every variable keeps its rank: nothing to randomize
            return cls(ActionKind.RESTART)
        return cls(ActionKind.PARTIAL_RESET, partial_k)


RESTART = ResetAction(ActionKind.RESTART)


def full_reset(table: ActivityTable, rng: np.random.Generator) -> None:
    """Give every variable an independent U[0,1) activity and reset the
    bump increment.  Assumes the trail is empty."""
    draws = rng.random(table.num_vars)
    act = table.activity
    for v in range(1, table.num_vars + 1):
        act[v] = float(draws[v - 1])
    table.inc = 1.0
    table.rebuild()


def partial_reset(table: ActivityTable, k: int, rng: np.random.Generator) -> None:
    """Randomize activities but keep the current top ``k`` variables on
    top, in their current order.

    The kept variables get ``1 + (k - j) * 0.5 / k`` for rank ``j`` in
    1..k, which sits above every U[0,1) draw.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = table.num_vars
    if k >= n:
        # whole order preserved; randomization would be a no-op
        return
    top = table.order()[:k]
    full_reset(table, rng)
    eps = 0.5 / k
    act = table.activity
    for rank, v in enumerate(top, start=1):
        act[v] = 1.0 + (k - rank) * eps
    table.rebuild()


def make_policy(config: "SolverConfig"):
    kind = config.policy
    if kind == "baseline":
        return BaselinePolicy()
    if kind == "fixed":
        return FixedProbabilityPolicy(config.reset_probability)
    if kind == "thompson":
        return ThompsonPolicy(decay=None)
    if kind == "thompson-decay":
        return ThompsonPolicy(decay=config.decay)
    if kind == "swucb":
        return SWUCBPolicy(window=config.window, explore=config.explore)
    raise ValueError(f"unknown policy {kind!r}; expected one of {POLICY_NAMES}")


class ResetController:
    """Runs at every restart boundary of one solver instance."""

    def __init__(self, policy, tracker: RewardTracker, policy_rng: np.random.Generator,
                 reset_rng: np.random.Generator, partial_k: Optional[int] = None,
                 flip_success: bool = False, record_trace: bool = True):
        self.policy = policy
        self.tracker = tracker
        self.policy_rng = policy_rng
        self.reset_rng = reset_rng
        self.partial_k = partial_k
        self.flip_success = flip_success
        self.record_trace = record_trace
        self.credit_events = 0

    @classmethod
    def from_config(cls, config: "SolverConfig") -> "ResetController":
        policy_seq, reset_seq = np.random.SeedSequence(config.seed).spawn(2)
        return cls(make_policy(config), RewardTracker(lam=config.ema_decay),
                   np.random.default_rng(policy_seq), np.random.default_rng(reset_seq),
                   partial_k=config.partial_k, flip_success=config.flip_success,
                   record_trace=config.record_window_trace)

    def on_restart_boundary(self, solver: "Solver") -> ResetAction:
        tr = self.tracker
        rw = rw_glr(tr.window_learned, tr.window_decisions)
        credited = tr.pending_arm
        success = None
        if credited is not None:
            success = classify(rw, tr.ema, self.flip_success)
            self.policy.credit(credited, success)
            self.credit_events += 1
        tr.update_ema(rw)

        solver.backtrack(0)

        arm = self.policy.select(self.policy_rng)
        tr.pending_arm = arm
        action = RESTART
        if arm is Arm.RESET:
            action = ResetAction.for_reset(self.partial_k, solver.num_vars)
        self.execute(action, solver.activity)

        if self.record_trace:
            tr.trace.append(WindowRecord(tr.windows_seen, credited, rw, tr.ema, success, arm))
        tr.reset_window()
        return action

    def execute(self, action: ResetAction, table: ActivityTable) -> None:
        if action.kind is ActionKind.FULL_RESET:
            full_reset(table, self.reset_rng)
        elif action.kind is ActionKind.PARTIAL_RESET:
            partial_reset(table, action.k, self.reset_rng)
