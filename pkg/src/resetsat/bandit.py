"""Two-arm bandit policies deciding between a restart and a reset.

All stochastic policies draw from a caller-supplied
:class:`numpy.random.Generator`, so a run is a deterministic function of the
seed and the reward history.
"""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class Arm(enum.IntEnum):
    RESTART = 0
    RESET = 1


def _check_shape(alpha: float, beta_param: float) -> None:
    if not (alpha > 0 and beta_param > 0):
        raise ValueError(f"beta parameters must be positive, got ({alpha}, {beta_param})")


def beta_mean(alpha: float, beta_param: float) -> float:
    _check_shape(alpha, beta_param)
    return alpha / (alpha + beta_param)


def beta_variance(alpha: float, beta_param: float) -> float:
    _check_shape(alpha, beta_param)
    s = alpha + beta_param
    return alpha * beta_param / (s * s * (s + 1.0))


def sample_beta(alpha: float, beta_param: float, rng: np.random.Generator) -> float:
    """One Beta(alpha, beta_param) variate as X / (X + Y) with
    X ~ Gamma(alpha), Y ~ Gamma(beta_param)."""
    _check_shape(alpha, beta_param)
    x = rng.standard_gamma(alpha)
    y = rng.standard_gamma(beta_param)
    if x + y == 0.0:
        # both gammas underflowed (tiny shapes); fall back on the mean
        return alpha / (alpha + beta_param)
    return x / (x + y)


class BaselinePolicy:
    """Never resets and never touches the rng."""

    name = "baseline"

    def select(self, rng: np.random.Generator) -> Arm:
        return Arm.RESTART

    def credit(self, arm: Arm, success: bool) -> None:
        pass


class FixedProbabilityPolicy:
    name = "fixed"

    def __init__(self, p: float):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"reset probability must lie in [0, 1], got {p}")
        self.p = float(p)

    def select(self, rng: np.random.Generator) -> Arm:
        return Arm.RESET if rng.random() < self.p else Arm.RESTART

    def credit(self, arm: Arm, success: bool) -> None:
        pass


@dataclass
class BetaArm:
    alpha: float = 1.0
    beta_param: float = 1.0


class ThompsonPolicy:
    """Thompson sampling over beta posteriors, optionally with decayed
    shape parameters.

    With decay ``d`` a credited arm's parameters are both multiplied by
    ``d`` before the success (alpha) or failure (beta) count gets its +1,
    which caps them at ``1/(1-d)`` plus the initial value's residue.  The
    arm that was not credited is left alone.
    """

    def __init__(self, decay: Optional[float] = None):
        if decay is not None and not 0.0 < decay < 1.0:
            raise ValueError(f"decay must lie in (0, 1), got {decay}")
        self.decay = decay
        self.arms = {Arm.RESTART: BetaArm(), Arm.RESET: BetaArm()}

    @property
    def name(self) -> str:
        return "thompson-decay" if self.decay_enabled else "thompson"

    @property
    def decay_enabled(self) -> bool:
        return self.decay is not None

    def sample(self, rng: np.random.Generator) -> tuple[float, float]:
        r = self.arms[Arm.RESTART]
        s = self.arms[Arm.RESET]
        return (sample_beta(r.alpha, r.beta_param, rng),
                sample_beta(s.alpha, s.beta_param, rng))

    def select(self, rng: np.random.Generator) -> Arm:
        restart_draw, reset_draw = self.sample(rng)
        return pick_larger(restart_draw, reset_draw)

    def credit(self, arm: Arm, success: bool) -> None:
        a = self.arms[Arm(arm)]
        if self.decay is not None:
            a.alpha *= self.decay
            a.beta_param *= self.decay
        if success:
            a.alpha += 1.0
        else:
            a.beta_param += 1.0


def pick_larger(restart_value: float, reset_value: float) -> Arm:
    """Arm with the strictly larger value; ties go to RESTART."""
    return Arm.RESET if reset_value > restart_value else Arm.RESTART


class SWUCBPolicy:
    """UCB1 evaluated over the ``window`` most recent (arm, reward) pairs.

    ``t`` inside the log term is the number of selections, capped at the
    window size.
    """

    name = "swucb"

    def __init__(self, window: int = 30, explore: float = 0.2):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        if not explore > 0:
            raise ValueError(f"exploration constant must be > 0, got {explore}")
        self.window_size = int(window)
        self.explore = float(explore)
        self.history: deque[tuple[Arm, float]] = deque()
        self.t = 0

    def ucb_values(self) -> dict[Arm, float]:
        """Windowed UCB per arm; ``inf`` for an arm absent from the window."""
        totals = {Arm.RESTART: 0.0, Arm.RESET: 0.0}
        counts = {Arm.RESTART: 0, Arm.RESET: 0}
        for arm, reward in self.history:
            totals[arm] += reward
            counts[arm] += 1
        t = min(self.t, self.window_size)
        out = {}
        for arm in (Arm.RESTART, Arm.RESET):
            n = counts[arm]
            if n == 0:
                out[arm] = math.inf
            else:
                out[arm] = totals[arm] / n + self.explore * math.sqrt(math.log(t) / n)
        return out

    def select(self, rng: Optional[np.random.Generator] = None) -> Arm:
        values = self.ucb_values()
        return pick_larger(values[Arm.RESTART], values[Arm.RESET])

    def record(self, arm: Arm, reward: float) -> None:
        reward = min(1.0, max(0.0, float(reward)))
        self.history.append((Arm(arm), reward))
        if len(self.history) > self.window_size:
            self.history.popleft()
        self.t += 1

    def credit(self, arm: Arm, success: bool) -> None:
        self.record(arm, 1.0 if success else 0.0)


@dataclass
class SimulationTrace:
    choices: np.ndarray
    rewards: np.ndarray
    best_arm: np.ndarray

    @property
    def cumulative_reward(self) -> float:
        return float(self.rewards.sum())

    def best_fraction(self, start: int, stop: int) -> float:
        sl = slice(start, stop)
        return float(np.mean(self.choices[sl] == self.best_arm[sl]))

    def recovery_steps(self, switch_at: int, threshold: float = 0.8, window: int = 50) -> Optional[int]:
        """Steps after ``switch_at`` until the trailing ``window``-step share
        of best-arm choices first reaches ``threshold``; None if never."""
        hit = (self.choices == self.best_arm).astype(np.int64)
        csum = np.concatenate([[0], np.cumsum(hit)])
        for end in range(switch_at + window, len(hit) + 1):
            if (csum[end] - csum[end - window]) / window >= threshold:
                return end - switch_at
        return None


def simulate_bernoulli_env(policy, arm_means: Sequence[float], horizon: int,
                           rng: np.random.Generator,
                           switch_at: Optional[int] = None,
                           switched_means: Optional[Sequence[float]] = None) -> SimulationTrace:
    """Run ``policy`` against two Bernoulli arms for ``horizon`` steps.

    If ``switch_at`` is given the arm means become ``switched_means``
    (default: the original means swapped) from that step on.
    """
    means = np.asarray(arm_means, dtype=float)
    if means.shape != (2,) or np.any((means < 0) | (means > 1)):
        raise ValueError("arm_means must be two probabilities")
    after = means[::-1].copy() if switched_means is None else np.asarray(switched_means, dtype=float)

    choices = np.empty(horizon, dtype=np.int64)
    rewards = np.empty(horizon, dtype=float)
    best = np.empty(horizon, dtype=np.int64)
    for step in range(horizon):
        current = after if switch_at is not None and step >= switch_at else means
        arm = policy.select(rng)
        success = bool(rng.random() < current[arm])
        policy.credit(arm, success)
        choices[step] = arm
        rewards[step] = float(success)
        best[step] = int(np.argmax(current))
    return SimulationTrace(choices, rewards, best)
