"""EVSIDS variable activities with a lazily maintained max-heap.

The heap holds ``(-activity, var)`` entries, so ties pop the lowest
variable index first.  Entries go stale when a variable is bumped or
assigned; :meth:`ActivityTable.pop_max` skips them.  Every unassigned
variable always has at least one entry matching its current activity.
"""
from __future__ import annotations

import heapq
from typing import Callable, Iterable

RESCALE_LIMIT = 1e100
RESCALE_FACTOR = 1e-100


class ActivityTable:
    def __init__(self, num_vars: int, decay: float = 0.95):
        if not 0.0 < decay < 1.0:
            raise ValueError(f"activity decay must lie in (0, 1), got {decay}")
        self.num_vars = num_vars
        self.decay = decay
        self.inc = 1.0
        # index 0 unused
        self.activity = [0.0] * (num_vars + 1)
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(1, num_vars + 1)]
        heapq.heapify(self.heap)

    def bump(self, var: int, is_free: bool) -> None:
        act = self.activity
        act[var] += self.inc
        if act[var] > RESCALE_LIMIT:
            self.rescale()
        elif is_free:
            heapq.heappush(self.heap, (-act[var], var))

    def decay_increment(self) -> None:
        self.inc /= self.decay
        if self.inc > RESCALE_LIMIT:
            self.rescale()

    def bump_and_decay(self, variables: Iterable[int], is_free: Callable[[int], bool] = lambda v: True) -> None:
        for v in variables:
            self.bump(v, is_free(v))
        self.decay_increment()

    def rescale(self) -> None:
        act = self.activity
        for v in range(1, self.num_vars + 1):
            act[v] *= RESCALE_FACTOR
        self.inc *= RESCALE_FACTOR
        self.rebuild()

    def rebuild(self, free: Iterable[int] = None) -> None:
        """Rebuild the heap from ``free`` (default: every variable)."""
        act = self.activity
        if free is None:
            free = range(1, self.num_vars + 1)
        self.heap = [(-act[v], v) for v in free]
        heapq.heapify(self.heap)

    def insert(self, var: int) -> None:
        heapq.heappush(self.heap, (-self.activity[var], var))

    def pop_max(self, is_free: Callable[[int], bool]) -> int:
        """Remove and return the free variable of highest activity, or 0
        when none is left."""
        heap = self.heap
        act = self.activity
        while heap:
            neg, v = heapq.heappop(heap)
            if -neg == act[v] and is_free(v):
                return v
        return 0

    def order(self) -> list[int]:
        """All variables, best first (activity desc, index asc)."""
        act = self.activity
        return sorted(range(1, self.num_vars + 1), key=lambda v: (-act[v], v))
