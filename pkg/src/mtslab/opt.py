"""Exact offline optimum.

Dynamic program over (step, state): the best cost of having processed
steps 0..t while sitting in state s is the step's task entry plus the
cheaper of staying (best for s at t-1) or jumping in from the best state
at t-1 at one unit of movement. ``opt_units`` returns just the value and
dispatches to the kernel backend; ``opt_schedule`` additionally backtracks
one witness schedule, preferring to stay and breaking remaining ties
toward the lowest state index, so witnesses are deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .kernels import dp_opt_units

__all__ = ["opt_units", "opt_schedule"]


def opt_units(tasks, granularity: int, start_state: int = 0, free_start: bool = False) -> int:
    return dp_opt_units(tasks, granularity, start_state=start_state, free_start=free_start)


def opt_schedule(tasks, granularity: int, start_state: int = 0, free_start: bool = False):
    """(cost_units, schedule) for one optimal schedule."""
    steps = len(tasks)
    if steps == 0:
        return 0, []
    n = len(tasks[0])
    if not free_start and not 0 <= start_state < n:
        raise ConfigurationError("start_state out of range")
    big = 1 << 60

    best = np.empty((steps, n), dtype=np.int64)
    prev = np.full(n, big, dtype=np.int64)
    if free_start:
        prev[:] = 0
    else:
        prev[start_state] = 0
    for t in range(steps):
        mn = int(prev.min())
        for s in range(n):
            stay = int(prev[s])
            jump = mn + granularity
            best[t, s] = min(stay, jump) + tasks[t][s]
        prev = best[t].copy()

    cost = int(best[steps - 1].min())
    state = int(np.argmin(best[steps - 1]))
    schedule = [0] * steps
    schedule[steps - 1] = state
    for t in range(steps - 1, 0, -1):
        here = best[t, schedule[t]] - tasks[t][schedule[t]]
        candidates = []
        for p in range(n):
            charge = 0 if p == schedule[t] else granularity
            if best[t - 1, p] + charge == here:
                candidates.append(p)
        stay = schedule[t]
        schedule[t - 1] = stay if stay in candidates else min(candidates)
    return cost, schedule
