"""Slow, independent reference computations.

Nothing here is used on a hot path. Each function recomputes a quantity by
direct enumeration so the fast implementations can be checked against it.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product

from .core import schedule_cost

__all__ = [
    "max_footrule_bruteforce",
    "opt_bruteforce",
    "expected_walk_visits_bruteforce",
]


def max_footrule_bruteforce(m: int) -> int:
    """Max over all orderings of m items of the footrule distance to identity.

    The footrule between two orderings is invariant under relabeling, so
    maximizing against the identity covers every pair.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    best = 0
    for perm in permutations(range(m)):
        d = sum(abs(i - perm[i]) for i in range(m))
        if d > best:
            best = d
    return best


def opt_bruteforce(tasks, granularity: int, start_state: int = 0, free_start: bool = False) -> int:
    """Cheapest schedule cost in units, by enumerating all n^T schedules."""
    if not tasks:
        return 0
    n = len(tasks[0])
    best = None
    for schedule in product(range(n), repeat=len(tasks)):
        first = schedule[0] if free_start else start_state
        total, _, _ = schedule_cost(tasks, granularity, schedule, start_state=first)
        if best is None or total < best:
            best = total
    return best


def expected_walk_visits_bruteforce(m: int) -> Fraction:
    """Mean states visited by a priority walk over a random saturation order.

    Items 0..m-1 have priorities equal to their index. The walk starts at
    the highest-priority item; whenever its current item saturates it jumps
    to the highest-priority item that saturates later, until it sits on the
    item that saturates last. Averaged exactly over all m! saturation
    orders. The uniform-restart walk has the same visit law, which is why a
    single enumeration backs both checks.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    total = 0
    count = 0
    for order in permutations(range(m)):
        position = [0] * m
        for pos, item in enumerate(order):
            position[item] = pos
        current = m - 1
        visits = 1
        while True:
            pos = position[current]
            nxt = -1
            for item in range(m - 1, -1, -1):
                if position[item] > pos:
                    nxt = item
                    break
            if nxt < 0:
                break
            current = nxt
            visits += 1
        total += visits
        count += 1
    return Fraction(total, count)
