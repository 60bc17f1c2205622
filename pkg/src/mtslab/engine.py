"""Reference simulator.

Drives one scheduler over one task sequence, phase by phase, enforcing the
movement protocol and producing exact integer accounting. This is the
slow, obviously-correct counterpart to the batched kernels: it walks real
task streams step-indexed, materializes the full schedule (the state
occupied at every step), and recomputes costs from that schedule so the
numbers can be audited independently.

Runs always open in state 0. Randomized schedulers draw from the stream
seeded with trial_seed(seed, trial_index), the same derivation the batched
kernels use, so a single-trial engine run reproduces kernel trial 0 draw
for draw.

Event model per phase: the scheduler may move once when the phase opens
(charged to the opening phase), then processes until its current state
saturates at some step t, at which point it must pick a state that
saturates strictly later; that move is charged to the phase containing t.
Once every state is saturated the phase is over and the scheduler is
necessarily sitting in the last state to have saturated. Steps after the
last complete phase (the suffix) are simulated the same way against the
partial saturation picture, and their costs are reported separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import TaskSequence, decompose_phases
from .errors import ConfigurationError, ProtocolError
from .opt import opt_units
from .rng import RandomStream, trial_seed
from .schedulers import Scheduler, make_scheduler

__all__ = ["PhaseStats", "RunResult", "run_scheduler", "summarize"]


@dataclass
class PhaseStats:
    index: int
    start: int
    end: int
    transitions: int
    moves: int
    movement_units: int
    processing_units: int
    pst_error: int | float | None

    @property
    def cost_units(self) -> int:
        return self.movement_units + self.processing_units


@dataclass
class RunResult:
    scheduler: str
    seed: int
    trial_index: int
    n: int
    granularity: int
    phases: list = field(default_factory=list)
    suffix_start: int = 0
    suffix_transitions: int = 0
    suffix_moves: int = 0
    suffix_movement_units: int = 0
    suffix_processing_units: int = 0
    schedule: list = field(default_factory=list)
    conforming: bool = True

    @property
    def transitions_per_phase(self) -> list:
        return [p.transitions for p in self.phases]

    @property
    def total_transitions(self) -> int:
        return sum(p.transitions for p in self.phases) + self.suffix_transitions

    @property
    def total_moves(self) -> int:
        return sum(p.moves for p in self.phases) + self.suffix_moves

    @property
    def total_units(self) -> int:
        inside = sum(p.cost_units for p in self.phases)
        return inside + self.suffix_movement_units + self.suffix_processing_units


def _resolve(scheduler) -> Scheduler:
    if isinstance(scheduler, Scheduler):
        return scheduler
    return make_scheduler(scheduler)


def run_scheduler(seq: TaskSequence, scheduler, seed: int = 0, trial_index: int = 0) -> RunResult:
    """Simulate one scheduler over one sequence; exact integer accounting."""
    sched = _resolve(scheduler)
    n = seq.n
    threshold = seq.granularity
    total_steps = len(seq.tasks)

    if sched.needs_lv and seq.lv is None:
        raise ConfigurationError(
            f"scheduler {sched.name!r} needs next-request predictions and the input has none"
        )

    stream = RandomStream(trial_seed(seed, trial_index)) if sched.uses_rng else None
    sched.reset(n, threshold, stream)

    phases, suffix_start = decompose_phases(seq)
    pst_by_start = {}
    if seq.pst:
        pst_by_start = {block.phase_start: block.h for block in seq.pst}

    arr = seq.task_array()
    schedule = np.zeros(total_steps, dtype=np.int64)

    latest_lv = [0] * n
    lv_done = -1

    def advance_lv(upto: int) -> None:
        nonlocal lv_done
        if seq.lv is None:
            return
        while lv_done < upto:
            lv_done += 1
            row = seq.lv[lv_done]
            for s in range(n):
                if row[s] != 0:
                    latest_lv[s] = row[s]

    def check_target(target, allowed) -> int:
        if not isinstance(target, (int, np.integer)) or not 0 <= target < n:
            raise ProtocolError(f"scheduler {sched.name!r} chose invalid state {target!r}")
        if allowed is not None and target not in allowed:
            raise ProtocolError(
                f"scheduler {sched.name!r} moved into a saturated state ({int(target)})"
            )
        return int(target)

    result = RunResult(
        scheduler=sched.name,
        seed=seed,
        trial_index=trial_index,
        n=n,
        granularity=threshold,
        suffix_start=suffix_start,
        conforming=sched.conforming,
    )

    cur = 0
    seg_entry = 0

    def open_segment_move(target: int, boundary: int) -> None:
        # The move takes effect before step `boundary` is processed.
        nonlocal cur, seg_entry
        if boundary > seg_entry:
            schedule[seg_entry:boundary] = cur
        cur = target
        seg_entry = boundary

    for phase in phases:
        h = pst_by_start.get(phase.start)
        if sched.needs_pst and h is None:
            raise ConfigurationError(
                f"scheduler {sched.name!r} needs a prediction block for the phase "
                f"starting at step {phase.start} and the input has none"
            )
        transitions = 0
        moves = 0
        target, count_even_if_stay = sched.phase_start(cur, h)
        if target is not None:
            target = check_target(target, None)
            if target != cur:
                open_segment_move(target, phase.start)
                transitions += 1
                moves += 1
            elif count_even_if_stay:
                transitions += 1
        elif count_even_if_stay:
            transitions += 1

        while True:
            tau = phase.sat_step[cur]
            unsat = [s for s in range(n) if phase.sat_step[s] > tau]
            if not unsat or not sched.conforming:
                break
            advance_lv(tau)
            target = sched.on_saturation(cur, unsat, tau, h, latest_lv)
            target = check_target(target, set(unsat))
            open_segment_move(target, tau + 1)
            transitions += 1
            moves += 1

        if h is None:
            pst_err = None
        else:
            pst_err = 0
            for s in range(n):
                pst_err += abs(h[s] - phase.sat_step[s])
        result.phases.append(
            PhaseStats(
                index=phase.index,
                start=phase.start,
                end=phase.end,
                transitions=transitions,
                moves=moves,
                movement_units=moves * threshold,
                processing_units=0,
                pst_error=pst_err,
            )
        )

    if suffix_start < total_steps:
        tail = arr[suffix_start:]
        cum = np.cumsum(tail, axis=0)
        sat_sfx: list = [None] * n
        for s in range(n):
            idx = int(np.searchsorted(cum[:, s], threshold, side="left"))
            if idx < len(tail):
                sat_sfx[s] = suffix_start + idx
        h = pst_by_start.get(suffix_start)
        if sched.needs_pst and h is None:
            raise ConfigurationError(
                f"scheduler {sched.name!r} cannot run into the incomplete trailing "
                f"phase at step {suffix_start}: no prediction block covers it"
            )
        target, count_even_if_stay = sched.phase_start(cur, h)
        if target is not None:
            target = check_target(target, None)
            if target != cur:
                open_segment_move(target, suffix_start)
                result.suffix_transitions += 1
                result.suffix_moves += 1
            elif count_even_if_stay:
                result.suffix_transitions += 1
        elif count_even_if_stay:
            result.suffix_transitions += 1

        while sched.conforming:
            tau = sat_sfx[cur]
            if tau is None:
                break
            unsat = [s for s in range(n) if sat_sfx[s] is None or sat_sfx[s] > tau]
            if not unsat:
                break
            advance_lv(tau)
            target = sched.on_saturation(cur, unsat, tau, h, latest_lv)
            target = check_target(target, set(unsat))
            open_segment_move(target, tau + 1)
            result.suffix_transitions += 1
            result.suffix_moves += 1
        result.suffix_movement_units = result.suffix_moves * threshold

    if total_steps > seg_entry:
        schedule[seg_entry:] = cur
    result.schedule = schedule.tolist()

    if total_steps:
        per_step = arr[np.arange(total_steps), schedule]
        for stats in result.phases:
            stats.processing_units = int(per_step[stats.start : stats.end + 1].sum())
        if suffix_start < total_steps:
            result.suffix_processing_units = int(per_step[suffix_start:].sum())
    return result


def summarize(seq: TaskSequence, result: RunResult, include_opt: bool = True) -> dict:
    """Report dict for one run: per-phase rows, totals, optimum, ratio.

    The per-phase optimum lets the comparison schedule open the phase in
    any state for free; the whole-sequence optimum is pinned to the same
    start state as the run. Both are exact. The cost ratio is the exact
    quotient rounded half-up to six decimal places.
    """
    from .analysis import round_ratio_half_up

    report: dict = {
        "scheduler": result.scheduler,
        "seed": result.seed,
        "trial_index": result.trial_index,
        "n": result.n,
        "granularity": result.granularity,
        "steps": len(seq.tasks),
        "complete_phases": len(result.phases),
        "suffix_steps": len(seq.tasks) - result.suffix_start,
        "total_units": result.total_units,
        "total_transitions": result.total_transitions,
        "total_moves": result.total_moves,
        "phases": [],
    }
    arr = seq.task_array()
    for stats in result.phases:
        row = {
            "index": stats.index,
            "start": stats.start,
            "end": stats.end,
            "transitions": stats.transitions,
            "moves": stats.moves,
            "movement_units": stats.movement_units,
            "processing_units": stats.processing_units,
            "cost_units": stats.cost_units,
            "pst_error": stats.pst_error,
        }
        if include_opt:
            row["opt_units"] = opt_units(
                arr[stats.start : stats.end + 1], seq.granularity, free_start=True
            )
        report["phases"].append(row)
    if result.suffix_start < len(seq.tasks):
        report["suffix"] = {
            "start": result.suffix_start,
            "transitions": result.suffix_transitions,
            "moves": result.suffix_moves,
            "movement_units": result.suffix_movement_units,
            "processing_units": result.suffix_processing_units,
        }
    if include_opt:
        opt_total = opt_units(arr, seq.granularity, start_state=0)
        report["opt_units"] = opt_total
        report["cost_ratio"] = round_ratio_half_up(result.total_units, opt_total)
    return report
