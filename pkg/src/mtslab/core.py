"""Task-sequence model: exact fixed-point costs, saturation phases, schedules.

Everything in this module is integer arithmetic. A problem instance has n
states and a granularity g. Task entries are stored in units of 1/g, a state
change costs exactly g units (one cost unit of 1), and a state is saturated
once it has accumulated at least g units of processing demand since the
current phase opened. A phase closes on the step at which the last state
saturates; the next step opens a new phase with all counters reset. Steps
and states are 0-indexed throughout.

The on-disk format is a single JSON object::

    {
      "version": 1,
      "n": <int>,
      "granularity": <int>,
      "tasks": [[<units>, ...], ...],
      "pst": [{"phase_start": <step>, "h": [<number>, ...]}, ...],
      "lv": {"next_request": [[<step|-1|0>, ...], ...]}
    }

``pst`` (optional) carries one block per phase: ``h[s]`` is the step at
which state s is predicted to saturate in the phase opening at
``phase_start``. ``lv`` (optional) carries one row per step: a nonzero
entry ``next_request[t][s]`` is a prediction, issued at step t, of the next
step at which state s receives demand; -1 means "never again" and 0 means
"no prediction issued here". Files are written canonically (sorted keys, no
whitespace) so that identical content is identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MalformedInputError

__all__ = [
    "SCHEMA_VERSION",
    "PhasePrediction",
    "TaskSequence",
    "Phase",
    "decompose_phases",
    "schedule_cost",
    "unit_task",
    "requested_state",
    "pst_error_per_phase",
    "lv_loss",
    "to_json_dict",
    "from_json_dict",
    "save_task_sequence",
    "load_task_sequence",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PhasePrediction:
    """Predicted saturation step per state for the phase at phase_start."""

    phase_start: int
    h: tuple

    def argmax(self) -> int:
        """State with the latest predicted saturation (ties: lowest index)."""
        best = 0
        for s in range(1, len(self.h)):
            if self.h[s] > self.h[best]:
                best = s
        return best


@dataclass
class TaskSequence:
    n: int
    granularity: int
    tasks: list
    pst: list | None = None
    lv: list | None = None

    def __len__(self) -> int:
        return len(self.tasks)

    def task_array(self) -> np.ndarray:
        return np.asarray(self.tasks, dtype=np.int64).reshape(len(self.tasks), self.n)


@dataclass(frozen=True)
class Phase:
    """One complete saturation phase of a task sequence."""

    index: int
    start: int
    end: int
    sat_step: tuple
    order: tuple

    @property
    def last_saturated(self) -> int:
        return self.order[-1]


def decompose_phases(seq: TaskSequence):
    """Split a sequence into complete phases plus an incomplete suffix.

    Returns (phases, suffix_start) where suffix_start is the first step not
    covered by a complete phase (== len(tasks) when there is none). The
    split depends only on the tasks, never on any scheduler. Within a
    phase, sat_step[s] is the first step at which state s reaches the
    saturation threshold and ``order`` lists states by (sat_step, index).
    """
    arr = seq.task_array()
    total, n = arr.shape
    threshold = seq.granularity
    phases: list[Phase] = []
    start = 0
    while start < total:
        cum = np.cumsum(arr[start:], axis=0)
        if int(cum[-1].min()) < threshold:
            break
        sat = tuple(
            start + int(np.searchsorted(cum[:, s], threshold, side="left"))
            for s in range(n)
        )
        end = max(sat)
        order = tuple(sorted(range(n), key=lambda s: (sat[s], s)))
        phases.append(
            Phase(index=len(phases), start=start, end=end, sat_step=sat, order=order)
        )
        start = end + 1
    return phases, start


def schedule_cost(tasks, granularity: int, schedule: Sequence[int], start_state: int = 0):
    """Cost of following ``schedule`` (state occupied at each step).

    Returns (total_units, transition_units, processing_units). The state at
    step t is schedule[t]; a change relative to the previous step (or to
    start_state before step 0) costs ``granularity`` units on top of the
    occupied state's task entry. This is the independent recomputation used
    to audit engine accounting, so it stays a plain loop over Python ints.
    """
    if len(schedule) != len(tasks):
        raise ValueError("schedule must assign a state to every step")
    transition_units = 0
    processing_units = 0
    prev = start_state
    for task, state in zip(tasks, schedule):
        if state != prev:
            transition_units += granularity
        processing_units += task[state]
        prev = state
    return transition_units + processing_units, transition_units, processing_units


def unit_task(n: int, state: int, units: int = 1) -> list:
    row = [0] * n
    row[state] = units
    return row


def requested_state(task) -> int | None:
    """Index of the single positive entry of a task, if there is exactly one."""
    found = None
    for s, v in enumerate(task):
        if v > 0:
            if found is not None:
                return None
            found = s
    return found


def pst_error_per_phase(seq: TaskSequence):
    """Per-phase prediction error: sum over states of |h[s] - sat_step[s]|.

    Only phases that have a matching prediction block contribute; the list
    aligns with the complete phases and holds None where no block matches.
    """
    phases, _ = decompose_phases(seq)
    by_start = {}
    if seq.pst:
        by_start = {block.phase_start: block for block in seq.pst}
    errors = []
    for phase in phases:
        block = by_start.get(phase.start)
        if block is None:
            errors.append(None)
            continue
        err = 0
        for s in range(seq.n):
            err += abs(block.h[s] - phase.sat_step[s])
        errors.append(err)
    return errors


def lv_loss(seq: TaskSequence) -> int:
    """Total absolute error of the next-request predictions.

    For every nonzero prediction, the true next step at which the state
    receives demand is compared with the predicted one; "never again" (-1)
    is scored as one step past the end of the sequence on both sides, so a
    correct "never" costs nothing.
    """
    if seq.lv is None:
        return 0
    total_steps = len(seq.tasks)
    horizon = total_steps

    next_request = [[horizon] * seq.n for _ in range(total_steps)]
    upcoming = [horizon] * seq.n
    for t in range(total_steps - 1, -1, -1):
        next_request[t] = list(upcoming)
        for s in range(seq.n):
            if seq.tasks[t][s] > 0:
                upcoming[s] = t

    loss = 0
    for t, row in enumerate(seq.lv):
        for s, predicted in enumerate(row):
            if predicted == 0:
                continue
            claim = horizon if predicted == -1 else predicted
            loss += abs(claim - next_request[t][s])
    return loss


# ---- serialization ----

def to_json_dict(seq: TaskSequence) -> dict:
    payload: dict = {
        "version": SCHEMA_VERSION,
        "n": seq.n,
        "granularity": seq.granularity,
        "tasks": [list(row) for row in seq.tasks],
    }
    if seq.pst is not None:
        payload["pst"] = [
            {"phase_start": block.phase_start, "h": list(block.h)}
            for block in seq.pst
        ]
    if seq.lv is not None:
        payload["lv"] = {"next_request": [list(row) for row in seq.lv]}
    return payload


def _fail(message: str):
    raise MalformedInputError(message)


def _check_int(value, what: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"{what} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(f"{what} must be >= {minimum}, got {value}")
    return value


def from_json_dict(payload) -> TaskSequence:
    if not isinstance(payload, dict):
        _fail("top-level JSON value must be an object")
    version = payload.get("version")
    if version != SCHEMA_VERSION:
        _fail(f"unsupported version {version!r}, expected {SCHEMA_VERSION}")
    n = _check_int(payload.get("n"), "n", minimum=1)
    granularity = _check_int(payload.get("granularity"), "granularity", minimum=1)

    tasks_raw = payload.get("tasks")
    if not isinstance(tasks_raw, list):
        _fail("tasks must be a list of per-step unit vectors")
    tasks = []
    for t, row in enumerate(tasks_raw):
        if not isinstance(row, list) or len(row) != n:
            _fail(f"tasks[{t}] must be a list of {n} entries")
        tasks.append([_check_int(v, f"tasks[{t}][{s}]", minimum=0) for s, v in enumerate(row)])

    pst = None
    if "pst" in payload and payload["pst"] is not None:
        blocks_raw = payload["pst"]
        if not isinstance(blocks_raw, list):
            _fail("pst must be a list of phase blocks")
        pst = []
        previous_start = -1
        for i, block in enumerate(blocks_raw):
            if not isinstance(block, dict):
                _fail(f"pst[{i}] must be an object")
            phase_start = _check_int(block.get("phase_start"), f"pst[{i}].phase_start", minimum=0)
            if phase_start <= previous_start:
                _fail("pst blocks must have strictly increasing phase_start")
            if phase_start >= max(len(tasks), 1):
                _fail(f"pst[{i}].phase_start is past the end of the tasks")
            h = block.get("h")
            if not isinstance(h, list) or len(h) != n:
                _fail(f"pst[{i}].h must be a list of {n} numbers")
            for s, v in enumerate(h):
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    _fail(f"pst[{i}].h[{s}] must be a number")
            pst.append(PhasePrediction(phase_start=phase_start, h=tuple(h)))
            previous_start = phase_start

    lv = None
    if "lv" in payload and payload["lv"] is not None:
        lv_raw = payload["lv"]
        if not isinstance(lv_raw, dict) or "next_request" not in lv_raw:
            _fail("lv must be an object with a next_request table")
        rows_raw = lv_raw["next_request"]
        if not isinstance(rows_raw, list) or len(rows_raw) != len(tasks):
            _fail("lv.next_request must have one row per step")
        lv = []
        for t, row in enumerate(rows_raw):
            if not isinstance(row, list) or len(row) != n:
                _fail(f"lv.next_request[{t}] must be a list of {n} entries")
            lv.append(
                [_check_int(v, f"lv.next_request[{t}][{s}]", minimum=-1) for s, v in enumerate(row)]
            )

    return TaskSequence(n=n, granularity=granularity, tasks=tasks, pst=pst, lv=lv)


def save_task_sequence(seq: TaskSequence, path) -> None:
    data = json.dumps(to_json_dict(seq), sort_keys=True, separators=(",", ":"))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(data)
        fh.write("\n")


def load_task_sequence(path) -> TaskSequence:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"not valid JSON: {exc}") from exc
    return from_json_dict(payload)
