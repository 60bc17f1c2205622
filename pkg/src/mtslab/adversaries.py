"""Input generators.

Four families of task sequences, plus helpers for fabricating prediction
tables. Two families are closed-form streams written out directly; the
other two are interactive: they drive a live scheduler instance through
the exact protocol the engine uses and record a stream tailored to the
observed behavior, so replaying the file through the engine (same
scheduler, same seed) reproduces the interaction.

Shared geometry: a phase realizes a saturation order, one state per step.
Prediction blocks assign each state a predicted saturation step; the
per-phase prediction error is the footrule distance between the predicted
and the realized order. Cyclic relabeling pins the top predicted slot of
each phase to (carryover + 1) mod n, where the carryover is the state any
conforming scheduler necessarily occupies when the previous phase closes,
so a prediction-following scheduler's phase-opening move is always real.
"""

from __future__ import annotations

from .analysis import max_forcible_transitions
from .core import PhasePrediction, TaskSequence, decompose_phases
from .errors import ConfigurationError, ProtocolError
from .rng import RandomStream, trial_seed
from .schedulers import Scheduler, make_scheduler

__all__ = [
    "realize_saturation_order",
    "pinned_prediction_order",
    "reversal_sequence",
    "shuffled_tail_sequence",
    "forcing_sequence",
    "repeat_block_sequence",
    "random_unit_sequence",
    "noisy_pst",
    "FAMILY_NAMES",
    "INTERACTIVE_FAMILIES",
    "canonical_family",
    "build_family",
]


def realize_saturation_order(n: int, granularity: int, order) -> list:
    """Tasks (one per step) saturating the states of ``order`` in order.

    Step j hands the j-th target exactly the units it is missing
    (granularity - j, since it collected one unit in each earlier step),
    one unit to every state still waiting, and nothing to states already
    saturated. Every state therefore reaches the threshold exactly, one
    state per step, and the phase is n steps long. Needs granularity >= n
    so the closing spike stays positive.
    """
    if sorted(order) != list(range(n)):
        raise ConfigurationError("order must be a permutation of the states")
    if granularity < n:
        raise ConfigurationError("granularity must be >= n to realize an order")
    position = [0] * n
    for j, state in enumerate(order):
        position[state] = j
    tasks = []
    for j in range(n):
        row = [0] * n
        for state in range(n):
            pos = position[state]
            if pos == j:
                row[state] = granularity - j
            elif pos > j:
                row[state] = 1
        tasks.append(row)
    return tasks


def pinned_prediction_order(n: int, carryover: int) -> list:
    """Cyclic state order whose last (top predicted) slot avoids carryover."""
    head = (carryover + 1) % n
    delta = (head + 1) % n
    return [(j + delta) % n for j in range(n)]


def _prediction_block(offset: int, pred_state) -> PhasePrediction:
    h = [0] * len(pred_state)
    for j, state in enumerate(pred_state):
        h[state] = offset + j
    return PhasePrediction(phase_start=offset, h=tuple(h))


def _clamped_m(n: int, eta0: int) -> int:
    return min(max_forcible_transitions(eta0), n)


def reversal_sequence(n: int, granularity: int, eta0: int, phases: int) -> TaskSequence:
    """Worst case for a prediction-follower within an error budget.

    Each phase saturates the states in the predicted order except that the
    last m = min(max_forcible_transitions(eta0), n) slots run in reverse,
    which costs the predictions exactly max_footrule(m) <= eta0 of error
    and walks a prediction-following scheduler through all m slots: one
    opening move plus m - 1 forced moves, every phase.
    """
    _check_family_geometry(n, granularity, eta0, phases)
    m = _clamped_m(n, eta0)
    tasks: list = []
    pst: list = []
    carry = 0
    for _ in range(phases):
        offset = len(tasks)
        pred_state = pinned_prediction_order(n, carry)
        true_state = pred_state[: n - m] + pred_state[n - m :][::-1]
        tasks.extend(realize_saturation_order(n, granularity, true_state))
        pst.append(_prediction_block(offset, pred_state))
        carry = true_state[-1]
    return TaskSequence(n=n, granularity=granularity, tasks=tasks, pst=pst)


def shuffled_tail_sequence(n: int, granularity: int, tail_size: int, phases: int,
                           seed: int = 0) -> TaskSequence:
    """Random-order variant of the reversal family.

    The last m = min(tail_size, n) predicted slots saturate in a uniformly
    random order drawn from the stream seeded with trial_seed(seed, 0);
    the realized prediction error is therefore at most max_footrule(m).
    Under this distribution a prediction-follower visits H_m slots per
    phase in expectation.
    """
    if tail_size < 1:
        raise ConfigurationError("tail size must be >= 1")
    _check_family_geometry(n, granularity, 0, phases)
    m = min(tail_size, n)
    stream = RandomStream(trial_seed(seed, 0))
    tasks: list = []
    pst: list = []
    carry = 0
    for _ in range(phases):
        offset = len(tasks)
        pred_state = pinned_prediction_order(n, carry)
        tail = pred_state[n - m :]
        for i in range(m - 1, 0, -1):
            j = stream.randbelow(i + 1)
            tail[i], tail[j] = tail[j], tail[i]
        true_state = pred_state[: n - m] + tail
        tasks.extend(realize_saturation_order(n, granularity, true_state))
        pst.append(_prediction_block(offset, pred_state))
        carry = true_state[-1]
    return TaskSequence(n=n, granularity=granularity, tasks=tasks, pst=pst)


def _check_family_geometry(n: int, granularity: int, eta0: int, phases: int) -> None:
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    if eta0 < 0:
        raise ConfigurationError("eta0 must be >= 0")
    if phases < 1:
        raise ConfigurationError("phases must be >= 1")
    if granularity < n:
        raise ConfigurationError("granularity must be >= n for this family")


def _live_scheduler(scheduler: str | Scheduler, n: int, granularity: int,
                    seed: int, allow_pst: bool = True) -> Scheduler:
    sched = scheduler if isinstance(scheduler, Scheduler) else make_scheduler(scheduler)
    if not sched.conforming:
        raise ConfigurationError(
            f"scheduler {sched.name!r} is not conforming and cannot be steered"
        )
    if sched.needs_pst and not allow_pst:
        raise ConfigurationError(
            f"scheduler {sched.name!r} needs saturation predictions, which this "
            f"family does not produce"
        )
    stream = RandomStream(trial_seed(seed, 0)) if sched.uses_rng else None
    sched.reset(n, granularity, stream)
    return sched


def _apply_phase_start(sched: Scheduler, cur: int, h) -> int:
    target, _ = sched.phase_start(cur, h)
    if target is None:
        return cur
    if not 0 <= target < sched.n:
        raise ProtocolError(f"scheduler {sched.name!r} chose invalid state {target!r}")
    return target


def forcing_sequence(n: int, granularity: int, eta0: int, phases: int,
                     scheduler: str | Scheduler, seed: int = 0) -> TaskSequence:
    """Steer a live scheduler into the most transitions the budget allows.

    Let m = min(max_forcible_transitions(eta0), n). Each phase commits a
    prediction block up front: the scheduler's opening position gets the
    earliest predicted slot, every other state follows in index order.
    The first n - m saturations then simply follow the predicted order
    (error-free filler; it evicts any scheduler that parks on the next
    predicted slot), after which the adversary saturates whatever state
    the scheduler currently occupies until the phase closes. The chased
    states all come from the last m predicted slots, so the realized error
    never exceeds max_footrule(m) <= eta0, while the scheduler is forced
    to at least m - 1 moves inside the window plus everything the filler
    and the phase opening extracted.

    Each step is a single spike of a full threshold of units, so exactly
    one chosen state saturates per step. Schedulers that read next-request
    predictions receive a fabricated table that predicts every state one
    step ahead at all times; it is deliberately uninformative (ties
    everywhere) and scored as lossy, but it makes their walk during
    generation identical to the later replay.
    """
    _check_interactive_geometry(n, granularity, phases)
    if eta0 < 0:
        raise ConfigurationError("eta0 must be >= 0")
    m = _clamped_m(n, eta0)
    sched = _live_scheduler(scheduler, n, granularity, seed)

    tasks: list = []
    pst: list = []
    lv_rows: list = [] if sched.needs_lv else None
    cur = 0
    for _ in range(phases):
        offset = len(tasks)
        pred_state = [cur] + [s for s in range(n) if s != cur]
        block = _prediction_block(offset, pred_state)
        pst.append(block)

        cur = _apply_phase_start(sched, cur, block.h)
        unsat = set(range(n))
        for pos in range(n):
            now = offset + pos
            if pos < n - m:
                victim = next(s for s in pred_state if s in unsat)
            else:
                victim = cur
            row = [0] * n
            row[victim] = granularity
            tasks.append(row)
            if lv_rows is not None:
                lv_rows.append([now + 1] * n)
            unsat.discard(victim)
            if victim == cur and unsat:
                choices = sorted(unsat)
                latest = [now + 1] * n
                target = sched.on_saturation(cur, choices, now, block.h, latest)
                if target not in unsat:
                    raise ProtocolError(
                        f"scheduler {sched.name!r} moved into a saturated state"
                    )
                cur = target
    return TaskSequence(n=n, granularity=granularity, tasks=tasks, pst=pst, lv=lv_rows)


def _check_interactive_geometry(n: int, granularity: int, phases: int) -> None:
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    if granularity < 1:
        raise ConfigurationError("granularity must be >= 1")
    if phases < 1:
        raise ConfigurationError("phases must be >= 1")


def repeat_block_sequence(n: int, phases: int, scheduler: str | Scheduler,
                          repeat: int | None = None, seed: int = 0) -> TaskSequence:
    """Pin a scheduler with truthful next-request predictions.

    The stream is built from single-state demands of one unit each, with
    the saturation threshold set to ``repeat`` (default n + 1). A phase
    runs n rounds: round q sweeps all states once in index order, then
    hammers the state the scheduler currently occupies for repeat - q
    further steps, which lands that state on the threshold exactly at the
    block's last step and forces the scheduler off. Every state is
    hammered exactly once per phase, so a conforming scheduler that makes
    no phase-opening move is forced into exactly n - 1 transitions per
    phase. The emitted next-request table is exact (zero loss): sweeps
    never saturate anything, so the hammer target for round q is already
    determined when round q starts.
    """
    if repeat is None:
        repeat = n + 1
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    if repeat < n + 1:
        raise ConfigurationError("repeat must be >= n + 1 so sweeps never saturate")
    if phases < 1:
        raise ConfigurationError("phases must be >= 1")
    sched = _live_scheduler(scheduler, n, repeat, seed, allow_pst=False)

    tasks: list = []
    lv_rows: list = []
    cur = 0
    for phase_index in range(phases):
        last_phase = phase_index == phases - 1
        cur = _apply_phase_start(sched, cur, None)
        saturated: set = set()
        latest = _LatestTable(n, lv_rows)
        for q in range(1, n + 1):
            sigma = cur
            sweep_start = len(tasks)
            block_start = sweep_start + n
            next_sweep_start = block_start + (repeat - q)
            for s in range(n):
                row = [0] * n
                row[s] = 1
                tasks.append(row)
                if s == sigma:
                    prediction = block_start
                elif last_phase and q == n:
                    prediction = -1
                else:
                    prediction = next_sweep_start + s
                latest.emit(s, prediction)
            for i in range(repeat - q):
                step = block_start + i
                row = [0] * n
                row[sigma] = 1
                tasks.append(row)
                if i < repeat - q - 1:
                    prediction = step + 1
                elif last_phase and q == n:
                    prediction = -1
                else:
                    prediction = next_sweep_start + sigma
                latest.emit(sigma, prediction)
            saturated.add(sigma)
            if q < n:
                choices = sorted(s for s in range(n) if s not in saturated)
                now = next_sweep_start - 1
                target = sched.on_saturation(cur, choices, now, None, latest.values)
                if target not in choices:
                    raise ProtocolError(
                        f"scheduler {sched.name!r} moved into a saturated state"
                    )
                cur = target
    return TaskSequence(n=n, granularity=repeat, tasks=tasks, pst=None, lv=lv_rows)


class _LatestTable:
    """Emit next-request rows while tracking the latest value per state."""

    def __init__(self, n: int, rows: list) -> None:
        self.n = n
        self.rows = rows
        self.values = [0] * n

    def emit(self, state: int, prediction: int) -> None:
        row = [0] * self.n
        row[state] = prediction
        self.rows.append(row)
        self.values[state] = prediction


def random_unit_sequence(n: int, granularity: int, phases: int, seed: int = 0,
                         with_pst: bool = True, with_lv: bool = True) -> TaskSequence:
    """Uniformly random single-state demands, trimmed to complete phases.

    Draws one requested state per step until the wanted number of phases
    has closed, then cuts the stream at the last phase boundary, so there
    is no incomplete suffix. Saturation is always exact (units arrive one
    at a time) and tie-free (one state per step). Optionally attaches
    truthful prediction tables: saturation steps per phase, and the true
    next request per demand (zero loss by construction).
    """
    if n < 1 or granularity < 1 or phases < 1:
        raise ConfigurationError("n, granularity and phases must be >= 1")
    stream = RandomStream(trial_seed(seed, 0))
    tasks: list = []
    cum = [0] * n
    complete = 0
    boundary = 0
    cap = 1000 * n * granularity * phases + 1000
    while complete < phases:
        if len(tasks) > cap:
            raise ConfigurationError("random stream failed to close enough phases")
        s = stream.randbelow(n)
        row = [0] * n
        row[s] = 1
        tasks.append(row)
        cum[s] += 1
        if min(cum) >= granularity:
            complete += 1
            boundary = len(tasks)
            cum = [0] * n
    tasks = tasks[:boundary]

    seq = TaskSequence(n=n, granularity=granularity, tasks=tasks)
    if with_pst:
        found, _ = decompose_phases(seq)
        seq.pst = [
            PhasePrediction(phase_start=ph.start, h=tuple(ph.sat_step)) for ph in found
        ]
    if with_lv:
        horizon = len(tasks)
        upcoming = [-1] * n
        rows: list = [None] * horizon
        for t in range(horizon - 1, -1, -1):
            requested = next(s for s in range(n) if tasks[t][s] > 0)
            row = [0] * n
            row[requested] = upcoming[requested]
            rows[t] = row
            upcoming[requested] = t
        seq.lv = rows
    return seq


def noisy_pst(seq: TaskSequence, eta0: int, seed: int = 0) -> TaskSequence:
    """Copy of ``seq`` whose prediction blocks are perturbed within budget.

    Per phase, signed integer offsets are drawn in [-eta0, eta0], shrunk
    (largest magnitude first) until their total magnitude fits the budget,
    and then shrunk further whenever two predicted steps collide, so the
    realized per-phase error is at most eta0 and predicted steps stay
    distinct. Shrinking only ever moves predictions toward the truth.
    """
    if eta0 < 0:
        raise ConfigurationError("eta0 must be >= 0")
    stream = RandomStream(trial_seed(seed, 0))
    phases, _ = decompose_phases(seq)
    blocks = []
    for phase in phases:
        true = list(phase.sat_step)
        n = len(true)
        deltas = [stream.randbelow(2 * eta0 + 1) - eta0 for _ in range(n)]

        def shrink(index: int) -> None:
            deltas[index] -= 1 if deltas[index] > 0 else -1

        while sum(abs(d) for d in deltas) > eta0:
            worst = max(range(n), key=lambda i: (abs(deltas[i]), -i))
            shrink(worst)
        while True:
            seen: dict = {}
            clash = None
            for i in range(n):
                value = true[i] + deltas[i]
                if value in seen:
                    pair = (seen[value], i)
                    clash = max(pair, key=lambda i: (abs(deltas[i]), -i))
                    break
                seen[value] = i
            if clash is None:
                break
            shrink(clash)
        blocks.append(
            PhasePrediction(
                phase_start=phase.start,
                h=tuple(true[i] + deltas[i] for i in range(n)),
            )
        )
    return TaskSequence(
        n=seq.n,
        granularity=seq.granularity,
        tasks=[list(row) for row in seq.tasks],
        pst=blocks,
        lv=None if seq.lv is None else [list(row) for row in seq.lv],
    )


FAMILY_NAMES = ("reversal", "lv", "force-det", "rand-lb")
INTERACTIVE_FAMILIES = ("lv", "force-det")
_FAMILY_ALIASES = {
    "force-deterministic": "force-det",
    "lv-adversary": "lv",
    "randomized-lb": "rand-lb",
}


def canonical_family(family: str) -> str:
    name = family.replace("_", "-").lower()
    name = _FAMILY_ALIASES.get(name, name)
    if name not in FAMILY_NAMES:
        known = ", ".join(FAMILY_NAMES)
        raise ConfigurationError(f"unknown adversary family {family!r} (known: {known})")
    return name


def build_family(family: str, *, n: int, granularity: int | None = None,
                 eta0: int | None = None, phases: int = 1, seed: int = 0,
                 scheduler: str | None = None, r: int | None = None,
                 k: int | None = None):
    """Uniform entry point used by the command line.

    Returns (sequence, info) where info carries the derived geometry that
    the command line reports: the realized tail size m for the
    budget-driven families, or the repeat count for the demand-repeat one.
    """
    name = canonical_family(family)
    if name in INTERACTIVE_FAMILIES and scheduler is None:
        raise ConfigurationError(f"family {name!r} needs --scheduler (it steers one)")
    if name in ("reversal", "force-det"):
        if eta0 is None:
            raise ConfigurationError(f"family {name!r} needs --eta0")
        if k is not None or r is not None:
            raise ConfigurationError(f"family {name!r} takes --eta0, not --k or --r")
    if granularity is None and name != "lv":
        granularity = max(n, 1)
    if name == "reversal":
        seq = reversal_sequence(n, granularity, eta0, phases)
        return seq, {"family": name, "m": _clamped_m(n, eta0)}
    if name == "rand-lb":
        if k is None:
            raise ConfigurationError("family 'rand-lb' needs --k (shuffled tail size)")
        if k < 2:
            raise ConfigurationError("family 'rand-lb' needs --k >= 2")
        if eta0 is not None or r is not None:
            raise ConfigurationError("family 'rand-lb' takes --k, not --eta0 or --r")
        seq = shuffled_tail_sequence(n, granularity, k, phases, seed=seed)
        return seq, {"family": name, "m": min(k, n)}
    if name == "force-det":
        seq = forcing_sequence(n, granularity, eta0, phases, scheduler, seed=seed)
        return seq, {"family": name, "m": _clamped_m(n, eta0)}
    if eta0 is not None or k is not None:
        raise ConfigurationError("family 'lv' takes --r, not --eta0 or --k")
    if r is None:
        r = granularity
    elif granularity is not None and granularity != r:
        raise ConfigurationError("the granularity of family 'lv' is the repeat count --r")
    if r is not None and r <= n:
        raise ConfigurationError("family 'lv' needs --r > n")
    seq = repeat_block_sequence(n, phases, scheduler, repeat=r, seed=seed)
    return seq, {"family": name, "r": seq.granularity}
