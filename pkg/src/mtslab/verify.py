"""Consistency checks for task sequences and recorded runs.

Each check is a named pass/fail with a human-readable detail line. The
command line maps any failed check to a nonzero exit status; library
callers get the full list back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .adversaries import random_unit_sequence
from .analysis import (
    harmonic_number,
    max_footrule,
    max_footrule_consistency,
    max_forcible_transitions,
    robustness_threshold,
)
from .core import TaskSequence, decompose_phases, lv_loss, pst_error_per_phase, schedule_cost
from .engine import RunResult, run_scheduler
from .errors import ConfigurationError
from .opt import opt_units
from .oracles import max_footrule_bruteforce, opt_bruteforce
from .rng import RandomStream, trial_seed
from .schedulers import SCHEDULERS, Scheduler

SUITE_NAMES = ("arith", "footrule", "opt", "invariants", "all")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class VerifyResult:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append(CheckResult(name, passed, detail))

    def lines(self) -> list:
        out = []
        for c in self.checks:
            mark = "ok" if c.passed else "FAIL"
            out.append(f"[{mark}] {c.name}: {c.detail}")
        return out


def verify_sequence(seq: TaskSequence, scheduler: str | Scheduler | None = None, *,
                    seed: int = 0, trial_index: int = 0, eta0: int | None = None,
                    expect_transitions: int | None = None,
                    expect_min_transitions: int | None = None,
                    expect_lv_loss: int | None = None,
                    include_opt: bool = True) -> VerifyResult:
    """Run every applicable check; attach a scheduler run when one is named."""
    result = VerifyResult()
    phases, suffix_start = decompose_phases(seq)
    suffix_steps = len(seq) - suffix_start
    result.add(
        "phase-structure",
        len(seq) > 0,
        f"{len(phases)} complete phases, {suffix_steps} suffix steps, "
        f"{len(seq)} steps total",
    )

    if seq.pst is not None:
        starts = {p.start for p in phases}
        if suffix_steps:
            starts.add(suffix_start)
        stray = [b.phase_start for b in seq.pst if b.phase_start not in starts]
        covered = {b.phase_start for b in seq.pst}
        missing = [p.start for p in phases if p.start not in covered]
        result.add(
            "pst-alignment",
            not stray and not missing,
            "every block sits on a phase boundary and every complete phase "
            "has a block"
            if not stray and not missing
            else f"stray block starts {stray}, uncovered phase starts {missing}",
        )
        errors = pst_error_per_phase(seq)
        known = [e for e in errors if e is not None]
        if eta0 is not None:
            over = [
                (p.index, e)
                for p, e in zip(phases, errors)
                if e is not None and e > eta0
            ]
            result.add(
                "pst-error-budget",
                not over,
                f"per-phase prediction error max {max(known) if known else 0} "
                f"within budget {eta0}"
                if not over
                else f"budget {eta0} exceeded in phases {over}",
            )

    if seq.lv is not None:
        loss = lv_loss(seq)
        if expect_lv_loss is not None:
            result.add(
                "next-request-loss",
                loss == expect_lv_loss,
                f"total loss {loss}, expected {expect_lv_loss}",
            )
        else:
            result.add("next-request-loss", True, f"total loss {loss}")

    if scheduler is None:
        return result

    run = run_scheduler(seq, scheduler, seed=seed, trial_index=trial_index)
    _check_run(result, seq, run, phases,
               expect_transitions=expect_transitions,
               expect_min_transitions=expect_min_transitions,
               include_opt=include_opt)
    return result


def _check_run(result: VerifyResult, seq: TaskSequence, run: RunResult, phases, *,
               expect_transitions: int | None,
               expect_min_transitions: int | None,
               include_opt: bool) -> None:
    audit_total, audit_move, audit_proc = schedule_cost(
        seq.tasks, seq.granularity, run.schedule, start_state=0
    )
    engine_move = sum(p.movement_units for p in run.phases) + run.suffix_movement_units
    engine_proc = sum(p.processing_units for p in run.phases) + run.suffix_processing_units
    ok = audit_move == engine_move and audit_proc == engine_proc
    result.add(
        "cost-identity",
        ok,
        f"audited movement {audit_move} and processing {audit_proc} match the run"
        if ok
        else f"audit ({audit_move}, {audit_proc}) != engine ({engine_move}, {engine_proc})",
    )

    conforming = run.conforming
    if conforming:
        gran = seq.granularity
        bad = []
        for p in run.phases:
            lo = p.transitions * gran
            hi = (2 * p.transitions + 1) * gran
            if not lo <= p.cost_units <= hi:
                bad.append((p.index, p.transitions, p.cost_units))
        result.add(
            "phase-cost-sandwich",
            not bad,
            "every complete phase spends between k*g and (2k+1)*g units for "
            "its k transition events"
            if not bad
            else f"violations (phase, transitions, units): {bad}",
        )

    if expect_transitions is not None:
        off = [
            (p.index, p.transitions)
            for p in run.phases
            if p.transitions != expect_transitions
        ]
        result.add(
            "transition-count",
            not off,
            f"every complete phase makes exactly {expect_transitions} transitions"
            if not off
            else f"expected {expect_transitions} per phase, got {off}",
        )
    if expect_min_transitions is not None:
        off = [
            (p.index, p.transitions)
            for p in run.phases
            if p.transitions < expect_min_transitions
        ]
        result.add(
            "transition-floor",
            not off,
            f"every complete phase makes at least {expect_min_transitions} transitions"
            if not off
            else f"floor {expect_min_transitions} violated in {off}",
        )

    if include_opt and phases:
        prefix_end = phases[-1].end + 1
        opt = opt_units(seq.tasks[:prefix_end], seq.granularity, start_state=0)
        count = len(phases)
        gran = seq.granularity
        lo, hi = count * gran, 2 * count * gran
        ok = lo <= opt <= hi
        result.add(
            "offline-sandwich",
            ok,
            f"offline optimum {opt} within [{lo}, {hi}] over {count} complete phases"
            if ok
            else f"offline optimum {opt} outside [{lo}, {hi}]",
        )


# ---- self-contained property suites (command line `verify`) ----

def arith_suite() -> VerifyResult:
    """Closed-form arithmetic against frozen values and band consistency."""
    result = VerifyResult()
    frozen_max = {1: 0, 2: 2, 3: 4, 4: 8, 5: 12, 6: 18}
    bad = {m: (max_footrule(m), want) for m, want in frozen_max.items()
           if max_footrule(m) != want}
    result.add("footrule-frozen-values", not bad,
               f"max_footrule matches {frozen_max}" if not bad else f"mismatches {bad}")

    frozen_inv = {0: 1, 4: 3, 5: 3, 18: 6, 200: 20}
    bad = {e: (max_forcible_transitions(e), want) for e, want in frozen_inv.items()
           if max_forcible_transitions(e) != want}
    result.add("forcible-frozen-values", not bad,
               f"max_forcible_transitions matches {frozen_inv}"
               if not bad else f"mismatches {bad}")

    violation = max_footrule_consistency(1000)
    result.add(
        "footrule-band-consistency",
        violation is None,
        "budget bands invert exactly for all m <= 1000"
        if violation is None
        else f"first violation (m, budget) = {violation}",
    )

    frozen_h = {1: Fraction(1), 2: Fraction(3, 2), 4: Fraction(25, 12)}
    bad = {n: (harmonic_number(n), want) for n, want in frozen_h.items()
           if harmonic_number(n) != want}
    ok = not bad
    for n in range(2, 201):
        if harmonic_number(n) - harmonic_number(n - 1) != Fraction(1, n):
            ok = False
            bad[n] = "difference is not 1/n"
            break
    result.add("harmonic-exactness", ok,
               "frozen values and the 1/n difference identity hold up to 200"
               if ok else f"mismatches {bad}")

    frozen_th = {16: 4, 64: 5}
    bad = {n: (robustness_threshold(n), want) for n, want in frozen_th.items()
           if robustness_threshold(n) != want}
    result.add("robustness-threshold", not bad,
               f"thresholds match {frozen_th}" if not bad else f"mismatches {bad}")
    return result


def footrule_suite(max_m: int = 8) -> VerifyResult:
    """Brute-force footrule maxima against the closed form."""
    if not 1 <= max_m <= 9:
        raise ConfigurationError("max_m must be in [1, 9] (factorial enumeration)")
    result = VerifyResult()
    for m in range(1, max_m + 1):
        brute = max_footrule_bruteforce(m)
        closed = max_footrule(m)
        result.add(
            f"footrule-max-m{m}",
            brute == closed,
            f"brute force {brute} == closed form {closed}"
            if brute == closed
            else f"brute force {brute} != closed form {closed}",
        )
    return result


def opt_suite(instances: int = 200, seed: int = 0) -> VerifyResult:
    """Dynamic-programming optimum against exhaustive enumeration."""
    if instances < 1:
        raise ConfigurationError("instances must be >= 1")
    result = VerifyResult()
    first_bad = None
    checked = 0
    for i in range(instances):
        stream = RandomStream(trial_seed(seed, i))
        n = 1 + stream.randbelow(3)
        steps = 1 + stream.randbelow(6)
        gran = 1 + stream.randbelow(3)
        tasks = [[stream.randbelow(3 * gran + 1) for _ in range(n)]
                 for _ in range(steps)]
        for free_start in (False, True):
            dp = opt_units(tasks, gran, free_start=free_start)
            brute = opt_bruteforce(tasks, gran, free_start=free_start)
            checked += 1
            if dp != brute and first_bad is None:
                first_bad = (i, n, steps, gran, free_start, dp, brute, tasks)
    result.add(
        "opt-dp-vs-exhaustive",
        first_bad is None,
        f"{checked} optima match across fixed and free start"
        if first_bad is None
        else "mismatch (instance, n, steps, granularity, free_start, dp, brute, "
             f"tasks) = {first_bad}",
    )
    return result


def invariants_suite(inputs: int = 60, seed: int = 0, max_n: int = 8) -> VerifyResult:
    """Protocol conformance of every scheduler on random unit-demand inputs.

    Each input is a fresh tie-free random stream; every registered
    scheduler runs on it and the recorded run must satisfy the cost
    identity, the per-phase cost sandwich (conforming schedulers), and the
    offline-optimum sandwich. Failures carry the offending input's
    parameters in the check name.
    """
    if inputs < 1:
        raise ConfigurationError("inputs must be >= 1")
    if max_n < 2:
        raise ConfigurationError("max_n must be >= 2")
    result = VerifyResult()
    failures = []
    runs = 0
    for i in range(inputs):
        stream = RandomStream(trial_seed(seed, i))
        n = 2 + stream.randbelow(max_n - 1)
        gran = 2 + stream.randbelow(9)
        phase_count = 1 + stream.randbelow(2)
        seq = random_unit_sequence(n, gran, phase_count, seed=trial_seed(seed, i))
        for name in sorted(SCHEDULERS):
            sub = verify_sequence(seq, name, seed=seed)
            runs += 1
            if not sub.passed:
                for check in sub.checks:
                    if not check.passed:
                        failures.append(
                            f"input {i} (n={n}, g={gran}, phases={phase_count}), "
                            f"scheduler {name}: {check.name}: {check.detail}"
                        )
    result.add(
        "random-input-conformance",
        not failures,
        f"{runs} scheduler runs on {inputs} random inputs, all checks hold"
        if not failures
        else "; ".join(failures[:3]) + (f" (+{len(failures) - 3} more)"
                                        if len(failures) > 3 else ""),
    )
    return result


def run_suite(suite: str, *, max_m: int = 8, seed: int = 0,
              opt_instances: int = 200, conformance_inputs: int = 60) -> VerifyResult:
    """Dispatch one named suite (or all of them) and merge the results."""
    if suite not in SUITE_NAMES:
        known = ", ".join(SUITE_NAMES)
        raise ConfigurationError(f"unknown suite {suite!r} (known: {known})")
    result = VerifyResult()
    if suite in ("arith", "all"):
        result.checks.extend(arith_suite().checks)
    if suite in ("footrule", "all"):
        result.checks.extend(footrule_suite(max_m).checks)
    if suite in ("opt", "all"):
        result.checks.extend(opt_suite(opt_instances, seed).checks)
    if suite in ("invariants", "all"):
        result.checks.extend(invariants_suite(conformance_inputs, seed).checks)
    return result
