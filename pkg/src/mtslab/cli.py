"""Command-line front end.

Subcommands: adversary-gen (write generated inputs to JSON), simulate
(replay a file through a scheduler, per-phase rows as CSV or JSON),
verify (self-contained property suites), sweep (batched parameter grid
to CSV, one file per algorithm, plus a manifest).

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 malformed input file. All randomness derives from --seed
(default 0); rerunning any subcommand with identical arguments and seed
reproduces its output byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .adversaries import FAMILY_NAMES, build_family, canonical_family
from .analysis import (
    SweepRecord,
    max_forcible_transitions,
    robustness_threshold,
    round_ratio_half_up,
)
from .core import (
    decompose_phases,
    load_task_sequence,
    pst_error_per_phase,
    save_task_sequence,
)
from .engine import run_scheduler
from .errors import ConfigurationError, MalformedInputError
from .kernels import simulate_family_trials
from .opt import opt_units
from .schedulers import make_scheduler, scheduler_names
from .verify import SUITE_NAMES, run_suite

# The adversary stream must not mirror the scheduler stream, or a
# randomized scheduler would see draws correlated with the input's; the
# offset keeps both derivations disjoint for every trial index.
ADVERSARY_SEED_OFFSET = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtslab",
        description="Simulation laboratory for uniform metrical task systems "
                    "with predictions.",
    )
    parser.add_argument("--version", action="version", version=f"mtslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser(
        "adversary-gen",
        help="generate an input file from one of the adversary families",
    )
    gen.add_argument("--adversary", required=True,
                     help="family: " + ", ".join(FAMILY_NAMES))
    gen.add_argument("--n", type=int, required=True, help="number of states")
    gen.add_argument("--eta0", type=int, default=None,
                     help="prediction error budget (reversal, force-det)")
    gen.add_argument("--granularity", type=int, default=None,
                     help="units per saturation threshold (default n)")
    gen.add_argument("--phases", type=int, default=1, help="complete phases to emit")
    gen.add_argument("--r", type=int, default=None,
                     help="repeat count for the lv family (> n, default n + 1)")
    gen.add_argument("--k", type=int, default=None,
                     help="shuffled tail size for the rand-lb family (>= 2)")
    gen.add_argument("--scheduler", default=None,
                     help="scheduler steered by the interactive families: "
                          + ", ".join(scheduler_names()))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output JSON path")
    gen.set_defaults(func=_cmd_adversary_gen)

    sim = sub.add_parser(
        "simulate",
        help="run a scheduler over an input file and emit per-phase rows",
    )
    sim.add_argument("--input", required=True, help="task sequence JSON path")
    sim.add_argument("--algorithm", required=True,
                     help="scheduler: " + ", ".join(scheduler_names()))
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--trials", type=int, default=1,
                     help="independent trials (> 1 only for randomized schedulers)")
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--out", default=None,
                     help="row output path (default: standard output)")
    sim.set_defaults(func=_cmd_simulate)

    ver = sub.add_parser("verify", help="run the self-contained property suites")
    ver.add_argument("--suite", choices=SUITE_NAMES, default="all")
    ver.add_argument("--max-m", type=int, default=8,
                     help="largest tail size for the brute-force footrule suite")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=_cmd_verify)

    swp = sub.add_parser(
        "sweep",
        help="batched parameter grid over a synthetic family, CSV per algorithm",
    )
    swp.add_argument("--config", required=True, help="sweep configuration JSON path")
    swp.add_argument("--out", required=True, help="output directory")
    swp.set_defaults(func=_cmd_sweep)
    return parser


def _cmd_adversary_gen(args) -> int:
    seq, info = build_family(
        args.adversary,
        n=args.n,
        granularity=args.granularity,
        eta0=args.eta0,
        phases=args.phases,
        seed=args.seed,
        scheduler=args.scheduler,
        r=args.r,
        k=args.k,
    )
    save_task_sequence(seq, args.out)
    phases, suffix_start = decompose_phases(seq)
    print(f"wrote {args.out}: n={seq.n} granularity={seq.granularity} "
          f"steps={len(seq)} phases={len(phases)}")
    if "m" in info:
        print(f"m = {info['m']}")
    else:
        print(f"r = {info['r']}")
    if seq.pst is not None:
        for phase, err in zip(phases, pst_error_per_phase(seq)):
            if err is not None:
                print(f"phase {phase.index}: realized error {err}")
    return 0


def _cmd_simulate(args) -> int:
    seq = load_task_sequence(args.input)
    sched = make_scheduler(args.algorithm)
    if args.trials < 1:
        raise ConfigurationError("--trials must be >= 1")
    if args.trials > 1 and not sched.uses_rng:
        raise ConfigurationError(
            f"scheduler {sched.name!r} is deterministic; --trials must be 1"
        )
    phases, _ = decompose_phases(seq)
    phase_opts = [
        opt_units(seq.tasks[p.start : p.end + 1], seq.granularity, free_start=True)
        for p in phases
    ]
    opt_total = opt_units(seq.tasks, seq.granularity, start_state=0)

    rows = []
    transitions = []
    total_cost = 0
    for trial in range(args.trials):
        res = run_scheduler(seq, make_scheduler(args.algorithm),
                            seed=args.seed, trial_index=trial)
        for p, popt in zip(res.phases, phase_opts):
            rows.append((trial, p.index, p.transitions, p.cost_units, popt))
            transitions.append(p.transitions)
        total_cost += res.total_units

    cells = max(len(transitions), 1)
    summary = {
        "algorithm": sched.name,
        "seed": args.seed,
        "trials": args.trials,
        "n": seq.n,
        "granularity": seq.granularity,
        "steps": len(seq),
        "complete_phases": len(phases),
        "mean_transitions_per_phase": round_ratio_half_up(sum(transitions), cells),
        "max_transitions_per_phase": max(transitions) if transitions else 0,
        "total_cost_units": total_cost,
        "opt_cost_units": opt_total,
        "mean_cost_ratio": round_ratio_half_up(total_cost, opt_total * args.trials)
        if opt_total > 0
        else "",
    }

    if args.format == "json":
        doc = {
            "rows": [
                {
                    "trial": t,
                    "phase_index": p,
                    "transitions": k,
                    "alg_cost_units": c,
                    "opt_cost_units": o,
                }
                for t, p, k, c, o in rows
            ],
            "summary": summary,
        }
        text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
        _write_text(args.out, text)
        return 0

    lines = ["trial,phase_index,transitions,alg_cost_units,opt_cost_units"]
    lines.extend(",".join(str(v) for v in row) for row in rows)
    _write_text(args.out, "\n".join(lines) + "\n")
    summary_text = json.dumps(summary, sort_keys=True, separators=(",", ":"))
    print(summary_text, file=sys.stdout if args.out else sys.stderr)
    return 0


def _write_text(path, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args) -> int:
    result = run_suite(args.suite, max_m=args.max_m, seed=args.seed)
    for line in result.lines():
        print(line)
    return 0 if result.passed else 1


_SWEEP_KEYS = {
    "n": list,
    "eta0": list,
    "algorithms": list,
    "adversary": str,
    "phases": int,
    "granularity": int,
    "trials": int,
    "seed": int,
}


def _load_sweep_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"sweep config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigurationError("sweep config must be a JSON object")
    unknown = sorted(set(config) - set(_SWEEP_KEYS))
    if unknown:
        raise ConfigurationError(f"unknown sweep config keys: {unknown}")
    config.setdefault("seed", 0)
    for key, kind in _SWEEP_KEYS.items():
        if key not in config:
            raise ConfigurationError(f"sweep config is missing {key!r}")
        if not isinstance(config[key], kind) or isinstance(config[key], bool):
            raise ConfigurationError(f"sweep config key {key!r} must be {kind.__name__}")
    for key in ("n", "eta0"):
        values = config[key]
        if not values:
            raise ConfigurationError(f"sweep config key {key!r} must be non-empty")
        if any(not isinstance(v, int) or isinstance(v, bool) for v in values):
            raise ConfigurationError(f"sweep config key {key!r} must hold integers")
    if any(v < 1 for v in config["n"]):
        raise ConfigurationError("every n must be >= 1")
    if any(v < 0 for v in config["eta0"]):
        raise ConfigurationError("every eta0 must be >= 0")
    if not config["algorithms"]:
        raise ConfigurationError("sweep config key 'algorithms' must be non-empty")
    if config["phases"] < 1 or config["trials"] < 1:
        raise ConfigurationError("phases and trials must be >= 1")
    if config["granularity"] < max(config["n"]):
        raise ConfigurationError("granularity must be >= every swept n")
    return config


def _cmd_sweep(args) -> int:
    config = _load_sweep_config(args.config)
    family = canonical_family(config["adversary"])
    if family not in ("reversal", "rand-lb"):
        raise ConfigurationError(
            f"family {family!r} steers a live scheduler and cannot be swept; "
            f"use adversary-gen + simulate"
        )
    seed = config["seed"]
    gran = config["granularity"]
    phases = config["phases"]
    trials = config["trials"]

    os.makedirs(args.out, exist_ok=True)
    written = {}
    for algorithm in config["algorithms"]:
        records = []
        for n in config["n"]:
            threshold = robustness_threshold(n)
            for eta0 in config["eta0"]:
                m = min(max_forcible_transitions(eta0), n)
                counts, costs = simulate_family_trials(
                    algorithm, family, n, m, phases, trials,
                    threshold=threshold, granularity=gran,
                    scheduler_seed=seed,
                    adversary_seed=seed + ADVERSARY_SEED_OFFSET,
                )
                # Every state collects exactly one threshold of units per
                # phase, so parking in any single state is offline-optimal.
                opt_total = trials * phases * gran
                records.append(SweepRecord.from_counts(
                    n=n, eta0=eta0, m=m, algorithm=algorithm, seed=seed,
                    phases=phases, counts=counts.tolist(),
                    total_cost_units=int(costs.sum()),
                    opt_cost_units=opt_total,
                ))
        path = os.path.join(args.out, f"{algorithm}.csv")
        lines = [SweepRecord.csv_header()]
        lines.extend(r.csv_row() for r in records)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        written[algorithm] = len(records)
        print(f"wrote {path}: {len(records)} records")

    manifest = {"config": config, "version": __version__, "records": written}
    manifest_path = os.path.join(args.out, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n")
    print(f"wrote {manifest_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MalformedInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
