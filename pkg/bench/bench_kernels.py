"""Benchmark the batched kernels under the active backend.

Runs the family simulation kernel and the offline-optimum DP on fixed
workloads, printing wall times and a checksum of every result. With
--compare, re-runs itself in a subprocess with MTSLAB_NUMBA=0 and reports
the speedup; the checksums must match exactly, since both backends execute
the same integer arithmetic.

Usage: python bench/bench_kernels.py [--compare] [--trials N] [--phases N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from mtslab.analysis import max_forcible_transitions, robustness_threshold
from mtslab.kernels import backend_name, dp_opt_units, simulate_family_trials
from mtslab.rng import RandomStream, trial_seed


def bench_family(trials: int, phases: int) -> dict:
    n, eta0, gran = 64, 128, 64
    m = min(max_forcible_transitions(eta0), n)
    # Warm-up so a jit compile is not billed to the first timed row.
    simulate_family_trials("oblivious", "reversal", n, m, 2, 2,
                           threshold=robustness_threshold(n), granularity=gran)
    results = {}
    for policy in ("oblivious", "lps", "robust-lps", "lowest-index"):
        for family in ("reversal", "rand-lb"):
            start = time.perf_counter()
            counts, costs = simulate_family_trials(
                policy, family, n, m, phases, trials,
                threshold=robustness_threshold(n), granularity=gran,
                scheduler_seed=1, adversary_seed=2,
            )
            elapsed = time.perf_counter() - start
            key = f"family/{policy}/{family}"
            results[key] = {
                "seconds": elapsed,
                "checksum": int(counts.sum() * 1000003 + costs.sum()),
            }
    return results


def bench_opt(instances: int) -> dict:
    stream = RandomStream(trial_seed(9, 0))
    dp_opt_units(np.ones((4, 3), dtype=np.int64), 2)
    total = 0
    start = time.perf_counter()
    for _ in range(instances):
        n = 2 + stream.randbelow(7)
        steps = 50 + stream.randbelow(151)
        gran = 4 + stream.randbelow(13)
        tasks = np.empty((steps, n), dtype=np.int64)
        for t in range(steps):
            for s in range(n):
                tasks[t, s] = stream.randbelow(3)
        total += dp_opt_units(tasks, gran)
    elapsed = time.perf_counter() - start
    return {"opt/dp": {"seconds": elapsed, "checksum": total}}


def run(trials: int, phases: int, instances: int) -> dict:
    results = {}
    results.update(bench_family(trials, phases))
    results.update(bench_opt(instances))
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--compare", action="store_true",
                        help="also run the pure-python backend and diff")
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--phases", type=int, default=64)
    parser.add_argument("--opt-instances", type=int, default=20)
    parser.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    results = run(args.trials, args.phases, args.opt_instances)
    if args.emit_json:
        print(json.dumps(results, sort_keys=True))
        return 0

    backend = backend_name()
    print(f"backend: {backend}")
    for key in sorted(results):
        row = results[key]
        print(f"  {key:32s} {row['seconds']*1000:10.2f} ms  checksum {row['checksum']}")

    if not args.compare:
        return 0
    if backend == "python":
        print("already on the pure-python backend; nothing to compare against")
        return 0

    env = dict(os.environ, MTSLAB_NUMBA="0")
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--emit-json",
         "--trials", str(args.trials), "--phases", str(args.phases),
         "--opt-instances", str(args.opt_instances)],
        capture_output=True, text=True, env=env, check=True,
    )
    other = json.loads(proc.stdout)
    print("backend: python (subprocess)")
    mismatches = 0
    for key in sorted(other):
        row = other[key]
        fast = results[key]
        same = row["checksum"] == fast["checksum"]
        mismatches += 0 if same else 1
        speedup = row["seconds"] / fast["seconds"] if fast["seconds"] > 0 else float("inf")
        mark = "ok" if same else "MISMATCH"
        print(f"  {key:32s} {row['seconds']*1000:10.2f} ms  "
              f"speedup {speedup:8.1f}x  checksum {mark}")
    if mismatches:
        print(f"{mismatches} checksum mismatches between backends")
        return 1
    print("all checksums identical across backends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
