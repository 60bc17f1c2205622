"""Batched kernels agree with the reference engine and reject bad inputs."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from mtslab.adversaries import reversal_sequence, shuffled_tail_sequence
from mtslab.analysis import max_footrule, robustness_threshold
from mtslab.engine import run_scheduler
from mtslab.errors import ConfigurationError
from mtslab.kernels import (
    FAMILY_CODES,
    POLICY_CODES,
    backend_name,
    dp_opt_units,
    simulate_family_trials,
)
from mtslab.oracles import opt_bruteforce
from mtslab.rng import RandomStream, trial_seed

GEOMETRIES = [
    (3, 1, 5, 5),
    (5, 3, 7, 4),
    (8, 8, 8, 3),
]


def test_backend_name_is_known():
    assert backend_name() in ("numba", "python")


def _file_sequence(family, n, m, gran, phases, adversary_seed):
    if family == "reversal":
        return reversal_sequence(n, gran, max_footrule(m), phases)
    return shuffled_tail_sequence(n, gran, m, phases, seed=adversary_seed)


@pytest.mark.parametrize("family", sorted(FAMILY_CODES))
@pytest.mark.parametrize("policy", sorted(POLICY_CODES))
@pytest.mark.parametrize("n,m,gran,phases", GEOMETRIES)
def test_kernel_matches_engine_trial_zero(family, policy, n, m, gran, phases):
    scheduler_seed = 11
    adversary_seed = 23
    counts, costs = simulate_family_trials(
        policy, family, n, m, phases, trials=1,
        threshold=robustness_threshold(n), granularity=gran,
        scheduler_seed=scheduler_seed, adversary_seed=adversary_seed,
    )
    seq = _file_sequence(family, n, m, gran, phases, adversary_seed)
    run = run_scheduler(seq, policy, seed=scheduler_seed, trial_index=0)
    assert run.transitions_per_phase == counts[0].tolist()
    assert run.total_units == int(costs[0])
    assert run.suffix_start == len(seq.tasks)


def test_trials_use_independent_streams():
    counts, _ = simulate_family_trials(
        "oblivious", "rand-lb", 6, 6, 12, trials=8,
        granularity=6, scheduler_seed=1, adversary_seed=2,
    )
    rows = {tuple(row) for row in counts.tolist()}
    assert len(rows) > 1


def test_kernel_shapes_and_dtypes():
    counts, costs = simulate_family_trials(
        "lps", "reversal", 4, 2, 3, trials=5, granularity=4)
    assert counts.shape == (5, 3) and counts.dtype == np.int64
    assert costs.shape == (5,) and costs.dtype == np.int64
    # Deterministic policy on the deterministic family: all trials equal.
    assert (counts == counts[0]).all()
    assert (costs == costs[0]).all()


@pytest.mark.parametrize("kwargs", [
    {"policy": "stay-put"},
    {"family": "forcing"},
    {"n": 0},
    {"m": 0},
    {"m": 5},
    {"phases": 0},
    {"trials": 0},
    {"granularity": 3},
    {"policy": "robust-lps", "threshold": 0},
])
def test_kernel_rejects_bad_arguments(kwargs):
    base = dict(policy="lps", family="reversal", n=4, m=2, phases=1,
                trials=1, threshold=2, granularity=4)
    base.update(kwargs)
    with pytest.raises(ConfigurationError):
        simulate_family_trials(**base)


def _checksum_script():
    return (
        "import json\n"
        "from mtslab.kernels import backend_name, simulate_family_trials, dp_opt_units\n"
        "out = {'backend': backend_name(), 'cells': []}\n"
        "for family in ('reversal', 'rand-lb'):\n"
        "    for policy in ('oblivious', 'lps', 'robust-lps', 'lowest-index'):\n"
        "        counts, costs = simulate_family_trials(\n"
        "            policy, family, 9, 4, 6, trials=4, threshold=3,\n"
        "            granularity=11, scheduler_seed=5, adversary_seed=6)\n"
        "        out['cells'].append([int(counts.sum()), int(costs.sum())])\n"
        "out['opt'] = dp_opt_units([[3, 0, 1], [0, 2, 2], [1, 1, 0]], 4)\n"
        "print(json.dumps(out))\n"
    )


def test_backends_are_bit_identical():
    script = _checksum_script()
    results = {}
    for flag in ("0", "1"):
        env = dict(os.environ, MTSLAB_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, "-c", script], env=env,
            capture_output=True, text=True, check=True,
        )
        results[flag] = json.loads(proc.stdout)
    assert results["0"]["backend"] == "python"
    assert results["0"]["cells"] == results["1"]["cells"]
    assert results["0"]["opt"] == results["1"]["opt"]


def test_dp_opt_empty_is_zero():
    assert dp_opt_units([], 4) == 0


def test_dp_opt_rejects_flat_input():
    with pytest.raises(ConfigurationError):
        dp_opt_units([1, 2, 3], 4)


def test_dp_opt_matches_bruteforce_on_random_instances():
    stream = RandomStream(trial_seed(7, 0))
    for i in range(40):
        n = 1 + stream.randbelow(3)
        steps = 1 + stream.randbelow(5)
        gran = 1 + stream.randbelow(4)
        tasks = [[stream.randbelow(2 * gran + 1) for _ in range(n)]
                 for _ in range(steps)]
        for free_start in (False, True):
            assert dp_opt_units(tasks, gran, free_start=free_start) == \
                opt_bruteforce(tasks, gran, free_start=free_start)


def test_dp_opt_free_start_never_costs_more():
    tasks = [[0, 5], [0, 5], [5, 0]]
    fixed = dp_opt_units(tasks, 3)
    free = dp_opt_units(tasks, 3, free_start=True)
    assert free <= fixed
