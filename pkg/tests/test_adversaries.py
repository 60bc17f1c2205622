"""Input generators: geometry, error budgets, steering guarantees."""

import pytest

from mtslab.adversaries import (
    FAMILY_NAMES,
    build_family,
    canonical_family,
    forcing_sequence,
    noisy_pst,
    pinned_prediction_order,
    random_unit_sequence,
    realize_saturation_order,
    repeat_block_sequence,
    reversal_sequence,
    shuffled_tail_sequence,
)
from mtslab.analysis import max_footrule
from mtslab.core import decompose_phases, lv_loss, pst_error_per_phase
from mtslab.engine import run_scheduler
from mtslab.errors import ConfigurationError


def test_realize_order_frozen_example():
    assert realize_saturation_order(2, 2, [0, 1]) == [[2, 1], [0, 1]]


def test_realize_order_saturates_exactly_in_order():
    order = [3, 0, 2, 1]
    tasks = realize_saturation_order(4, 7, order)
    assert len(tasks) == 4
    for s in range(4):
        assert sum(row[s] for row in tasks) == 7
    cum = [0] * 4
    saturated = []
    for row in tasks:
        for s in range(4):
            cum[s] += row[s]
        saturated.append([s for s in range(4) if cum[s] >= 7])
    assert [len(states) for states in saturated] == [1, 2, 3, 4]
    for j in range(4):
        assert set(saturated[j]) == set(order[: j + 1])


def test_realize_order_validation():
    with pytest.raises(ConfigurationError):
        realize_saturation_order(3, 5, [0, 1, 1])
    with pytest.raises(ConfigurationError):
        realize_saturation_order(3, 2, [0, 1, 2])


@pytest.mark.parametrize("n", [2, 5, 8])
def test_pinned_order_is_a_permutation_avoiding_carryover(n):
    for carry in range(n):
        order = pinned_prediction_order(n, carry)
        assert sorted(order) == list(range(n))
        assert order[-1] != carry


def test_reversal_walks_prediction_follower_through_m_states():
    seq = reversal_sequence(6, 8, 4, 4)
    run = run_scheduler(seq, "lps")
    # Error budget 4 buys a tail of 3 reversed slots.
    assert run.transitions_per_phase == [3, 3, 3, 3]
    assert pst_error_per_phase(seq) == [4, 4, 4, 4]
    assert run.suffix_start == len(seq.tasks)


def test_reversal_with_zero_budget_is_error_free():
    seq = reversal_sequence(5, 5, 0, 3)
    assert pst_error_per_phase(seq) == [0, 0, 0]
    run = run_scheduler(seq, "lps")
    assert run.transitions_per_phase == [1, 1, 1]


def test_shuffled_tail_respects_budget_and_geometry():
    seq = shuffled_tail_sequence(6, 6, 3, 5, seed=2)
    phases, suffix_start = decompose_phases(seq)
    assert len(phases) == 5
    assert suffix_start == len(seq.tasks)
    for err in pst_error_per_phase(seq):
        assert err <= max_footrule(3)
    # Distinct seeds shuffle differently somewhere in five phases.
    other = shuffled_tail_sequence(6, 6, 3, 5, seed=3)
    assert seq.tasks != other.tasks


def test_shuffled_tail_is_deterministic_per_seed():
    a = shuffled_tail_sequence(5, 7, 4, 3, seed=11)
    b = shuffled_tail_sequence(5, 7, 4, 3, seed=11)
    assert a.tasks == b.tasks and a.pst == b.pst


FORCING_EXPECTATIONS = [
    # (scheduler, exact transitions per phase with n=8, eta0=8 -> m=4)
    ("lps", 4),
    ("robust-lps", 4),
    ("lowest-index", 7),
    ("lv-greedy", 7),
]


@pytest.mark.parametrize("name,expected", FORCING_EXPECTATIONS)
def test_forcing_extracts_transitions_within_budget(name, expected):
    n, eta0, phases, seed = 8, 8, 3, 5
    seq = forcing_sequence(n, n, eta0, phases, name, seed=seed)
    for err in pst_error_per_phase(seq):
        assert err <= eta0
    run = run_scheduler(seq, name, seed=seed, trial_index=0)
    assert run.transitions_per_phase == [expected] * phases


def test_forcing_rejects_non_conforming_scheduler():
    with pytest.raises(ConfigurationError):
        forcing_sequence(4, 4, 2, 1, "stay-put")


def test_repeat_block_forces_full_rotation():
    seq = repeat_block_sequence(4, 2, "lowest-index")
    assert seq.granularity == 5
    # Per phase: n rounds of a full sweep plus repeat - q hammer steps.
    assert len(seq.tasks) == 2 * (4 * 4 + 4 + 3 + 2 + 1)
    phases, suffix_start = decompose_phases(seq)
    assert len(phases) == 2
    assert suffix_start == len(seq.tasks)
    assert lv_loss(seq) == 0
    run = run_scheduler(seq, "lowest-index")
    assert run.transitions_per_phase == [3, 3]


def test_repeat_block_pins_prediction_reader_too():
    seq = repeat_block_sequence(5, 2, "lv-greedy", repeat=7)
    assert seq.granularity == 7
    assert lv_loss(seq) == 0
    run = run_scheduler(seq, "lv-greedy")
    assert run.transitions_per_phase == [4, 4]


def test_repeat_block_validation():
    with pytest.raises(ConfigurationError):
        repeat_block_sequence(4, 1, "lowest-index", repeat=4)
    with pytest.raises(ConfigurationError):
        repeat_block_sequence(4, 1, "lps")


def test_random_unit_sequence_is_trim_and_truthful():
    seq = random_unit_sequence(5, 4, 3, seed=1)
    phases, suffix_start = decompose_phases(seq)
    assert len(phases) == 3
    assert suffix_start == len(seq.tasks)
    assert pst_error_per_phase(seq) == [0, 0, 0]
    assert lv_loss(seq) == 0
    for row in seq.tasks:
        assert sorted(row)[-1] == 1 and sum(row) == 1


def test_noisy_pst_respects_budget_and_distinctness():
    base = random_unit_sequence(4, 5, 4, seed=6)
    noisy = noisy_pst(base, 5, seed=3)
    assert noisy.tasks == base.tasks
    errors = pst_error_per_phase(noisy)
    assert len(errors) == 4
    for block, err in zip(noisy.pst, errors):
        assert err <= 5
        assert len(set(block.h)) == len(block.h)
    # Somewhere the perturbation actually moved a prediction.
    assert any(err > 0 for err in errors)


def test_canonical_family_names_and_aliases():
    assert canonical_family("Rand_LB") == "rand-lb"
    assert canonical_family("force-deterministic") == "force-det"
    assert canonical_family("lv-adversary") == "lv"
    for name in FAMILY_NAMES:
        assert canonical_family(name) == name
    with pytest.raises(ConfigurationError):
        canonical_family("worst-case")


def test_build_family_flag_validation():
    with pytest.raises(ConfigurationError):
        build_family("rand-lb", n=4)  # missing k
    with pytest.raises(ConfigurationError):
        build_family("rand-lb", n=4, k=1)
    with pytest.raises(ConfigurationError):
        build_family("rand-lb", n=4, k=3, eta0=2)
    with pytest.raises(ConfigurationError):
        build_family("reversal", n=4, eta0=2, k=3)
    with pytest.raises(ConfigurationError):
        build_family("reversal", n=4)  # missing eta0
    with pytest.raises(ConfigurationError):
        build_family("lv", n=4, scheduler="lowest-index", r=4)  # r <= n
    with pytest.raises(ConfigurationError):
        build_family("lv", n=4, scheduler="lowest-index", eta0=1)
    with pytest.raises(ConfigurationError):
        build_family("force-det", n=4, eta0=2)  # missing scheduler


def test_build_family_reports_geometry():
    seq, info = build_family("reversal", n=8, eta0=4, phases=2)
    assert info == {"family": "reversal", "m": 3}
    assert seq.granularity == 8
    seq, info = build_family("rand-lb", n=4, k=9, phases=1, seed=2)
    assert info == {"family": "rand-lb", "m": 4}
    seq, info = build_family("lv", n=3, scheduler="lowest-index", phases=1)
    assert info == {"family": "lv", "r": 4}
    assert seq.granularity == 4
    seq, info = build_family(
        "force-det", n=4, eta0=4, phases=2, scheduler="lps")
    assert info == {"family": "force-det", "m": 3}
