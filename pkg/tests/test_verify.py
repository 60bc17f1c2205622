"""Verification checks pass on healthy inputs and catch tampered ones."""

import pytest

from mtslab.adversaries import random_unit_sequence, reversal_sequence
from mtslab.core import PhasePrediction, TaskSequence
from mtslab.errors import ConfigurationError
from mtslab.verify import (
    SUITE_NAMES,
    arith_suite,
    footrule_suite,
    invariants_suite,
    opt_suite,
    run_suite,
    verify_sequence,
)


def test_healthy_sequence_passes_every_check():
    seq = reversal_sequence(6, 8, 4, 3)
    result = verify_sequence(
        seq, "lps", eta0=4, expect_transitions=3)
    assert result.passed, result.lines()
    names = [c.name for c in result.checks]
    for expected in ("phase-structure", "pst-alignment", "pst-error-budget",
                     "cost-identity", "phase-cost-sandwich",
                     "transition-count", "offline-sandwich"):
        assert expected in names


def test_wrong_expectations_are_reported():
    seq = reversal_sequence(6, 8, 4, 3)
    result = verify_sequence(seq, "lps", expect_transitions=2)
    assert not result.passed
    failed = {c.name for c in result.checks if not c.passed}
    assert failed == {"transition-count"}
    floor = verify_sequence(seq, "lps", expect_min_transitions=4)
    assert {c.name for c in floor.checks if not c.passed} == {"transition-floor"}


def test_tampered_prediction_block_fails_the_budget():
    seq = reversal_sequence(6, 8, 4, 2)
    h = list(seq.pst[0].h)
    h[0] += 50
    seq.pst[0] = PhasePrediction(phase_start=seq.pst[0].phase_start, h=tuple(h))
    result = verify_sequence(seq, eta0=4)
    assert not result.passed
    failed = {c.name for c in result.checks if not c.passed}
    assert "pst-error-budget" in failed


def test_misaligned_prediction_block_fails_alignment():
    seq = reversal_sequence(5, 5, 2, 2)
    seq.pst[1] = PhasePrediction(phase_start=seq.pst[1].phase_start + 1,
                                 h=seq.pst[1].h)
    result = verify_sequence(seq)
    failed = {c.name for c in result.checks if not c.passed}
    assert "pst-alignment" in failed


def test_lv_loss_expectation():
    seq = random_unit_sequence(4, 3, 2, seed=5)
    good = verify_sequence(seq, expect_lv_loss=0)
    assert good.passed
    bad = verify_sequence(seq, expect_lv_loss=7)
    assert {c.name for c in bad.checks if not c.passed} == {"next-request-loss"}


def test_non_conforming_run_skips_the_sandwich():
    seq = random_unit_sequence(3, 4, 2, seed=8)
    result = verify_sequence(seq, "stay-put")
    names = [c.name for c in result.checks]
    assert "phase-cost-sandwich" not in names
    assert result.passed, result.lines()


def test_arith_suite_is_green():
    result = arith_suite()
    assert result.passed, result.lines()


def test_footrule_suite_bounds():
    assert footrule_suite(5).passed
    with pytest.raises(ConfigurationError):
        footrule_suite(10)


def test_opt_suite_is_green():
    result = opt_suite(instances=30, seed=4)
    assert result.passed, result.lines()


def test_invariants_suite_is_green():
    result = invariants_suite(inputs=12, seed=2)
    assert result.passed, result.lines()


def test_run_suite_dispatch():
    assert set(SUITE_NAMES) == {"arith", "footrule", "opt", "invariants", "all"}
    merged = run_suite("all", max_m=4, opt_instances=10, conformance_inputs=4)
    assert merged.passed
    names = {c.name for c in merged.checks}
    assert "footrule-max-m4" in names
    assert "opt-dp-vs-exhaustive" in names
    assert "random-input-conformance" in names
    with pytest.raises(ConfigurationError):
        run_suite("everything")


def test_verify_result_lines_format():
    result = verify_sequence(reversal_sequence(4, 4, 0, 1))
    for line in result.lines():
        assert line.startswith("[ok]") or line.startswith("[FAIL]")
