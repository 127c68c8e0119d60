"""Tests for the seeded randomized studies."""

import io
import json

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import InfeasibleInput, InvalidInput
from src.experiments import (
    ExperimentConfig,
    ExperimentReport,
    _separated_angles,
    cross_ratio_invariance_residual,
    random_system,
    random_u11_map,
    run_decision_study,
    run_determinant_study,
    run_genericity_study,
    run_minimality_study,
    run_moebius_invariance_study,
    run_oracle_equivalence_study,
    run_threshold_study,
    theoretical_minimum,
    trial_rng,
    write_summary_csv,
)
from src.moebius import apply_array
from src.phases import PhaseSet, roots_of_unity
from src.prcore.engine import EngineOptions
from src.prcore.frames import is_complete, is_full_spark

SIGNS = roots_of_unity(2)
CUBE = roots_of_unity(3)
FOURTH = roots_of_unity(4)


def test_trial_streams_are_reproducible():
    """Test that each (seed, trial) stream is fixed and distinct."""
    assert trial_rng(1, 2).standard_normal() == trial_rng(1, 2).standard_normal()
    assert trial_rng(1, 2).standard_normal() != trial_rng(1, 3).standard_normal()
    assert random_system(3, 6, 5) == random_system(3, 6, 5)
    with pytest.raises(InvalidInput):
        trial_rng(-1, 0)


def test_random_systems():
    """Test genericity of random Gaussian systems."""
    for seed in range(100):
        assert is_full_spark(random_system(3, 6, seed))
        assert not is_complete(random_system(3, 2, seed))


def test_random_u11_map():
    """Test that random circle maps preserve the circle."""
    z = np.exp(1j * np.linspace(0, 6, 40))
    for seed in range(10):
        M = random_u11_map(seed)
        assert M.circle_preserving
        assert np.abs(np.abs(apply_array(M, z)) - 1).max() < 1e-10


def test_theoretical_minimum():
    """Test minimal vector counts."""
    assert theoretical_minimum(2, 1) == 2
    assert theoretical_minimum(3, 2) == 5
    assert theoretical_minimum(2, 3) == 4
    assert theoretical_minimum(3, 4) == 6


@pytest.mark.parametrize("d", [2, 3])
def test_threshold_2d_minus_2(d):
    """Test that 2d - 2 random vectors always fail with two phases."""
    report = run_threshold_study(d, "2d-2", SIGNS, trials=100, seed=0)
    assert report.fail_count == 100
    assert report.expectation_met
    assert report.config.m == 2 * d - 2


@pytest.mark.parametrize("d", [2, 3])
def test_threshold_2d_minus_1(d):
    """Test that 2d - 1 random vectors always fail with three phases."""
    report = run_threshold_study(d, "2d-1", CUBE, trials=100, seed=0)
    assert report.fail_count == 100
    assert report.expectation_met
    assert len(report.example_witnesses) == 3


def test_threshold_validation():
    """Test regime and phase-count checks."""
    with pytest.raises(InvalidInput):
        run_threshold_study(2, "2d-1", SIGNS, trials=5)
    with pytest.raises(InvalidInput):
        run_threshold_study(2, "2d", SIGNS, trials=5)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("d", [2, 3])
def test_genericity(d, n):
    """Test that 2d random vectors do Theta-PR for the n-th roots of unity."""
    report = run_genericity_study(d, 2 * d, roots_of_unity(n), trials=200, seed=1)
    assert report.pass_count == 200
    assert report.expectation_met
    assert report.example_witnesses == []


def test_genericity_validation():
    """Test that genericity needs m >= 2d."""
    with pytest.raises(InvalidInput):
        run_genericity_study(3, 5, FOURTH, trials=5)


@pytest.mark.parametrize(
    "d,T,expected",
    [
        (2, PhaseSet((1,)), 2),
        (2, SIGNS, 3),
        (3, SIGNS, 5),
        (2, CUBE, 4),
        (3, CUBE, 6),
    ],
)
def test_minimality(d, T, expected):
    """Test the empirical minimal number of vectors."""
    empirical, report = run_minimality_study(d, T, trials=20, seed=2)
    assert empirical == expected
    assert report.expectation_met
    assert report.summary["theoretical_n"] == expected
    assert report.summary["per_m"][-1]["m"] == expected
    assert report.config.m is None


def test_moebius_invariance():
    """Test that decisions agree on T and on M(T)."""
    report = run_moebius_invariance_study(2, 4, CUBE, trials=50, seed=3)
    assert report.mismatches == 0
    assert report.expectation_met
    failing = run_moebius_invariance_study(2, 3, CUBE, trials=10, seed=3)
    assert failing.fail_count == 10
    assert failing.mismatches == 0


def test_moebius_invariance_identity_and_cross_ratios():
    """Test the identity control and the cross-ratio check for four phases."""
    report = run_moebius_invariance_study(2, 4, FOURTH, trials=10, seed=4, identity_map=True)
    assert report.mismatches == 0
    assert report.summary["identity_map"]
    assert report.summary["cross_ratio_mismatches"] == 0
    mapped = run_moebius_invariance_study(2, 4, FOURTH, trials=10, seed=4)
    assert mapped.summary["cross_ratio_mismatches"] == 0


def test_cross_ratio_invariance_residual():
    """Test cross-ratio preservation over random quadruples."""
    assert cross_ratio_invariance_residual(1000, seed=5) < 1e-9


def test_separated_angles_redraw_close_draws():
    """Test that close angle draws are redrawn, wrap-around gap included."""
    angles = _separated_angles(trial_rng(0, 0), gap=1.0)
    assert len(angles) == 4
    assert np.min(np.diff(angles)) >= 1.0
    assert 2.0 * np.pi - (angles[-1] - angles[0]) >= 1.0
    with pytest.raises(InfeasibleInput):
        _separated_angles(trial_rng(0, 0), gap=2.0)


@pytest.mark.parametrize(
    "oracle,d,m,T",
    [
        ("complement", 2, 4, SIGNS),
        ("complement", 3, 5, SIGNS),
        ("cover3", 2, 4, CUBE),
        ("cover3", 2, 3, CUBE),
        ("c2", 2, 4, FOURTH),
        ("c2", 2, 4, CUBE),
    ],
)
def test_oracle_equivalence(oracle, d, m, T):
    """Test that independent oracles agree with the engine."""
    report = run_oracle_equivalence_study(oracle, d, m, T, trials=200, seed=6)
    assert report.mismatches == 0
    assert report.expectation_met
    assert report.summary["unsupported"] == 0
    assert report.pass_count + report.fail_count == 200


def test_oracle_equivalence_mixes_instances():
    """Test that structured instances appear alongside generic ones."""
    report = run_oracle_equivalence_study("c2", 2, 4, FOURTH, trials=30, seed=7, verbose=True)
    kinds = report.summary["instance_kinds"]
    assert set(kinds) == {"generic", "c2_coincident", "c2_cross_ratio"}
    assert report.fail_count > 0
    assert len(report.outcomes) == 30


@pytest.mark.parametrize("d", [2, 3, 4])
def test_determinant_study(d):
    """Test the paired determinant identity on random feasible assignments."""
    report = run_determinant_study(d, CUBE, trials=100, seed=8)
    assert report.pass_count == 100
    assert report.expectation_met
    assert report.summary["max_relative_error"] < 1e-10


def test_determinant_needs_two_phases():
    """Test that one phase admits no feasible assignment."""
    with pytest.raises(InvalidInput):
        run_determinant_study(2, PhaseSet((1,)), trials=5)


def test_reports_are_reproducible():
    """Test that the same seed gives byte-identical reports."""
    first = run_threshold_study(2, "2d-1", CUBE, trials=10, seed=9)
    second = run_threshold_study(2, "2d-1", CUBE, trials=10, seed=9)
    assert first.to_json() == second.to_json()
    assert "elapsed" not in json.loads(first.to_json())
    assert "elapsed" in json.loads(first.to_json(include_timing=True))


def test_threaded_trials_match_serial():
    """Test that splitting trials across threads keeps every outcome."""
    serial = run_decision_study(2, 3, CUBE, 12, seed=10, verbose=True)
    threaded = run_decision_study(
        2, 3, CUBE, 12, seed=10, options=EngineOptions(threads=3), verbose=True
    )
    assert serial.outcomes == threaded.outcomes
    assert [w["assignment"] for w in serial.example_witnesses] == [
        w["assignment"] for w in threaded.example_witnesses
    ]


def test_report_counts_must_cover_trials():
    """Test the pass plus fail consistency check."""
    config = ExperimentConfig(study="x", d=2, m=3, phases=[[1.0, 0.0]], trials=5, seed=0)
    with pytest.raises(ValidationError):
        ExperimentReport(
            config=config, pass_count=2, fail_count=2, expectation="none", expectation_met=True
        )


def test_summary_csv():
    """Test the CSV summary layout."""
    report = run_determinant_study(2, CUBE, trials=3, seed=0)
    buffer = io.StringIO()
    write_summary_csv([report], buffer)
    lines = buffer.getvalue().strip().splitlines()
    assert lines[0].startswith("study,d,m,phase_count")
    assert lines[1].startswith("determinant,2,4,3,3,0,3,0,0,True")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
