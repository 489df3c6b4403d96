"""Condition/patient-field generation and random-stream derivation."""

import math

import numpy as np
import pytest

from medmission import (
    Condition,
    Patient,
    ScenarioParams,
    SeedSpec,
    StreamPurpose,
    classify_high_severity,
    derive_stream,
    generate_scenario,
)

MASTER = 42


def _first_draws(seed, c, t, p, tag, n=10):
    return derive_stream(seed, c, t, p, tag).uniform(size=n)


def test_identical_coordinates_give_identical_streams():
    a = _first_draws(MASTER, 0, 0, 0, StreamPurpose.SCENARIO)
    b = _first_draws(MASTER, 0, 0, 0, StreamPurpose.SCENARIO)
    assert np.array_equal(a, b)


def test_trial_index_changes_the_stream():
    a = _first_draws(MASTER, 0, 0, 0, StreamPurpose.SCENARIO)
    b = _first_draws(MASTER, 0, 1, 0, StreamPurpose.SCENARIO)
    assert not np.array_equal(a, b)


def test_master_seed_changes_the_stream():
    a = _first_draws(7, 0, 0, 0, StreamPurpose.SCENARIO)
    b = _first_draws(MASTER, 0, 0, 0, StreamPurpose.SCENARIO)
    assert not np.array_equal(a, b)


def test_seed_spec_applies_the_same_derivation_rule():
    spec = SeedSpec(master_seed=MASTER)
    a = spec.stream(2, 14, 1, StreamPurpose.MISSION).uniform(size=5)
    b = derive_stream(MASTER, 2, 14, 1, StreamPurpose.MISSION).uniform(size=5)
    assert np.array_equal(a, b)


def test_no_stream_collisions_over_the_full_sweep_domain():
    # Oracle: the first 63-bit draw of every stream in the default domain
    # (20 conditions x 250 trials x 3 policies x 2 purposes) is unique.
    seen = set()
    count = 0
    for c in range(20):
        for t in range(250):
            for p in range(3):
                for tag in StreamPurpose:
                    seen.add(int(derive_stream(MASTER, c, t, p, tag).integers(1 << 63)))
                    count += 1
    assert len(seen) == count == 20 * 250 * 3 * 2


def test_condition_validation():
    with pytest.raises(ValueError):
        Condition(0, -0.1, 5)
    with pytest.raises(ValueError):
        Condition(0, 1.2, 5)
    with pytest.raises(ValueError):
        Condition(0, 0.5, 0)


def test_generate_scenario_invariants():
    condition = Condition(0, 0.5, 10)
    scenario = generate_scenario(condition, derive_stream(MASTER, 0, 0, 0,
                                                          StreamPurpose.SCENARIO))
    assert len(scenario.patients) == 10
    params = ScenarioParams()
    for p in scenario.patients:
        assert 0.0 <= p.position[0] <= scenario.area_extent
        assert 0.0 <= p.position[1] <= scenario.area_extent
        assert 0.0 <= p.severity <= 1.0
        assert p.detect_time == 0.0
        assert p.time_to_criticality > 0.0
        assert params.accessibility_low <= p.accessibility <= params.accessibility_high
        assert p.high_severity == classify_high_severity(p)


def test_generate_scenario_is_deterministic():
    condition = Condition(3, 0.25, 8)
    a = generate_scenario(condition, derive_stream(MASTER, 3, 1, 2, StreamPurpose.SCENARIO))
    b = generate_scenario(condition, derive_stream(MASTER, 3, 1, 2, StreamPurpose.SCENARIO))
    assert a == b


def test_scenario_draws_do_not_depend_on_other_trials():
    # Generating trials 0..4 first must not perturb trial 5's field.
    condition = Condition(0, 0.5, 6)
    for t in range(5):
        generate_scenario(condition, derive_stream(MASTER, 0, t, 0, StreamPurpose.SCENARIO))
    after = generate_scenario(condition, derive_stream(MASTER, 0, 5, 0, StreamPurpose.SCENARIO))
    alone = generate_scenario(condition, derive_stream(MASTER, 0, 5, 0, StreamPurpose.SCENARIO))
    assert after == alone


def test_severity_mean_matches_the_beta_distribution():
    # Beta(2, 2): mean 1/2, variance 1/20; allow three standard errors.
    n = 10_000
    condition = Condition(0, 0.0, n)
    scenario = generate_scenario(condition, derive_stream(MASTER, 0, 0, 0,
                                                          StreamPurpose.SCENARIO))
    sev = np.array([p.severity for p in scenario.patients])
    se = math.sqrt(0.05 / n)
    assert abs(sev.mean() - 0.5) < 3 * se


def test_range_safety_over_many_random_scenarios():
    rng = np.random.default_rng(2024)
    params = ScenarioParams()
    for i in range(10_000):
        load = int(rng.integers(1, 13))
        delta = float(rng.uniform())
        scenario = generate_scenario(
            Condition(0, delta, load),
            derive_stream(int(rng.integers(1 << 32)), 0, 0, 0, StreamPurpose.SCENARIO),
            params)
        assert len(scenario.patients) == load
        for p in scenario.patients:
            assert 0.0 <= p.position[0] <= params.area_extent
            assert 0.0 <= p.position[1] <= params.area_extent
            assert 0.0 <= p.severity <= 1.0
            assert p.time_to_criticality >= params.criticality_floor
            assert params.accessibility_low <= p.accessibility <= params.accessibility_high


def _patient(severity):
    return Patient(0, (0.0, 0.0), severity, 0.0, 100.0, 1.0,
                   severity >= 0.7)


def test_high_severity_boundary_is_inclusive():
    assert classify_high_severity(_patient(0.7)) is True


def test_zero_severity_is_not_high():
    assert classify_high_severity(_patient(0.0)) is False


def test_full_severity_is_high():
    assert classify_high_severity(_patient(1.0)) is True


def test_threshold_is_configurable():
    assert classify_high_severity(_patient(0.5), threshold=0.4) is True
    assert classify_high_severity(_patient(0.5), threshold=0.6) is False
