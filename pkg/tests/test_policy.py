"""Visit orderings against independent brute-force oracles."""

import math

import numpy as np
import pytest

from medmission import (
    Condition,
    Patient,
    Scenario,
    TriageWeights,
    order_heuristic,
    order_teleop,
    order_triage,
    triage_score,
)

BASE = (0.0, 0.0)


def make_scenario(positions, severities=None, access=None, delta=0.0):
    n = len(positions)
    severities = severities or [0.5] * n
    access = access or [1.0] * n
    patients = tuple(
        Patient(i, tuple(map(float, positions[i])), float(severities[i]), 0.0,
                240.0 * (1.0 - severities[i]) + 10.0, float(access[i]),
                severities[i] >= 0.7)
        for i in range(n))
    return Scenario(Condition(0, delta, n), patients, BASE, 4000.0)


def random_scenario(rng, max_load=7):
    n = int(rng.integers(1, max_load + 1))
    return make_scenario(
        positions=[(rng.uniform(0, 4000), rng.uniform(0, 4000)) for _ in range(n)],
        severities=[float(rng.uniform()) for _ in range(n)],
        access=[float(rng.uniform(0.2, 1.0)) for _ in range(n)],
    )


# Independent oracles, re-implemented from scratch on purpose.

def nn_oracle(scenario):
    todo = {p.id: p.position for p in scenario.patients}
    at = scenario.base_position
    out = []
    while todo:
        best = None
        best_key = None
        for pid, pos in todo.items():
            d = math.dist(at, pos)
            key = (d, pid)
            if best_key is None or key < best_key:
                best, best_key = pid, key
        out.append(best)
        at = todo.pop(best)
    return tuple(out)


def triage_oracle(scenario, weights):
    scored = []
    for p in scenario.patients:
        v = (weights.w_severity * p.severity
             + weights.w_urgency * math.exp(-p.time_to_criticality
                                            / weights.urgency_timescale)
             + weights.w_access * p.accessibility)
        scored.append((-v, p.id))
    return tuple(pid for _, pid in sorted(scored))


# ---------------------------------------------------------------------------
# Teleoperation ordering.

def test_teleop_single_patient():
    scenario = make_scenario([(100.0, 0.0)])
    plan = order_teleop(scenario, np.random.default_rng(0))
    assert plan.order == (0,)


def test_teleop_without_errors_is_nearest_neighbor():
    scenario = make_scenario([(3000.0, 0.0), (1000.0, 0.0), (2000.0, 0.0)])
    plan = order_teleop(scenario, np.random.default_rng(0), error_rate=0.0)
    assert plan.order == (1, 2, 0)


def test_teleop_always_yields_a_permutation():
    rng = np.random.default_rng(17)
    for _ in range(10_000):
        scenario = random_scenario(rng, max_load=9)
        plan = order_teleop(scenario, np.random.default_rng(int(rng.integers(1 << 32))))
        assert sorted(plan.order) == [p.id for p in scenario.patients]


def test_teleop_is_deterministic_given_its_stream():
    rng = np.random.default_rng(3)
    scenario = random_scenario(rng)
    a = order_teleop(scenario, np.random.default_rng(99))
    b = order_teleop(scenario, np.random.default_rng(99))
    assert a == b


# ---------------------------------------------------------------------------
# Heuristic ordering.

def test_heuristic_single_patient():
    assert order_heuristic(make_scenario([(5.0, 5.0)])).order == (0,)


def test_heuristic_tie_breaks_to_lower_id():
    scenario = make_scenario([(100.0, 0.0), (0.0, 100.0)])
    assert order_heuristic(scenario).order == (0, 1)


def test_heuristic_matches_oracle_on_a_five_patient_case():
    scenario = make_scenario([(900.0, 100.0), (200.0, 50.0), (400.0, 700.0),
                              (2500.0, 2500.0), (300.0, 60.0)])
    assert order_heuristic(scenario).order == nn_oracle(scenario)


def test_heuristic_matches_oracle_on_200_random_small_cases():
    rng = np.random.default_rng(41)
    for _ in range(200):
        scenario = random_scenario(rng)
        assert order_heuristic(scenario).order == nn_oracle(scenario)


# ---------------------------------------------------------------------------
# Triage score and ordering.

def test_score_reduces_to_severity_with_isolated_weight():
    weights = TriageWeights(1.0, 0.0, 0.0, 60.0)
    patient = Patient(0, (0.0, 0.0), 0.37, 0.0, 55.0, 0.9, False)
    assert triage_score(patient, weights) == pytest.approx(0.37, abs=1e-15)


def test_score_direct_evaluation():
    # 0.5 + e^-1 + 0.5 with unit weights and delta == timescale
    weights = TriageWeights(1.0, 1.0, 1.0, 60.0)
    patient = Patient(0, (0.0, 0.0), 0.5, 0.0, 60.0, 0.5, False)
    assert triage_score(patient, weights) == pytest.approx(1.3678794411714423,
                                                           abs=1e-12)


def test_score_decreases_with_time_to_criticality():
    weights = TriageWeights(1.0, 1.0, 0.5, 60.0)
    sooner = Patient(0, (0.0, 0.0), 0.5, 0.0, 30.0, 0.5, False)
    later = Patient(1, (0.0, 0.0), 0.5, 0.0, 90.0, 0.5, False)
    assert triage_score(sooner, weights) > triage_score(later, weights)


def test_triage_identical_patients_order_by_id():
    scenario = make_scenario([(10.0, 10.0)] * 4)
    assert order_triage(scenario).order == (0, 1, 2, 3)


def test_triage_matches_oracle_on_a_six_patient_case():
    scenario = make_scenario(
        positions=[(i * 100.0, 0.0) for i in range(6)],
        severities=[0.9, 0.1, 0.7, 0.7, 0.3, 0.99],
        access=[0.5, 1.0, 0.3, 0.9, 0.8, 0.2])
    weights = TriageWeights()
    assert order_triage(scenario, weights).order == triage_oracle(scenario, weights)


def test_triage_matches_oracle_on_200_random_small_cases():
    rng = np.random.default_rng(43)
    weights = TriageWeights()
    for _ in range(200):
        scenario = random_scenario(rng)
        assert order_triage(scenario, weights).order == triage_oracle(scenario, weights)


def test_triage_ordering_invariant_under_weight_scaling():
    rng = np.random.default_rng(47)
    for _ in range(1000):
        scenario = random_scenario(rng)
        w = TriageWeights(float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.1, 2.0)),
                          float(rng.uniform(0.1, 2.0)), 60.0)
        c = float(rng.uniform(0.01, 100.0))
        scaled = TriageWeights(c * w.w_severity, c * w.w_urgency, c * w.w_access, 60.0)
        assert order_triage(scenario, w) == order_triage(scenario, scaled)


def test_orderings_always_yield_permutations():
    rng = np.random.default_rng(53)
    for _ in range(10_000):
        scenario = random_scenario(rng, max_load=8)
        ids = [p.id for p in scenario.patients]
        assert sorted(order_heuristic(scenario).order) == ids
        assert sorted(order_triage(scenario).order) == ids


def test_weight_validation():
    with pytest.raises(ValueError):
        TriageWeights(0.0, 0.0, 0.0, 60.0)
    with pytest.raises(ValueError):
        TriageWeights(-1.0, 1.0, 0.5, 60.0)
    with pytest.raises(ValueError):
        TriageWeights(1.0, 1.0, 0.5, 0.0)
