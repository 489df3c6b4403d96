"""Patient visit orderings for the three candidate mission policies.

* Teleoperation: a simulated operator picks the nearest unvisited patient
  most of the time but occasionally picks an arbitrary one.
* Heuristic autonomy: plain nearest-neighbor from the base.
* Triage-aware planning: patients ranked by a priority score combining
  severity, urgency, and accessibility.

Every ordering returns a full permutation of the patient ids; ties always
break toward the lower id so results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .scenario import Patient, Scenario

DEFAULT_OPERATOR_ERROR_RATE = 0.15


class PolicyId(Enum):
    PI1_TELEOP = "pi1_teleop"
    PI2_AUTO = "pi2_auto"
    PI3_GEODT = "pi3_geodt"

    @property
    def index(self) -> int:
        return _POLICY_ORDER.index(self)


_POLICY_ORDER = [PolicyId.PI1_TELEOP, PolicyId.PI2_AUTO, PolicyId.PI3_GEODT]


@dataclass(frozen=True)
class VisitPlan:
    order: tuple[int, ...]


@dataclass(frozen=True)
class TriageWeights:
    """Weights of the priority score: severity, urgency, accessibility.

    Urgency decays exponentially in time-to-criticality with time constant
    `urgency_timescale`, so patients near criticality rank sharply higher.
    """

    w_severity: float = 1.0
    w_urgency: float = 1.0
    w_access: float = 0.5
    urgency_timescale: float = 60.0   # minutes

    def __post_init__(self) -> None:
        if min(self.w_severity, self.w_urgency, self.w_access) < 0:
            raise ValueError("triage weights must be nonnegative")
        if self.w_severity + self.w_urgency + self.w_access <= 0:
            raise ValueError("at least one triage weight must be positive")
        if self.urgency_timescale <= 0:
            raise ValueError("urgency_timescale must be positive")


DEFAULT_TRIAGE_WEIGHTS = TriageWeights()


def _distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def order_teleop(scenario: Scenario, stream: np.random.Generator,
                 error_rate: float = DEFAULT_OPERATOR_ERROR_RATE) -> VisitPlan:
    """Noisy nearest-neighbor order chosen by a simulated operator.

    At each step the operator flies to the nearest unvisited patient with
    probability 1 - error_rate, otherwise to a uniformly random unvisited
    one. One uniform draw decides the mode of every step, then a second
    draw picks the random target when needed, so the stream consumption
    pattern is fixed.
    """
    remaining = list(scenario.patients)
    current = scenario.base_position
    order: list[int] = []
    while remaining:
        if len(remaining) == 1:
            pick = remaining[0]
        elif error_rate > 0.0 and float(stream.uniform()) < error_rate:
            pick = remaining[int(stream.integers(len(remaining)))]
        else:
            pick = min(remaining, key=lambda p: (_distance(current, p.position), p.id))
        order.append(pick.id)
        remaining.remove(pick)
        current = pick.position
    return VisitPlan(order=tuple(order))


def order_heuristic(scenario: Scenario) -> VisitPlan:
    """Deterministic nearest-neighbor from the base, ties to the lower id."""
    remaining = list(scenario.patients)
    current = scenario.base_position
    order: list[int] = []
    while remaining:
        pick = min(remaining, key=lambda p: (_distance(current, p.position), p.id))
        order.append(pick.id)
        remaining.remove(pick)
        current = pick.position
    return VisitPlan(order=tuple(order))


def triage_score(patient: Patient, weights: TriageWeights = DEFAULT_TRIAGE_WEIGHTS) -> float:
    """Priority score: higher means visit sooner."""
    urgency = math.exp(-patient.time_to_criticality / weights.urgency_timescale)
    return (weights.w_severity * patient.severity
            + weights.w_urgency * urgency
            + weights.w_access * patient.accessibility)


def order_triage(scenario: Scenario,
                 weights: TriageWeights = DEFAULT_TRIAGE_WEIGHTS) -> VisitPlan:
    """Patients sorted by priority score, highest first, ties to the lower id."""
    ranked = sorted(scenario.patients,
                    key=lambda p: (-triage_score(p, weights), p.id))
    return VisitPlan(order=tuple(p.id for p in ranked))


def plan_for_policy(scenario: Scenario, policy: PolicyId,
                    weights: TriageWeights, stream: np.random.Generator,
                    error_rate: float = DEFAULT_OPERATOR_ERROR_RATE) -> VisitPlan:
    """Dispatch to the ordering that belongs to `policy`."""
    if policy is PolicyId.PI1_TELEOP:
        return order_teleop(scenario, stream, error_rate)
    if policy is PolicyId.PI2_AUTO:
        return order_heuristic(scenario)
    return order_triage(scenario, weights)
