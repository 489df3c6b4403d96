"""Mission metrics: delays, service rate, failure rate, workload, dominance.

Per-trace extraction works purely off the event log. High-severity
patients never reached before the mission ends contribute a censored
delay equal to the mission duration; dropping them instead would reward
aborting early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import INTERVENE, OPERATOR_INTERVENTION, TASK_SWITCH, MissionTrace
from .scenario import Scenario

DEFAULT_SERVICE_WINDOW = 60.0   # minutes; clinically acceptable delay
DEFAULT_ALPHA = 1.0             # weight of the task-switching rate
DEFAULT_BETA = 1.0              # weight of the intervention frequency


@dataclass(frozen=True)
class DelayRecord:
    patient_id: int
    delay: float
    censored: bool


@dataclass(frozen=True)
class TrialMetrics:
    """Per-mission metric bundle, the row unit of the sweep."""

    high_severity_delays: tuple[DelayRecord, ...]
    served_count: int
    total_patients: int
    aborted: bool
    lambda_sw: float
    lambda_int: float
    workload: float
    duration: float

    @property
    def rho(self) -> float:
        return self.served_count / self.total_patients if self.total_patients else 0.0


@dataclass(frozen=True)
class MetricVector:
    """Per-condition aggregate [mean delay, service rate, failure rate, workload]."""

    t_int_mean: float
    rho: float
    r_fail: float
    w_mean: float


def _intervention_times(trace: MissionTrace) -> dict[int, float]:
    times: dict[int, float] = {}
    for event in trace.events:
        if event.kind == INTERVENE and event.patient_id not in times:
            times[event.patient_id] = event.time
    return times


def intervention_delays(trace: MissionTrace, scenario: Scenario) -> tuple[DelayRecord, ...]:
    """Delay to first intervention for each high-severity patient.

    Patients not reached before the terminal event get the mission-end
    delay, flagged censored.
    """
    times = _intervention_times(trace)
    records = []
    for patient in scenario.patients:
        if not patient.high_severity:
            continue
        if patient.id in times:
            records.append(DelayRecord(patient.id,
                                       times[patient.id] - patient.detect_time, False))
        else:
            records.append(DelayRecord(patient.id,
                                       trace.duration - patient.detect_time, True))
    return tuple(records)


def served_within_window(trace: MissionTrace, scenario: Scenario,
                         tau_c: float = DEFAULT_SERVICE_WINDOW) -> tuple[int, float]:
    """Count and rate of patients served within the acceptable window.

    The window boundary is inclusive; unserved patients contribute zero.
    """
    if tau_c <= 0.0:
        raise ValueError("tau_c must be positive")
    times = _intervention_times(trace)
    count = sum(
        1 for p in scenario.patients
        if p.id in times and times[p.id] - p.detect_time <= tau_c
    )
    return count, count / len(scenario.patients) if scenario.patients else 0.0


def failure_rate(aborted_flags: list[bool] | tuple[bool, ...]) -> float:
    """Fraction of aborted missions."""
    if len(aborted_flags) == 0:
        raise ValueError("failure rate undefined for an empty trial set")
    return sum(bool(f) for f in aborted_flags) / len(aborted_flags)


def task_switch_rate(trace: MissionTrace) -> float:
    """Distinct consecutive task-label changes per minute of mission time.

    The first task event establishes the initial task; only actual label
    changes count. Zero-duration missions rate zero by convention.
    """
    if trace.duration <= 0.0:
        return 0.0
    labels = [e.task_label for e in trace.events if e.kind == TASK_SWITCH]
    changes = sum(1 for a, b in zip(labels, labels[1:]) if a != b)
    return changes / trace.duration


def intervention_frequency(trace: MissionTrace) -> float:
    """Operator control actions per minute of mission time."""
    if trace.duration <= 0.0:
        return 0.0
    count = sum(1 for e in trace.events if e.kind == OPERATOR_INTERVENTION)
    return count / trace.duration


def workload(lambda_sw: float, lambda_int: float,
             alpha: float = DEFAULT_ALPHA, beta: float = DEFAULT_BETA) -> float:
    """Composite operator-workload proxy: alpha*switching + beta*interventions."""
    if alpha < 0.0 or beta < 0.0:
        raise ValueError("workload weights must be nonnegative")
    return alpha * lambda_sw + beta * lambda_int


def aggregate_workload(per_trial: list[float] | tuple[float, ...]) -> float:
    """Mean workload across missions (one operator per mission).

    Uses exact summation so the result is independent of input order.
    """
    if len(per_trial) == 0:
        raise ValueError("aggregate workload undefined for an empty set")
    return math.fsum(per_trial) / len(per_trial)


def trial_metrics(trace: MissionTrace, scenario: Scenario,
                  tau_c: float = DEFAULT_SERVICE_WINDOW,
                  alpha: float = DEFAULT_ALPHA,
                  beta: float = DEFAULT_BETA) -> TrialMetrics:
    """Extract the full per-mission metric bundle from one trace."""
    lam_sw = task_switch_rate(trace)
    lam_int = intervention_frequency(trace)
    served, _ = served_within_window(trace, scenario, tau_c)
    return TrialMetrics(
        high_severity_delays=intervention_delays(trace, scenario),
        served_count=served,
        total_patients=len(scenario.patients),
        aborted=trace.aborted,
        lambda_sw=lam_sw,
        lambda_int=lam_int,
        workload=workload(lam_sw, lam_int, alpha, beta),
        duration=trace.duration,
    )


def metric_vector(trials: list[TrialMetrics] | tuple[TrialMetrics, ...],
                  tau_c: float = DEFAULT_SERVICE_WINDOW) -> MetricVector:
    """Aggregate one (policy, condition) cell into its metric vector.

    Delays are pooled across trials (censored included); the service rate
    is the mean of per-trial rates computed under `tau_c`; the failure
    rate covers the trial abort flags; workload is the per-trial mean.
    """
    if len(trials) == 0:
        raise ValueError("metric vector undefined for an empty cell")
    delays = [rec.delay for t in trials for rec in t.high_severity_delays]
    if not delays:
        raise ValueError("metric vector undefined without any high-severity delay")
    return MetricVector(
        t_int_mean=math.fsum(delays) / len(delays),
        rho=math.fsum(t.rho for t in trials) / len(trials),
        r_fail=failure_rate([t.aborted for t in trials]),
        w_mean=aggregate_workload([t.workload for t in trials]),
    )


def dominates(a: MetricVector, b: MetricVector) -> bool:
    """Strict Pareto dominance on the minimization form [T, 1-rho, R, W]."""
    av = (a.t_int_mean, 1.0 - a.rho, a.r_fail, a.w_mean)
    bv = (b.t_int_mean, 1.0 - b.rho, b.r_fail, b.w_mean)
    if any(math.isnan(x) for x in av + bv):
        raise ValueError("dominance undefined for NaN components")
    return all(x <= y for x, y in zip(av, bv)) and any(x < y for x, y in zip(av, bv))
