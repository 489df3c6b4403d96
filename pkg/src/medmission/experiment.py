"""Monte Carlo sweep over policies, degradation levels, and patient loads.

Trials are indexed by (condition, trial, policy) and each one derives its
own random streams from the master seed, so results are a pure function
of the configuration: serial and parallel execution produce identical
output, and adding or removing trials never perturbs the others.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from .engine import DEFAULT_PLATFORM_PARAMS, PlatformParams, run_mission
from .localization import DEFAULT_LOCALIZATION_PARAMS, LocalizationParams
from .metrics import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    DEFAULT_SERVICE_WINDOW,
    TrialMetrics,
    failure_rate,
    trial_metrics,
)
from .policy import (
    DEFAULT_OPERATOR_ERROR_RATE,
    DEFAULT_TRIAGE_WEIGHTS,
    PolicyId,
    TriageWeights,
)
from .scenario import (
    DEFAULT_SCENARIO_PARAMS,
    Condition,
    ScenarioParams,
    StreamPurpose,
    derive_stream,
    generate_scenario,
)

DEFAULT_DEGRADATION_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_PATIENT_LOADS = (5, 10, 20, 40)
DEFAULT_TRIALS_PER_CONDITION = 250
DEFAULT_MASTER_SEED = 42


@dataclass(frozen=True)
class SweepConfig:
    master_seed: int = DEFAULT_MASTER_SEED
    degradation_levels: tuple[float, ...] = DEFAULT_DEGRADATION_LEVELS
    patient_loads: tuple[int, ...] = DEFAULT_PATIENT_LOADS
    policies: tuple[PolicyId, ...] = (PolicyId.PI1_TELEOP, PolicyId.PI2_AUTO,
                                      PolicyId.PI3_GEODT)
    trials_per_condition: int = DEFAULT_TRIALS_PER_CONDITION
    tau_c: float = DEFAULT_SERVICE_WINDOW
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    operator_error_rate: float = DEFAULT_OPERATOR_ERROR_RATE
    triage_weights: TriageWeights = DEFAULT_TRIAGE_WEIGHTS
    platform: PlatformParams = DEFAULT_PLATFORM_PARAMS
    localization: LocalizationParams = DEFAULT_LOCALIZATION_PARAMS
    scenario_params: ScenarioParams = DEFAULT_SCENARIO_PARAMS

    def validate(self) -> None:
        """Raise ValueError naming the offending key for any bad field."""
        if self.trials_per_condition < 1:
            raise ValueError("trials_per_condition: must be >= 1")
        if not self.degradation_levels:
            raise ValueError("degradation_levels: must be nonempty")
        for i, delta in enumerate(self.degradation_levels):
            if not 0.0 <= delta <= 1.0:
                raise ValueError(f"degradation_levels[{i}]: {delta} outside [0, 1]")
        if not self.patient_loads:
            raise ValueError("patient_loads: must be nonempty")
        for i, load in enumerate(self.patient_loads):
            if int(load) != load or load < 1:
                raise ValueError(f"patient_loads[{i}]: {load} is not a positive integer")
        if not self.policies:
            raise ValueError("policies: must be nonempty")
        if len(set(self.policies)) != len(self.policies):
            raise ValueError("policies: duplicate entries")
        if self.tau_c <= 0.0:
            raise ValueError("tau_c: must be positive")
        if self.alpha < 0.0:
            raise ValueError("alpha: must be nonnegative")
        if self.beta < 0.0:
            raise ValueError("beta: must be nonnegative")
        if not 0.0 <= self.operator_error_rate <= 1.0:
            raise ValueError("operator_error_rate: outside [0, 1]")
        if self.platform.cruise_speed <= 0.0:
            raise ValueError("platform.cruise_speed: must be positive")
        if not 0.0 < self.platform.teleop_speed_factor <= 1.0:
            raise ValueError("platform.teleop_speed_factor: outside (0, 1]")

    def conditions(self) -> tuple[Condition, ...]:
        """Cells enumerated degradation-major, load-minor; ids are ordinal."""
        cells = []
        index = 0
        for delta in self.degradation_levels:
            for load in self.patient_loads:
                cells.append(Condition(condition_id=index, delta=float(delta),
                                       patient_load=int(load)))
                index += 1
        return tuple(cells)

    @property
    def total_missions(self) -> int:
        return (len(self.degradation_levels) * len(self.patient_loads)
                * len(self.policies) * self.trials_per_condition)


DEFAULT_SWEEP_CONFIG = SweepConfig()


@dataclass(frozen=True)
class TrialRecord:
    policy: PolicyId
    delta: float
    load: int
    condition_id: int
    trial: int
    metrics: TrialMetrics


@dataclass(frozen=True)
class Stats:
    """Mean, sample standard deviation, and a 95% CI of one sample set."""

    mean: float
    std: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class ConditionSummary:
    policy: PolicyId
    delta: float
    load: int
    n_trials: int
    delay: Stats                 # pooled high-severity delays, censored included
    rho: Stats                   # per-trial service rates
    r_fail: Stats                # per-trial abort indicators
    workload: Stats              # per-trial workload proxies
    delay_median: float
    delay_p90: float
    delay_p95: float
    delay_box: tuple[float, float, float, float, float]
    workload_box: tuple[float, float, float, float, float]
    mean_duration: float


@dataclass(frozen=True)
class PolicyRollup:
    """Whole-sweep aggregate per policy, one row per policy."""

    policy: PolicyId
    t_int_mean: float
    rho: float
    r_fail: float
    w_mean: float
    mission_time: float
    delay_median: float
    delay_p90: float
    delay_p95: float
    n_trials: int


@dataclass(frozen=True)
class ParetoPoint:
    """One bubble of the delay/failure trade-off plot.

    `delta`/`load` are None for policy-pooled points. Bubble size is the
    effective success rho * (1 - r_fail).
    """

    policy: PolicyId
    delta: float | None
    load: int | None
    x: float    # mean high-severity delay, minutes
    y: float    # failure rate
    size: float


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    records: tuple[TrialRecord, ...]
    summaries: tuple[ConditionSummary, ...]
    rollups: tuple[PolicyRollup, ...]
    pareto_condition: tuple[ParetoPoint, ...]
    front_condition: tuple[ParetoPoint, ...]
    pareto_pooled: tuple[ParetoPoint, ...]
    front_pooled: tuple[ParetoPoint, ...]


# ---------------------------------------------------------------------------
# Statistical kernels.

def confidence_interval(samples, level: float = 0.95) -> tuple[float, float]:
    """Student-t interval on the sample mean."""
    n = len(samples)
    if n < 2:
        raise ValueError("confidence interval needs at least two samples")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be inside (0, 1)")
    arr = np.asarray(samples, dtype=float)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1))
    t_crit = float(_scipy_stats.t.ppf(0.5 + level / 2.0, n - 1))
    half = t_crit * sd / math.sqrt(n)
    return mean - half, mean + half


def quantiles(samples, qs) -> tuple[float, ...]:
    """Linear-interpolation quantiles at rank (n-1)*q + 1 (1-indexed)."""
    if len(samples) == 0:
        raise ValueError("quantiles undefined for an empty sample set")
    for q in qs:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile {q} outside [0, 1]")
    arr = np.asarray(samples, dtype=float)
    return tuple(float(v) for v in np.quantile(arr, list(qs), method="linear"))


def boxplot_stats(samples) -> tuple[float, float, float, float, float]:
    """Five-number summary (min, Q1, median, Q3, max)."""
    if len(samples) == 0:
        raise ValueError("boxplot stats undefined for an empty sample set")
    q = quantiles(samples, (0.0, 0.25, 0.5, 0.75, 1.0))
    return q


def pareto_front(points) -> list:
    """Non-dominated subset of (x, y) points, input order preserved.

    A point is dropped iff some other point is no worse on both axes and
    strictly better on at least one; exact duplicates survive together.
    Implemented as a sort-and-scan over x groups (the tests compare it
    against a quadratic oracle).
    """
    pts = list(points)
    if not pts:
        raise ValueError("pareto front undefined for an empty point set")
    order = sorted(range(len(pts)), key=lambda i: (pts[i].x, pts[i].y))
    dominated = [False] * len(pts)
    best_y_before = math.inf   # min y among strictly smaller x
    i = 0
    while i < len(order):
        j = i
        group_min_y = math.inf
        while j < len(order) and pts[order[j]].x == pts[order[i]].x:
            group_min_y = min(group_min_y, pts[order[j]].y)
            j += 1
        for k in range(i, j):
            y = pts[order[k]].y
            if best_y_before <= y or group_min_y < y:
                dominated[order[k]] = True
        best_y_before = min(best_y_before, group_min_y)
        i = j
    return [p for p, d in zip(pts, dominated) if not d]


# ---------------------------------------------------------------------------
# Sweep execution.

def _run_cell(config: SweepConfig, condition: Condition,
              policy: PolicyId) -> list[TrialRecord]:
    records = []
    for trial in range(config.trials_per_condition):
        scenario_stream = derive_stream(config.master_seed, condition.condition_id,
                                        trial, policy.index, StreamPurpose.SCENARIO)
        scenario = generate_scenario(condition, scenario_stream,
                                     config.scenario_params)
        mission_stream = derive_stream(config.master_seed, condition.condition_id,
                                       trial, policy.index, StreamPurpose.MISSION)
        trace = run_mission(scenario, policy, config.platform,
                            config.triage_weights, mission_stream,
                            config.localization, config.operator_error_rate,
                            trial_index=trial)
        bundle = trial_metrics(trace, scenario, config.tau_c,
                               config.alpha, config.beta)
        records.append(TrialRecord(policy=policy, delta=condition.delta,
                                   load=condition.patient_load,
                                   condition_id=condition.condition_id,
                                   trial=trial, metrics=bundle))
    return records


def _run_cell_star(args) -> list[TrialRecord]:
    return _run_cell(*args)


def run_sweep(config: SweepConfig = DEFAULT_SWEEP_CONFIG,
              workers: int = 1) -> SweepResult:
    """Execute the full sweep and aggregate it.

    `workers` > 1 fans the (condition, policy) cells out to a process
    pool; aggregation sorts everything back into deterministic index
    order, so the result does not depend on the degree of parallelism.
    """
    config.validate()
    tasks = [(config, condition, policy)
             for condition in config.conditions()
             for policy in config.policies]

    if workers <= 1:
        chunks = [_run_cell_star(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_cell_star, tasks))

    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.condition_id, r.policy.index, r.trial))
    return aggregate(config, tuple(records))


def _stats(samples: list[float]) -> Stats:
    n = len(samples)
    if n == 0:
        return Stats(math.nan, math.nan, math.nan, math.nan)
    arr = np.asarray(samples, dtype=float)
    mean = float(arr.mean())
    if n == 1:
        return Stats(mean, math.nan, math.nan, math.nan)
    lo, hi = confidence_interval(samples)
    return Stats(mean, float(arr.std(ddof=1)), lo, hi)


def _nan_box() -> tuple[float, float, float, float, float]:
    return (math.nan,) * 5


def _summarize_cell(policy: PolicyId, delta: float, load: int,
                    cell: list[TrialRecord]) -> ConditionSummary:
    delays = [rec.delay for r in cell for rec in r.metrics.high_severity_delays]
    workloads = [r.metrics.workload for r in cell]
    if delays:
        delay_med, delay_p90, delay_p95 = quantiles(delays, (0.5, 0.9, 0.95))
        delay_box = boxplot_stats(delays)
    else:
        delay_med = delay_p90 = delay_p95 = math.nan
        delay_box = _nan_box()
    return ConditionSummary(
        policy=policy, delta=delta, load=load, n_trials=len(cell),
        delay=_stats(delays),
        rho=_stats([r.metrics.rho for r in cell]),
        r_fail=_stats([1.0 if r.metrics.aborted else 0.0 for r in cell]),
        workload=_stats(workloads),
        delay_median=delay_med, delay_p90=delay_p90, delay_p95=delay_p95,
        delay_box=delay_box,
        workload_box=boxplot_stats(workloads) if workloads else _nan_box(),
        mean_duration=float(np.mean([r.metrics.duration for r in cell])),
    )


def _rollup(policy: PolicyId, records: list[TrialRecord]) -> PolicyRollup:
    delays = [rec.delay for r in records for rec in r.metrics.high_severity_delays]
    med, p90, p95 = quantiles(delays, (0.5, 0.9, 0.95)) if delays else (math.nan,) * 3
    return PolicyRollup(
        policy=policy,
        t_int_mean=float(np.mean(delays)) if delays else math.nan,
        rho=float(np.mean([r.metrics.rho for r in records])),
        r_fail=failure_rate([r.metrics.aborted for r in records]),
        w_mean=float(np.mean([r.metrics.workload for r in records])),
        mission_time=float(np.mean([r.metrics.duration for r in records])),
        delay_median=med, delay_p90=p90, delay_p95=p95,
        n_trials=len(records),
    )


def aggregate(config: SweepConfig, records: tuple[TrialRecord, ...]) -> SweepResult:
    """Build summaries, rollups, and Pareto sets from raw trial records."""
    by_cell: dict[tuple[int, int], list[TrialRecord]] = {}
    by_policy: dict[PolicyId, list[TrialRecord]] = {p: [] for p in config.policies}
    for rec in records:
        by_cell.setdefault((rec.condition_id, rec.policy.index), []).append(rec)
        by_policy[rec.policy].append(rec)

    summaries = []
    for condition in config.conditions():
        for policy in config.policies:
            cell = by_cell.get((condition.condition_id, policy.index), [])
            if cell:
                summaries.append(_summarize_cell(policy, condition.delta,
                                                 condition.patient_load, cell))

    rollups = [_rollup(policy, by_policy[policy]) for policy in config.policies]

    pareto_condition = []
    for s in summaries:
        if math.isnan(s.delay.mean):
            continue   # no high-severity patient ever appeared in this cell
        pareto_condition.append(ParetoPoint(
            policy=s.policy, delta=s.delta, load=s.load,
            x=s.delay.mean, y=s.r_fail.mean,
            size=s.rho.mean * (1.0 - s.r_fail.mean)))
    pareto_pooled = [
        ParetoPoint(policy=r.policy, delta=None, load=None, x=r.t_int_mean,
                    y=r.r_fail, size=r.rho * (1.0 - r.r_fail))
        for r in rollups if not math.isnan(r.t_int_mean)
    ]

    return SweepResult(
        config=config,
        records=records,
        summaries=tuple(summaries),
        rollups=tuple(rollups),
        pareto_condition=tuple(pareto_condition),
        front_condition=tuple(pareto_front(pareto_condition)) if pareto_condition else (),
        pareto_pooled=tuple(pareto_pooled),
        front_pooled=tuple(pareto_front(pareto_pooled)) if pareto_pooled else (),
    )
