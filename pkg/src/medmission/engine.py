"""Single-mission execution.

A mission visits patients in the order chosen by the active policy,
accumulating travel and service time, and terminates either by completing
the plan, by tripping an abort rule, or by hitting the hard horizon cap.

Time is continuous. Outages and estimator-integrity episodes are sampled
up front as interval sets, so travel, pauses, aborts, and operator events
are all computed with exact interval arithmetic; the result is
bit-reproducible for a given stream and independent of execution order.

Abort rules form a graded ladder:

* teleoperation pauses whenever the link is down and aborts once a single
  outage outlasts its (short) link timeout;
* autonomous and twin-managed missions keep flying through outages but
  abort after a sustained lost-link interval exceeding their (longer)
  policy-specific timeouts, or when the monitored pose-covariance trace
  stays above the uncertainty threshold longer than the grace period.

For the twin-managed policy the monitored covariance is the fused one, so
an integrity episode of the onboard estimator only crosses the threshold
while GPS is also out; that makes threshold crossings structurally rarer
than under pure autonomy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .localization import (
    DEFAULT_LOCALIZATION_PARAMS,
    LocalizationParams,
    PoseEstimate,
    integrity_schedule,
    outage_schedule,
)
from .policy import (
    DEFAULT_OPERATOR_ERROR_RATE,
    DEFAULT_TRIAGE_WEIGHTS,
    PolicyId,
    TriageWeights,
    plan_for_policy,
)
from .scenario import Condition, Scenario

# Mission event kinds.
DEPART = "depart"
ARRIVE = "arrive"
INTERVENE = "intervene"
TASK_SWITCH = "task_switch"
OPERATOR_INTERVENTION = "operator_intervention"
ABORT = "abort"
COMPLETE = "complete"

EVENT_KINDS = frozenset({DEPART, ARRIVE, INTERVENE, TASK_SWITCH,
                         OPERATOR_INTERVENTION, ABORT, COMPLETE})

# Operator task alphabet.
TASK_NAVIGATE = "navigate"
TASK_ASSESS = "assess"
TASK_INTERVENE = "intervene"
TASK_RECOVER = "recover"
TASK_MONITOR = "monitor"

TASK_ALPHABET = frozenset({TASK_NAVIGATE, TASK_ASSESS, TASK_INTERVENE,
                           TASK_RECOVER, TASK_MONITOR})


@dataclass(frozen=True)
class MissionEvent:
    time: float
    kind: str
    patient_id: int | None = None
    task_label: str | None = None


@dataclass(frozen=True)
class MissionTrace:
    policy: PolicyId
    condition: Condition
    trial_index: int
    events: tuple[MissionEvent, ...]
    duration: float
    aborted: bool


@dataclass(frozen=True)
class PlatformParams:
    """Kinematics, service, and abort-rule constants."""

    cruise_speed: float = 500.0          # m/min
    service_time: float = 1.5            # minutes per intervention
    teleop_speed_factor: float = 0.35    # teleop runs this fraction of autonomous pace
    uncertainty_threshold: float = 400.0  # m^2 on the monitored covariance trace
    abort_grace: float = 2.0             # minutes over threshold before abort
    comm_timeout_teleop: float = 3.0     # minutes of continuous outage
    comm_timeout_auto: float = 6.0
    comm_timeout_dt: float = 12.0
    uncertainty_penalty: float = 0.5     # travel inflation per unit sqrt(variance)/ref
    reference_distance: float = 100.0    # meters
    alert_suppression: float = 0.5       # fraction of alerts the twin resolves itself
    horizon: float = 600.0               # hard mission cap, minutes
    assess_fraction: float = 0.4         # share of teleop service spent assessing
    alert_handling_time: float = 1.0     # minutes an alert keeps the operator engaged

    def comm_timeout_for(self, policy: PolicyId) -> float:
        if policy is PolicyId.PI1_TELEOP:
            return self.comm_timeout_teleop
        if policy is PolicyId.PI2_AUTO:
            return self.comm_timeout_auto
        return self.comm_timeout_dt


DEFAULT_PLATFORM_PARAMS = PlatformParams()


@dataclass(frozen=True)
class TwinState:
    """Snapshot of the synchronized world model at a decision point."""

    fused_pose: PoseEstimate
    remaining_plan: tuple[int, ...]
    patient_snapshot: dict[int, tuple[float, tuple[float, float]]]
    platform_healthy: bool


@dataclass
class OperatorView:
    """What the operator currently sees: pose, active task, open alerts."""

    pose: PoseEstimate | None = None
    task_label: str | None = None
    pending_alerts: int = 0

    def switch_task(self, label: str) -> bool:
        if label not in TASK_ALPHABET:
            raise ValueError(f"unknown task label {label!r}")
        if label == self.task_label:
            return False
        self.task_label = label
        return True


def travel_time(origin: tuple[float, float], target: tuple[float, float],
                pose_variance: float, accessibility: float,
                params: PlatformParams = DEFAULT_PLATFORM_PARAMS) -> float:
    """Leg duration in minutes.

    Base time distance/speed, inflated by pose uncertainty (sqrt of the
    covariance trace against a reference distance) and divided by the
    patient's accessibility.
    """
    if accessibility <= 0.0:
        raise ValueError("accessibility must be positive")
    distance = math.hypot(target[0] - origin[0], target[1] - origin[1])
    if distance == 0.0:
        return 0.0
    penalty = 1.0 + params.uncertainty_penalty * math.sqrt(pose_variance) / params.reference_distance
    return (distance / params.cruise_speed) * penalty / accessibility


def check_abort(twin: TwinState, elapsed_outage: float, elapsed_over_threshold: float,
                policy: PolicyId, params: PlatformParams = DEFAULT_PLATFORM_PARAMS) -> bool:
    """Abort rule: strict exceedance of the policy's timeout or grace period."""
    if elapsed_outage < 0.0 or elapsed_over_threshold < 0.0:
        raise ValueError("elapsed counters must be nonnegative")
    if elapsed_outage > params.comm_timeout_for(policy):
        return True
    if policy is not PolicyId.PI1_TELEOP and elapsed_over_threshold > params.abort_grace:
        return True
    return False


def monitored_trace(policy: PolicyId, delta: float, gps_valid: bool,
                    integrity_episode: bool,
                    loc: LocalizationParams = DEFAULT_LOCALIZATION_PARAMS) -> float:
    """Covariance trace watched by the abort monitor, per policy and regime."""
    inflation = loc.integrity_inflation if integrity_episode else 1.0
    if policy is PolicyId.PI1_TELEOP:
        return 2.0 * loc.gps_variance(delta)
    if policy is PolicyId.PI2_AUTO:
        return 2.0 * loc.auto_variance() * inflation
    return 2.0 * loc.fused_variance(delta, gps_valid=gps_valid, auto_inflation=inflation)


def nominal_trace(policy: PolicyId, delta: float,
                  loc: LocalizationParams = DEFAULT_LOCALIZATION_PARAMS) -> float:
    """Healthy-regime covariance trace used for travel planning."""
    return monitored_trace(policy, delta, gps_valid=True, integrity_episode=False, loc=loc)


# ---------------------------------------------------------------------------
# Interval helpers. All interval lists are sorted, disjoint [start, end) pairs.

def _intersect(a: tuple[tuple[float, float], ...],
               b: tuple[tuple[float, float], ...]) -> tuple[tuple[float, float], ...]:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def _merge(intervals: list[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    if not intervals:
        return ()
    intervals = sorted(intervals)
    merged = [intervals[0]]
    for start, end in intervals[1:]:
        last_start, last_end = merged[-1]
        if start <= last_end:
            merged[-1] = (last_start, max(last_end, end))
        else:
            merged.append((start, end))
    return tuple(merged)


def _complement(intervals: tuple[tuple[float, float], ...],
                horizon: float) -> tuple[tuple[float, float], ...]:
    out = []
    t = 0.0
    for start, end in intervals:
        if start > t:
            out.append((t, start))
        t = max(t, end)
    if t < horizon:
        out.append((t, horizon))
    return tuple(out)


def crossing_intervals(policy: PolicyId, delta: float,
                       outages: tuple[tuple[float, float], ...],
                       episodes: tuple[tuple[float, float], ...],
                       horizon: float,
                       params: PlatformParams = DEFAULT_PLATFORM_PARAMS,
                       loc: LocalizationParams = DEFAULT_LOCALIZATION_PARAMS,
                       ) -> tuple[tuple[float, float], ...]:
    """Maximal intervals where the monitored trace sits above the threshold.

    Evaluated over the four (gps up/down, episode on/off) regimes, so the
    result is correct for any parameter set, not just the defaults.
    """
    if policy is PolicyId.PI1_TELEOP:
        return ()
    theta = params.uncertainty_threshold
    no_outage = _complement(outages, horizon)
    no_episode = _complement(episodes, horizon)
    regimes = (
        (no_outage, no_episode, True, False),
        (no_outage, episodes, True, True),
        (outages, no_episode, False, False),
        (outages, episodes, False, True),
    )
    pieces: list[tuple[float, float]] = []
    for gps_part, ep_part, gps_valid, episode in regimes:
        if monitored_trace(policy, delta, gps_valid, episode, loc) > theta:
            pieces.extend(_intersect(gps_part, ep_part))
    return _merge(pieces)


# ---------------------------------------------------------------------------
# Trace assembly.

_EPS = 1e-9


class _TaskLog:
    """Chronological task_switch emitter backed by an OperatorView."""

    def __init__(self, view: OperatorView, events: list[MissionEvent]):
        self.view = view
        self.events = events

    def switch(self, label: str, time: float) -> None:
        if self.view.switch_task(label):
            self.events.append(MissionEvent(time, TASK_SWITCH, task_label=label))


def _make_twin(scenario: Scenario, remaining: tuple[int, ...],
               policy: PolicyId, delta: float,
               loc: LocalizationParams) -> TwinState:
    pose = PoseEstimate(
        position=scenario.base_position,
        covariance=np.eye(2) * (nominal_trace(policy, delta, loc) / 2.0),
        source="dt_fused" if policy is PolicyId.PI3_GEODT else
               ("gps" if policy is PolicyId.PI1_TELEOP else "auto"),
        valid=True,
    )
    snapshot = {p.id: (p.severity, p.position) for p in scenario.patients}
    return TwinState(fused_pose=pose, remaining_plan=remaining,
                     patient_snapshot=snapshot, platform_healthy=True)


def _first_abort_from_intervals(intervals, stamp_offset, twin, policy, params,
                                as_outage):
    """First abort time implied by interval durations, or None.

    Each interval is judged with check_abort on its full length; the abort
    is stamped `stamp_offset` minutes after the interval opens.
    """
    for start, end in intervals:
        duration = end - start
        if as_outage:
            tripped = check_abort(twin, duration, 0.0, policy, params)
        else:
            tripped = check_abort(twin, 0.0, duration, policy, params)
        if tripped:
            return start + stamp_offset
    return None


def run_mission(scenario: Scenario, policy: PolicyId,
                params: PlatformParams = DEFAULT_PLATFORM_PARAMS,
                weights: TriageWeights = DEFAULT_TRIAGE_WEIGHTS,
                stream: np.random.Generator | None = None,
                loc: LocalizationParams = DEFAULT_LOCALIZATION_PARAMS,
                error_rate: float = DEFAULT_OPERATOR_ERROR_RATE,
                trial_index: int = 0) -> MissionTrace:
    """Execute one mission and return its event trace.

    Stream consumption order is fixed: visit-plan draws (teleop only),
    outage schedule, integrity schedule, then alert-suppression draws
    (twin policy only). Identical inputs give bit-identical traces.
    """
    if stream is None:
        stream = np.random.default_rng(0)
    delta = scenario.condition.delta

    plan = plan_for_policy(scenario, policy, weights, stream, error_rate)
    profile = outage_schedule(delta, params.horizon, stream, loc)
    episodes = integrity_schedule(params.horizon, stream, loc).episodes
    crossings = crossing_intervals(policy, delta, profile.outages, episodes,
                                   params.horizon, params, loc)

    patients = {p.id: p for p in scenario.patients}
    twin = _make_twin(scenario, plan.order, policy, delta, loc)

    if policy is PolicyId.PI1_TELEOP:
        return _run_teleop(scenario, plan.order, patients, profile.outages,
                           params, loc, delta, twin, trial_index)
    return _run_supervised(scenario, policy, plan.order, patients,
                           profile.outages, crossings, params, loc, delta,
                           twin, stream, trial_index)


def _planned_leg_times(order, patients, base, policy, delta, params, loc):
    """(depart, arrive, intervene) times per planned visit, ignoring pauses."""
    trace_now = nominal_trace(policy, delta, loc)
    speed_scale = 1.0
    service = params.service_time
    if policy is PolicyId.PI1_TELEOP:
        speed_scale = 1.0 / params.teleop_speed_factor
        service = params.service_time / params.teleop_speed_factor
    t = 0.0
    pos = base
    legs = []
    for pid in order:
        patient = patients[pid]
        leg = travel_time(pos, patient.position, trace_now,
                          patient.accessibility, params) * speed_scale
        depart = t
        arrive = depart + leg
        intervene = arrive + service
        legs.append((pid, depart, arrive, intervene))
        t = intervene
        pos = patient.position
    return legs, t, service


def _run_supervised(scenario, policy, order, patients, outages, crossings,
                    params, loc, delta, twin, stream, trial_index):
    """Autonomous and twin-managed missions: no pauses, supervisory operator."""
    legs, natural_end, _ = _planned_leg_times(
        order, patients, scenario.base_position, policy, delta, params, loc)

    comm_abort = _first_abort_from_intervals(
        outages, params.comm_timeout_for(policy), twin, policy, params,
        as_outage=True)
    unc_abort = _first_abort_from_intervals(
        crossings, params.abort_grace, twin, policy, params,
        as_outage=False)

    candidates = [c for c in (comm_abort, unc_abort) if c is not None and c < natural_end]
    if natural_end > params.horizon:
        candidates.append(params.horizon)
    aborted = bool(candidates)
    terminal = min(candidates) if aborted else natural_end

    activity: list[MissionEvent] = []
    for pid, depart, arrive, intervene in legs:
        if depart > terminal:
            break
        activity.append(MissionEvent(depart, DEPART, patient_id=pid))
        if arrive <= terminal:
            activity.append(MissionEvent(arrive, ARRIVE, patient_id=pid))
        if intervene <= terminal:
            activity.append(MissionEvent(intervene, INTERVENE, patient_id=pid))

    # Supervisory operator: monitor baseline, react to link and uncertainty
    # alerts; the twin autonomously resolves a share of them.
    view = OperatorView()
    ops: list[MissionEvent] = []
    log = _TaskLog(view, ops)
    log.switch(TASK_MONITOR, 0.0)

    alert_times = sorted([s for s, _ in outages] + [s for s, _ in crossings])
    handled: list[float] = []
    for when in alert_times:
        suppressed = (policy is PolicyId.PI3_GEODT
                      and float(stream.uniform()) < params.alert_suppression)
        if suppressed:
            continue
        if when < terminal:
            handled.append(when)

    release: float | None = None
    for when in handled:
        if release is not None and release <= when:
            log.switch(TASK_MONITOR, release)
        view.pending_alerts += 1
        log.switch(TASK_ASSESS, when)
        ops.append(MissionEvent(when, OPERATOR_INTERVENTION))
        view.pending_alerts -= 1
        release = when + params.alert_handling_time
    if release is not None and release < terminal:
        log.switch(TASK_MONITOR, release)

    tail: list[MissionEvent] = []
    if aborted:
        warn = _TaskLog(view, tail)
        warn.switch(TASK_ASSESS, terminal)
        tail.append(MissionEvent(terminal, OPERATOR_INTERVENTION))
        tail.append(MissionEvent(terminal, ABORT))
    else:
        tail.append(MissionEvent(terminal, COMPLETE))

    events = sorted(activity + ops, key=lambda e: e.time) + tail
    return MissionTrace(policy=policy, condition=scenario.condition,
                        trial_index=trial_index, events=tuple(events),
                        duration=terminal, aborted=aborted)


class _TeleopAbort(Exception):
    def __init__(self, time: float):
        self.time = time


def _run_teleop(scenario, order, patients, outages, params, loc, delta,
                twin, trial_index):
    """Teleoperated mission: paused by outages, aborted by a long one.

    The operator flies every leg by hand (one control action per leg),
    walks through navigate/assess/intervene phases per visit, and switches
    to recovery whenever the link drops.
    """
    events: list[MissionEvent] = []
    view = OperatorView()
    log = _TaskLog(view, events)
    policy = PolicyId.PI1_TELEOP

    legs, _, service = _planned_leg_times(
        order, patients, scenario.base_position, policy, delta, params, loc)
    assess_dur = service * params.assess_fraction
    intervene_dur = service - assess_dur
    timeout = params.comm_timeout_teleop

    outage_idx = 0

    def do_work(t: float, work: float, resume_label: str) -> float:
        """Advance `work` active minutes from wall time t, pausing in outages."""
        nonlocal outage_idx
        while True:
            if work <= 0.0:
                return t
            if outage_idx < len(outages) and outages[outage_idx][0] <= t + _EPS:
                start, end = outages[outage_idx]
                log.switch(TASK_RECOVER, max(t, start))
                if check_abort(twin, end - start, 0.0, policy, params):
                    raise _TeleopAbort(start + timeout)
                t = end
                events.append(MissionEvent(t, OPERATOR_INTERVENTION))
                log.switch(resume_label, t)
                outage_idx += 1
                continue
            gap = (outages[outage_idx][0] - t) if outage_idx < len(outages) else math.inf
            if work <= gap:
                return t + work
            t += gap
            work -= gap

    t = 0.0
    aborted = False
    abort_time = math.inf
    try:
        for pid, depart, arrive, _ in legs:
            leg_work = arrive - depart
            events.append(MissionEvent(t, OPERATOR_INTERVENTION))
            log.switch(TASK_NAVIGATE, t)
            events.append(MissionEvent(t, DEPART, patient_id=pid))
            t = do_work(t, leg_work, TASK_NAVIGATE)
            events.append(MissionEvent(t, ARRIVE, patient_id=pid))
            log.switch(TASK_ASSESS, t)
            t = do_work(t, assess_dur, TASK_ASSESS)
            log.switch(TASK_INTERVENE, t)
            t = do_work(t, intervene_dur, TASK_INTERVENE)
            events.append(MissionEvent(t, INTERVENE, patient_id=pid))
    except _TeleopAbort as signal:
        aborted = True
        abort_time = signal.time

    terminal = abort_time if aborted else t
    if terminal > params.horizon:
        terminal = params.horizon
        aborted = True

    kept = [e for e in events if e.time <= terminal + _EPS]
    if aborted:
        kept.append(MissionEvent(terminal, ABORT))
    else:
        kept.append(MissionEvent(terminal, COMPLETE))
    return MissionTrace(policy=policy, condition=scenario.condition,
                        trial_index=trial_index, events=tuple(kept),
                        duration=terminal, aborted=aborted)
