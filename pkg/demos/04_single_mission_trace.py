"""Anatomy of one mission per policy.

Each mission is a time-ordered event log: departures, arrivals,
interventions, operator task switches and control actions, and a single
terminal event (complete or abort). The same patient field is flown under
all three policies at a high degradation level to show how their traces
differ.
"""

from medmission import (
    Condition,
    PolicyId,
    StreamPurpose,
    derive_stream,
    generate_scenario,
    run_mission,
    trial_metrics,
)

condition = Condition(0, 0.75, 5)
scenario = generate_scenario(condition, derive_stream(42, 0, 3, 0,
                                                      StreamPurpose.SCENARIO))

for policy in PolicyId:
    stream = derive_stream(42, 0, 3, policy.index, StreamPurpose.MISSION)
    trace = run_mission(scenario, policy, stream=stream)
    print(f"\n=== {policy.value} "
          f"(duration {trace.duration:.1f} min, aborted={trace.aborted}) ===")
    for e in trace.events:
        detail = ""
        if e.patient_id is not None:
            detail = f"patient {e.patient_id}"
        if e.task_label is not None:
            detail = f"task -> {e.task_label}"
        print(f"  {e.time:>7.2f}  {e.kind:<21s} {detail}")
    m = trial_metrics(trace, scenario)
    print(f"  metrics: served {m.served_count}/{m.total_patients}, "
          f"lambda_sw={m.lambda_sw:.4f}, lambda_int={m.lambda_int:.4f}, "
          f"workload={m.workload:.4f}")
