"""From trial records to metric vectors, dominance, and a Pareto view.

A reduced sweep (2 degradation levels x 2 loads x 40 trials) is enough to
see the structure: per-cell metric vectors, the strict component-wise
dominance relation on the minimization form [delay, 1-rho, fail, load],
and the non-dominated set in the delay/failure plane.
"""

from medmission import (
    PolicyId,
    SweepConfig,
    dominates,
    metric_vector,
    run_sweep,
)

config = SweepConfig(degradation_levels=(0.25, 0.75), patient_loads=(10, 20),
                     trials_per_condition=40)
result = run_sweep(config)

vectors = {}
for policy in config.policies:
    trials = [r.metrics for r in result.records if r.policy is policy]
    vectors[policy] = metric_vector(trials)
    v = vectors[policy]
    print(f"{policy.value}: delay={v.t_int_mean:7.2f}  rho={v.rho:.3f}  "
          f"fail={v.r_fail:.3f}  workload={v.w_mean:.4f}")

print("\npairwise dominance (row dominates column?):")
names = list(vectors)
header = "".join(f"{p.value[:3]:>8}" for p in names)
print(f"{'':>10}{header}")
for a in names:
    row = "".join(f"{str(dominates(vectors[a], vectors[b])):>8}" for b in names)
    print(f"{a.value:>10}{row}")

print("\npooled Pareto points (x=delay, y=failure, size=effective success):")
front = set(id(p) for p in result.front_pooled)
for p in result.pareto_pooled:
    marker = "*" if id(p) in front else " "
    print(f" {marker} {p.policy.value:<10} x={p.x:7.2f}  y={p.y:.3f}  "
          f"size={p.size:.3f}")
print("(* = on the non-dominated front)")
