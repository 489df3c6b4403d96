"""The full experimental protocol, end to end.

Runs the default 15,000-mission sweep (5 degradation levels x 4 patient
loads x 3 policies x 250 trials, fixed seed), prints the policy rollup
with per-policy delay tails, and shows the failure-rate response to
degradation. With an --out argument it also writes the full report
bundle (trials, summary, rollup, pareto, manifest).
"""

import sys
import time
from collections import defaultdict

from medmission import SweepConfig, run_sweep
from medmission.cli import emit_reports

config = SweepConfig()
print(f"running {config.total_missions:,} missions (seed {config.master_seed})...")
started = time.perf_counter()
result = run_sweep(config)
print(f"done in {time.perf_counter() - started:.1f}s\n")

print(f"{'policy':<12} {'delay':>8} {'rho':>7} {'fail':>7} {'load':>8} "
      f"{'miss.time':>10} {'P90':>7} {'P95':>7}")
for r in result.rollups:
    print(f"{r.policy.value:<12} {r.t_int_mean:>8.2f} {r.rho:>7.3f} "
          f"{r.r_fail:>7.3f} {r.w_mean:>8.4f} {r.mission_time:>10.1f} "
          f"{r.delay_p90:>7.1f} {r.delay_p95:>7.1f}")

print("\nfailure rate by degradation level:")
cells = defaultdict(list)
for rec in result.records:
    cells[(rec.policy, rec.delta)].append(rec.metrics.aborted)
print(f"{'policy':<12}" + "".join(f"{d:>8.2f}" for d in config.degradation_levels))
for policy in config.policies:
    rates = [sum(cells[(policy, d)]) / len(cells[(policy, d)])
             for d in config.degradation_levels]
    print(f"{policy.value:<12}" + "".join(f"{r:>8.3f}" for r in rates))

if len(sys.argv) > 1:
    outdir = sys.argv[1]
    paths = emit_reports(result, "csv", outdir)
    print("\nwrote:", ", ".join(str(p) for p in paths))
