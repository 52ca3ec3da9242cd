"""Run all four protocols on the same deployments and check the directional claims.

This is what ``wmsnroute run`` followed by ``wmsnroute compare`` does, in one
script. Each seed gives one deployment that every protocol shares.

    python3 demos/protocol_shootout.py [n_seeds]
"""
import sys

from wmsnroute.cli import compare_rows, execute_plan, verdict_line
from wmsnroute.metrics import read_csv
from wmsnroute.scenario import ExperimentPlan

n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 5
plan = ExperimentPlan.from_dict({
    "topologies": [{"n": 30}, {"kind": "holes", "n": 50,
                               "holes": [[250, 45, 40], [250, 155, 40]]}],
    "seeds": list(range(1, n_seeds + 1)),
    "energy": {"initial_energy": 10.0},
})
out = execute_plan(plan)
rows = read_csv(out.metrics_csv)
table, verdicts = compare_rows(rows)

print(f"{'topology':<11}{'proto':<7}{'GED %':>8}{'std %':>8}{'delay ms':>10}{'loss %':>8}"
      f"{'relays':>8}")
for r in table:
    print(f"{r['topology']:<11}{r['protocol']:<7}{r['ged_mean_pct']:8.2f}{r['ged_std_pct']:8.2f}"
          f"{1000 * r['delay_mean_s']:10.2f}{r['loss_pct']:8.2f}{r['relays_used']:8.1f}")
print()
for v in verdicts:
    print(verdict_line(v))
