#!/usr/bin/env python3
"""Sweep attack sizes on the benchmark map and compare planner residuals.

Reproduces the robustness trend: the robust planner gives up a little
reward when few robots are lost and pulls far ahead as losses grow, while
the uncoordinated baseline trails everywhere.

Usage:
  python scripts/run_crossover.py --trials 20 --seed 7 --out-csv crossover.csv
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rmop.bench import ExperimentSpec, records_to_csv, run_experiment, summarize, summary_to_json


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--vertices", type=int, default=96)
    parser.add_argument("--robots", type=int, default=10)
    parser.add_argument("--budget", type=float, default=60.0)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--scenario-seed", type=int, default=0)
    parser.add_argument("--alphas", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6, 7, 8])
    parser.add_argument("--out-csv", default=None)
    parser.add_argument("--out-summary", default=None)
    args = parser.parse_args()

    doc = {
        "scenario": {"vertices": args.vertices, "robots": args.robots,
                     "budget": args.budget, "layout": "grid", "bumps": 3,
                     "seed": args.scenario_seed},
        "planners": ["rmop", "sga", "ng"],
        "attacks": [{"model": "worst", "sizes": args.alphas},
                    {"model": "greedy", "sizes": args.alphas},
                    {"model": "random", "sizes": args.alphas}],
        "trials": args.trials,
        "seed": args.seed,
    }
    spec = ExperimentSpec.from_document(doc)
    records = run_experiment(spec)
    summary = summarize(records)

    means = {(g["planner"], g["attack_model"], g["attack_size"]): g["mean_residual"]
             for g in summary["groups"]}
    for attack in ("worst", "greedy", "random"):
        print(f"\nmean residual after {attack} attack ({args.trials} trials)")
        print(f"{'alpha':>5} {'rmop':>10} {'sga':>10} {'ng':>10}")
        for a in args.alphas:
            print(f"{a:>5} {means[('rmop', attack, a)]:>10.1f} "
                  f"{means[('sga', attack, a)]:>10.1f} {means[('ng', attack, a)]:>10.1f}")

    if args.out_csv:
        Path(args.out_csv).write_text(records_to_csv(records), newline="")
        print(f"\nwrote {len(records)} records to {args.out_csv}")
    if args.out_summary:
        Path(args.out_summary).write_text(summary_to_json(summary))
        print(f"wrote summary to {args.out_summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
