#!/usr/bin/env python3
"""Measure planning time as the map and the team grow.

Times the robust planner and the plain sequential planner (both on the
cost-benefit greedy subroutine) over increasing vertex counts and robot
counts, reporting the median of several seeded runs.

Usage:
  python scripts/run_runtime_scaling.py --runs 5
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rmop.graph import generate_scenario, resample_starts
from rmop.orienteering import OpSolverConfig
from rmop.planner import solve_rmop, solve_sga


def median_times(n_vertices, n_robots, alpha, runs):
    cfg = OpSolverConfig(method="gcb")
    base = generate_scenario(n_vertices, n_robots, alpha, 60.0, layout="grid",
                             bumps=3, seed=13)
    sga_times, rmop_times = [], []
    for run in range(runs):
        scenario = resample_starts(base, 1000 + run)
        t0 = time.perf_counter()
        solve_sga(scenario, cfg)
        sga_times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        solve_rmop(scenario, cfg)
        rmop_times.append(time.perf_counter() - t0)
    return statistics.median(sga_times), statistics.median(rmop_times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=5)
    parser.add_argument("--vertex-sweep", type=int, nargs="+", default=[25, 50, 96])
    parser.add_argument("--robot-sweep", type=int, nargs="+", default=[4, 7, 10])
    args = parser.parse_args()

    print(f"vertex sweep (10 robots, alpha 3, median of {args.runs} runs)")
    print(f"{'|V|':>5} {'sga [ms]':>10} {'rmop [ms]':>10}")
    for n in args.vertex_sweep:
        sga_t, rmop_t = median_times(n, 10, 3, args.runs)
        print(f"{n:>5} {sga_t * 1e3:>10.1f} {rmop_t * 1e3:>10.1f}")

    print(f"\nrobot sweep (96 vertices, alpha 3, median of {args.runs} runs)")
    print(f"{'N':>5} {'sga [ms]':>10} {'rmop [ms]':>10}")
    for n_robots in args.robot_sweep:
        sga_t, rmop_t = median_times(96, n_robots, 3, args.runs)
        print(f"{n_robots:>5} {sga_t * 1e3:>10.1f} {rmop_t * 1e3:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
