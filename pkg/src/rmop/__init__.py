"""Budget-limited multi-robot path planning that survives worst-case robot loss.

Plan paths for N robots on a metric graph, each within a travel budget, so
that the team reward remaining after an adversary removes the worst `alpha`
robots is provably close to the best achievable. Ships exact oracles and
bound calculators for verification, attack models for evaluation, and a
seeded benchmark harness.
"""

from .graph import (AREA_SIDE, GaussianBump, MetricGraph, MetricReport, Path, Scenario,
                    ScenarioError, Vertex, dump_scenario, generate_scenario, load_scenario,
                    metric_report_from_document, path_cost, resample_starts,
                    scenario_from_document, scenario_to_document, verify_metric)
from .reward import (CurvatureEstimate, IncrementalEval, RewardError, RewardModel,
                     curvature, eval_team, eval_vertex_set, marginal, team_curvature,
                     vertex_curvature)
from .orienteering import (EXACT_SIZE_LIMIT, GCB_ETA, OpSolverConfig, RouteEstimate,
                           SizeGuardError, cheapest_insertion, solve_op, solve_op_exact,
                           solve_op_gcb)
from .planner import (PlannerLoopError, SgaTrace, Solution, check_solution, sga,
                      solve_rmop, solve_sga)
from .attack import (AttackOutcome, greedy_attack, partial_worst_attack, random_attack,
                     worst_case_attack)
from .bench import (AttackSpec, BoundReport, ExperimentRecord, ExperimentSpec,
                    bound_report, brute_force_mop, brute_force_rmop,
                    enumerate_feasible_paths, naive_greedy_baseline, plan, records_to_csv,
                    rmop_bound, run_experiment, sga_bound, summarize, summary_to_json)

__version__ = "0.1.0"
