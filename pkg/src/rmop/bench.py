"""Baselines, guarantee calculators, brute-force oracles, and the experiment harness.

Everything a benchmark run needs around the planners: the uncoordinated
greedy baseline, the closed-form worst-case guarantee fractions, exact
max / max-min oracles for desk-scale instances, and a seeded trial runner
that emits plot-ready records. The oracles carry explicit size guards; they
exist to check the fast planners, not to scale.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .graph import MetricGraph, Path, Scenario, generate_scenario, load_scenario, resample_starts
from .reward import RewardModel, eval_team, eval_vertex_set, team_curvature, vertex_curvature
from .orienteering import OpSolverConfig, SizeGuardError
from .planner import Solution, solve_rmop, solve_sga
from .attack import (AttackOutcome, greedy_attack, partial_worst_attack, random_attack,
                     worst_case_attack)

PATH_PRODUCT_GUARD = 10 ** 7
TABLE_SIZE_GUARD = 20

K_F_SURROGATE_NOTE = (
    "k_f estimated with the returned solution's paths as the ground set; the true "
    "ground set of all feasible paths is exponential, so fractions are reported "
    "diagnostics, not certified constants")

PLANNER_NAMES = ("rmop", "sga", "ng")
ATTACK_MODELS = ("worst", "greedy", "random", "partial")


def naive_greedy_baseline(scenario: Scenario) -> list[Path]:
    """Uncoordinated baseline: every robot chases rewards, ignoring travel cost.

    Each robot independently ranks vertices by their standalone reward (ties
    by id) and repeatedly appends the first unvisited one that still fits
    the budget, stopping when a full scan adds nothing. No masking between
    robots, so identical starts produce identical paths.
    """
    model = RewardModel.from_scenario(scenario)
    graph = scenario.graph
    dist = graph.distance.tolist()
    order = sorted(range(graph.n), key=lambda v: (-model.singleton(v), v))
    paths = []
    for robot, start in enumerate(scenario.starts):
        route = [start]
        cost = 0.0
        visited = {start}
        while True:
            appended = False
            for v in order:
                if v in visited:
                    continue
                step = dist[route[-1]][v]
                if cost + step <= scenario.budget:
                    route.append(v)
                    cost += step
                    visited.add(v)
                    appended = True
                    break
            if not appended:
                break
        paths.append(Path(robot=robot, vertices=tuple(route), cost=cost))
    return paths


def _check_curvatures(k_f: float, k_g: float) -> None:
    for name, k in (("k_f", k_f), ("k_g", k_g)):
        if not 0.0 <= k < 1.0:
            raise ValueError(f"{name} must be non-negative and strictly less than 1, "
                             f"got {k}; at curvature 1 the guarantee degenerates")


def sga_bound(k_f: float, k_g: float, eta: float) -> float:
    """Guaranteed fraction of the coordination optimum the sequential planner keeps."""
    _check_curvatures(k_f, k_g)
    if eta < 1.0:
        raise ValueError(f"eta must be >= 1, got {eta}")
    return 1.0 / (1.0 / (1.0 - k_g) + eta / (1.0 - k_f))


def rmop_bound(k_f: float, k_g: float, eta: float, alpha: int, n_robots: int) -> float:
    """Guaranteed fraction of the optimal worst-case value the robust planner keeps."""
    _check_curvatures(k_f, k_g)
    if eta < 1.0:
        raise ValueError(f"eta must be >= 1, got {eta}")
    if not 0 < alpha < n_robots:
        raise ValueError(f"alpha must satisfy 0 < alpha < n_robots, got {alpha} of {n_robots}")
    numerator = max(1.0 - k_f, 1.0 / (alpha + 1), 1.0 / (n_robots - alpha))
    return numerator * sga_bound(k_f, k_g, eta)


@dataclass(frozen=True)
class BoundReport:
    k_f: float
    k_g: float
    eta: float
    alpha: int
    n_robots: int
    robust_fraction: float
    sga_fraction: float
    k_f_ground_set_note: str = K_F_SURROGATE_NOTE


def bound_report(model: RewardModel, solution: Solution, eta: float,
                 alpha: int, n_robots: int) -> BoundReport:
    """Compute both guarantee fractions for a solved instance.

    Raises ValueError when either curvature estimate reaches 1 (fully
    redundant paths or vertices), where the fractions are undefined.
    """
    k_g = vertex_curvature(model).value
    k_f = team_curvature(model, solution.paths).value
    return BoundReport(
        k_f=k_f, k_g=k_g, eta=eta, alpha=alpha, n_robots=n_robots,
        robust_fraction=rmop_bound(k_f, k_g, eta, alpha, n_robots),
        sga_fraction=sga_bound(k_f, k_g, eta),
    )


def _subset_reward_table(model: RewardModel) -> list[float]:
    n = model.n
    if n > TABLE_SIZE_GUARD:
        raise SizeGuardError(f"subset table needs 2^{n} entries; guard is 2^{TABLE_SIZE_GUARD}")
    table = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        table[mask] = eval_vertex_set(model, [v for v in range(n) if mask >> v & 1])
    return table


def enumerate_feasible_paths(graph: MetricGraph, start: int, budget: float,
                             max_paths: int = 200_000) -> list[tuple[tuple[int, ...], int, float]]:
    """All simple rooted paths within budget as (vertices, bitmask, cost)."""
    dist = graph.distance.tolist()
    n = graph.n
    out: list[tuple[tuple[int, ...], int, float]] = []
    seq = [start]
    visited = [False] * n
    visited[start] = True

    def dfs(cost: float, mask: int) -> None:
        if len(out) > max_paths:
            raise SizeGuardError(f"more than {max_paths} feasible paths from vertex {start}")
        out.append((tuple(seq), mask, cost))
        last = seq[-1]
        for v in range(n):
            if visited[v]:
                continue
            step = dist[last][v]
            if cost + step > budget:
                continue
            visited[v] = True
            seq.append(v)
            dfs(cost + step, mask | (1 << v))
            seq.pop()
            visited[v] = False

    dfs(0.0, 1 << start)
    return out


def _feasible_path_sets(scenario: Scenario, max_product: int):
    per_robot = [
        enumerate_feasible_paths(scenario.graph, start, scenario.budget)
        for start in scenario.starts
    ]
    product = 1
    for options in per_robot:
        product *= len(options)
        if product > max_product:
            raise SizeGuardError(
                f"feasible path tuples exceed the guard of {max_product}")
    return per_robot


def brute_force_mop(scenario: Scenario,
                    max_product: int = PATH_PRODUCT_GUARD) -> tuple[float, tuple[Path, ...]]:
    """Exact team optimum with no adversary, by full enumeration."""
    model = RewardModel.from_scenario(scenario)
    table = _subset_reward_table(model)
    per_robot = _feasible_path_sets(scenario, max_product)
    n = scenario.n_robots
    best_val = -math.inf
    best_combo: Optional[tuple] = None

    def rec(i: int, mask: int, chosen: tuple) -> None:
        nonlocal best_val, best_combo
        if i == n:
            val = table[mask]
            if val > best_val:
                best_val = val
                best_combo = chosen
            return
        for entry in per_robot[i]:
            rec(i + 1, mask | entry[1], chosen + (entry,))

    rec(0, 0, ())
    witness = tuple(
        Path(robot=i, vertices=entry[0], cost=entry[2]) for i, entry in enumerate(best_combo)
    )
    return best_val, witness


def brute_force_rmop(scenario: Scenario,
                     max_product: int = PATH_PRODUCT_GUARD) -> tuple[float, tuple[Path, ...]]:
    """Exact optimal worst-case value: max over path tuples of the min over
    removals of exactly alpha robots. Monotonicity makes size-alpha removals
    sufficient. Guarded to tiny instances."""
    alpha = scenario.alpha
    if alpha == 0:
        return brute_force_mop(scenario, max_product=max_product)
    model = RewardModel.from_scenario(scenario)
    table = _subset_reward_table(model)
    per_robot = _feasible_path_sets(scenario, max_product)
    n = scenario.n_robots
    keep_sets = [
        [i for i in range(n) if i not in removed]
        for removed in combinations(range(n), alpha)
    ]
    best_val = -math.inf
    best_combo: Optional[tuple] = None

    def rec(i: int, masks: tuple, chosen: tuple) -> None:
        nonlocal best_val, best_combo
        if i == n:
            worst = math.inf
            for keep in keep_sets:
                m = 0
                for k in keep:
                    m |= masks[k]
                val = table[m]
                if val < worst:
                    worst = val
            if worst > best_val:
                best_val = worst
                best_combo = chosen
            return
        for entry in per_robot[i]:
            rec(i + 1, masks + (entry[1],), chosen + (entry,))

    rec(0, (), ())
    witness = tuple(
        Path(robot=i, vertices=entry[0], cost=entry[2]) for i, entry in enumerate(best_combo)
    )
    return best_val, witness


@dataclass(frozen=True)
class AttackSpec:
    model: str
    sizes: tuple[int, ...]
    planned_alpha: Optional[int] = None


@dataclass(frozen=True)
class ExperimentSpec:
    """Parsed experiment document: scenario source, planners, attacks, trials."""

    planners: tuple[str, ...]
    attacks: tuple[AttackSpec, ...]
    trials: int
    seed: int
    subroutine: str = "gcb"
    scenario_params: Optional[dict] = None
    scenario_path: Optional[str] = None

    @classmethod
    def from_document(cls, doc: dict) -> "ExperimentSpec":
        allowed = {"scenario", "planners", "attacks", "trials", "seed", "subroutine"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValueError(f"unknown experiment keys {sorted(unknown)}")
        for key in ("scenario", "planners", "attacks", "trials", "seed"):
            if key not in doc:
                raise ValueError(f"experiment spec is missing key '{key}'")
        planners = tuple(doc["planners"])
        for p in planners:
            if p not in PLANNER_NAMES:
                raise ValueError(f"unknown planner {p!r}; expected one of {PLANNER_NAMES}")
        subroutine = doc.get("subroutine", "gcb")
        if subroutine not in ("exact", "gcb"):
            raise ValueError(f"unknown subroutine {subroutine!r}")
        attacks = []
        for entry in doc["attacks"]:
            extra = set(entry) - {"model", "sizes", "planned_alpha"}
            if extra:
                raise ValueError(f"unknown attack keys {sorted(extra)}")
            attack_model = entry["model"]
            if attack_model not in ATTACK_MODELS:
                raise ValueError(f"unknown attack model {attack_model!r}")
            planned = entry.get("planned_alpha")
            if attack_model == "partial" and planned is None:
                raise ValueError("partial attacks require 'planned_alpha'")
            attacks.append(AttackSpec(model=attack_model,
                                      sizes=tuple(int(s) for s in entry["sizes"]),
                                      planned_alpha=planned))
        scenario = doc["scenario"]
        if "path" in scenario:
            if set(scenario) != {"path"}:
                raise ValueError("scenario with 'path' must contain only 'path'")
            params, path = None, scenario["path"]
        else:
            params, path = dict(scenario), None
        trials = int(doc["trials"])
        if trials < 0:
            raise ValueError("trials must be >= 0")
        return cls(planners=planners, attacks=tuple(attacks), trials=trials,
                   seed=int(doc["seed"]), subroutine=subroutine,
                   scenario_params=params, scenario_path=path)

    def base_scenario(self) -> Scenario:
        if self.scenario_path is not None:
            with open(self.scenario_path, "rb") as fh:
                return load_scenario(fh.read())
        p = dict(self.scenario_params)
        allowed = {"vertices", "robots", "alpha", "budget", "layout", "bumps", "seed",
                   "reward_kind"}
        unknown = set(p) - allowed
        if unknown:
            raise ValueError(f"unknown scenario params {sorted(unknown)}")
        return generate_scenario(
            n_vertices=int(p["vertices"]), n_robots=int(p["robots"]),
            alpha=int(p.get("alpha", 0)), budget=float(p["budget"]),
            layout=p.get("layout", "grid"), bumps=p.get("bumps", 3),
            seed=int(p.get("seed", 0)), reward_kind=p.get("reward_kind", "modular"))


@dataclass(frozen=True)
class ExperimentRecord:
    trial: int
    planner: str
    attack_model: str
    attack_size: int
    f_S: float
    residual: float
    plan_ms: float
    loop_iters: int


def _derived_seed(*entropy: int) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def _ng_solution(scenario: Scenario, model: RewardModel) -> Solution:
    paths = tuple(naive_greedy_baseline(scenario))
    return Solution(
        paths=paths,
        s1_robots=frozenset(),
        s2_robots=frozenset(range(len(paths))),
        team_reward=eval_team(model, paths),
        loop_iterations=0,
        per_path_rewards=tuple(eval_vertex_set(model, p.vertices) for p in paths),
    )


def plan(planner: str, scenario: Scenario, solver: OpSolverConfig) -> Solution:
    """Run one named planner on a scenario."""
    if planner == "rmop":
        return solve_rmop(scenario, solver)
    if planner == "sga":
        return solve_sga(scenario, solver)
    if planner == "ng":
        return _ng_solution(scenario, RewardModel.from_scenario(scenario))
    raise ValueError(f"unknown planner {planner!r}")


def _apply_attack(attack: AttackSpec, size: int, model: RewardModel, solution: Solution,
                  seed: int) -> AttackOutcome:
    if attack.model == "worst":
        return worst_case_attack(model, solution, size)
    if attack.model == "greedy":
        return greedy_attack(model, solution, size)
    if attack.model == "random":
        return random_attack(model, solution, size, seed=seed)
    return partial_worst_attack(model, solution, attack.planned_alpha, size)


def run_experiment(spec: ExperimentSpec, measure_time: bool = True) -> list[ExperimentRecord]:
    """Seeded trial sweep: resample starts, plan, attack, record.

    Planning for non-partial attacks uses the attack size as the planner's
    assumed loss count (the robust planner re-plans per size); partial
    attacks plan once at `planned_alpha` and sweep weaker adversaries.
    Everything except wall-clock `plan_ms` is a pure function of the spec;
    pass measure_time=False to zero the timing column for byte-stable output.
    """
    base = spec.base_scenario()
    solver = OpSolverConfig(method=spec.subroutine)
    records: list[ExperimentRecord] = []
    for trial in range(spec.trials):
        scenario_t = resample_starts(base, _derived_seed(spec.seed, trial, 101))
        model = RewardModel.from_scenario(scenario_t)
        plan_cache: dict[tuple[str, int], tuple[Solution, float]] = {}

        def planned(planner: str, alpha: int) -> tuple[Solution, float]:
            # sga/ng ignore alpha; cache them under one key
            key = (planner, alpha if planner == "rmop" else -1)
            if key not in plan_cache:
                sc = scenario_t.with_alpha(alpha) if planner == "rmop" else scenario_t
                t0 = time.perf_counter()
                solution = plan(planner, sc, solver)
                elapsed = (time.perf_counter() - t0) * 1000.0 if measure_time else 0.0
                plan_cache[key] = (solution, elapsed)
            return plan_cache[key]

        for a_idx, attack in enumerate(spec.attacks):
            for size in attack.sizes:
                plan_alpha = attack.planned_alpha if attack.model == "partial" else size
                for planner in spec.planners:
                    solution, elapsed = planned(planner, plan_alpha)
                    seed = _derived_seed(spec.seed, trial, 202, a_idx, size)
                    outcome = _apply_attack(attack, size, model, solution, seed)
                    records.append(ExperimentRecord(
                        trial=trial, planner=planner, attack_model=attack.model,
                        attack_size=size, f_S=solution.team_reward,
                        residual=outcome.residual, plan_ms=elapsed,
                        loop_iters=solution.loop_iterations))
    return records


CSV_COLUMNS = ("trial", "planner", "attack_model", "attack_size", "f_S", "residual",
               "plan_ms", "loop_iters")


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([r.trial, r.planner, r.attack_model, r.attack_size,
                         repr(r.f_S), repr(r.residual), repr(r.plan_ms), r.loop_iters])
    return buf.getvalue()


def summarize(records: Sequence[ExperimentRecord]) -> dict:
    """Per (planner, attack model, size) mean and variance of residuals."""
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for r in records:
        groups.setdefault((r.planner, r.attack_model, r.attack_size), []).append(r)
    out = []
    for (planner, attack_model, size), rs in sorted(groups.items()):
        residuals = np.array([r.residual for r in rs])
        rewards = np.array([r.f_S for r in rs])
        out.append({
            "planner": planner,
            "attack_model": attack_model,
            "attack_size": size,
            "trials": len(rs),
            "mean_residual": float(residuals.mean()),
            "variance_residual": float(residuals.var()),
            "mean_f_S": float(rewards.mean()),
        })
    return {"groups": out}


def summary_to_json(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True, indent=2) + "\n"
