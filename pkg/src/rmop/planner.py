"""Team planners: sequential greedy assignment and the robust two-set planner.

The robust planner guards against the worst-case loss of `alpha` robots by
splitting the team: a redundancy set of the alpha individually best
independent paths, and a coverage set planned sequentially for the rest. An
outer loop enforces the invariant that every redundancy path individually
outscores every coverage path, swapping better coverage paths into the
candidate pool until it holds. With deterministic subroutines the loop
almost always settles in one pass, but the machinery is kept for the
approximate solver, which can surface a better path on the masked problem
than it found on the clean one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .graph import MetricGraph, Path, Scenario, path_cost
from .reward import RewardModel, eval_team, eval_vertex_set
from .orienteering import OpSolverConfig, solve_op

LOOP_CAP_PER_ROBOT = 10

INVARIANT_TOL = 1e-9


class PlannerLoopError(RuntimeError):
    """The reassignment loop exceeded its hard cap; indicates a solver bug."""


@dataclass(frozen=True)
class SgaTrace:
    """Per-step diagnostics of a sequential greedy run."""

    order: tuple[int, ...]
    gains: tuple[float, ...]
    masked_counts: tuple[int, ...]


@dataclass(frozen=True)
class Solution:
    """Paths for every robot plus the redundancy/coverage split and diagnostics."""

    paths: tuple[Path, ...]
    s1_robots: frozenset[int]
    s2_robots: frozenset[int]
    team_reward: float
    loop_iterations: int
    per_path_rewards: tuple[float, ...]
    loop_history: tuple[tuple[float, ...], ...] = ()

    @property
    def n_robots(self) -> int:
        return len(self.paths)

    def path_of(self, robot: int) -> Path:
        return self.paths[robot]


def sga(graph: MetricGraph, model: RewardModel, starts: Sequence[int], budget: float,
        solver: OpSolverConfig, robots: Optional[Sequence[int]] = None,
        ) -> tuple[tuple[Path, ...], SgaTrace]:
    """Plan robots one at a time, zeroing the rewards each path collects.

    Robots are served in the order given. After each path is found, its
    vertices are masked so later robots only chase what is still uncovered.
    Trace gains are the true team-reward increments; masked counts record
    how many vertices were already masked when each robot planned.
    """
    if robots is None:
        robots = list(range(len(starts)))
    if len(robots) != len(starts):
        raise ValueError("robots and starts must have equal length")
    masked = model
    paths = []
    gains = []
    masked_counts = []
    collected: set[int] = set()
    before = 0.0
    for robot, start in zip(robots, starts):
        masked_counts.append(len(masked.masked))
        path = solve_op(graph, masked, start, budget, solver, robot=robot)
        paths.append(path)
        collected.update(path.vertices)
        after = eval_vertex_set(model, collected)
        gains.append(after - before)
        before = after
        masked = masked.with_masked(path.vertices)
    trace = SgaTrace(order=tuple(robots), gains=tuple(gains), masked_counts=tuple(masked_counts))
    return tuple(paths), trace


def _individual_reward(model: RewardModel, path: Path) -> float:
    return eval_vertex_set(model, path.vertices)


def _wrap_sga_as_solution(model: RewardModel, paths: Sequence[Path]) -> Solution:
    paths = tuple(paths)
    return Solution(
        paths=paths,
        s1_robots=frozenset(),
        s2_robots=frozenset(p.robot for p in paths),
        team_reward=eval_team(model, paths),
        loop_iterations=0,
        per_path_rewards=tuple(_individual_reward(model, p) for p in paths),
    )


def solve_sga(scenario: Scenario, solver: OpSolverConfig) -> Solution:
    """Plain sequential planning for the whole team; no redundancy set."""
    model = RewardModel.from_scenario(scenario)
    paths, _ = sga(scenario.graph, model, scenario.starts, scenario.budget, solver)
    return _wrap_sga_as_solution(model, paths)


def solve_rmop(scenario: Scenario, solver: OpSolverConfig,
               mask_s1_vertices: bool = False) -> Solution:
    """Plan a team that is robust to losing the worst `alpha` of its robots.

    First solves the single-robot problem independently for everyone, then
    loops: take the alpha individually best paths as the redundancy set,
    plan the rest sequentially, and stop once no sequential path outscores
    the weakest redundancy path (strictly better ones replace the losers'
    pool entries and the loop repeats). With alpha = 0 this reduces to the
    plain sequential planner.

    `mask_s1_vertices` is a non-standard coordination variant that also
    zeroes the redundancy set's vertices before the sequential stage; it is
    off by default and changes the analysis, so use it only for experiments.
    """
    model = RewardModel.from_scenario(scenario)
    graph = scenario.graph
    n = scenario.n_robots
    alpha = scenario.alpha
    if not 0 <= alpha < n:
        raise ValueError(f"alpha must satisfy 0 <= alpha < {n}, got {alpha}")

    if alpha == 0:
        return solve_sga(scenario, solver)

    pool: list[Path] = [
        solve_op(graph, model, scenario.starts[i], scenario.budget, solver, robot=i)
        for i in range(n)
    ]

    cap = LOOP_CAP_PER_ROBOT * n
    iterations = 0
    history: list[tuple[float, ...]] = []
    while True:
        iterations += 1
        if iterations > cap:
            raise PlannerLoopError(
                f"reassignment loop exceeded {cap} iterations; pool rewards {history[-1]}")
        rewards = [_individual_reward(model, p) for p in pool]
        history.append(tuple(rewards))
        order = sorted(range(n), key=lambda i: (-rewards[i], i))
        s1 = order[:alpha]
        rest = sorted(order[alpha:])

        sga_model = model
        if mask_s1_vertices:
            claimed: set[int] = set()
            for i in s1:
                claimed.update(pool[i].vertices)
            sga_model = model.with_masked(claimed)
        s2_paths, _ = sga(graph, sga_model, [scenario.starts[j] for j in rest],
                          scenario.budget, solver, robots=rest)

        min_s1 = min(rewards[i] for i in s1)
        replaced = False
        for path in s2_paths:
            if _individual_reward(model, path) > min_s1:
                pool[path.robot] = path
                replaced = True
        if not replaced:
            by_robot = {p.robot: p for p in s2_paths}
            final_paths = tuple(
                pool[i] if i in s1 else by_robot[i] for i in range(n)
            )
            return Solution(
                paths=final_paths,
                s1_robots=frozenset(s1),
                s2_robots=frozenset(rest),
                team_reward=eval_team(model, final_paths),
                loop_iterations=iterations,
                per_path_rewards=tuple(_individual_reward(model, p) for p in final_paths),
                loop_history=tuple(history),
            )


def check_solution(scenario: Scenario, solution: Solution, tol: float = INVARIANT_TOL) -> list[str]:
    """Re-verify every solution invariant; returns violations as strings."""
    model = RewardModel.from_scenario(scenario)
    graph = scenario.graph
    n = scenario.n_robots
    problems: list[str] = []

    if len(solution.paths) != n:
        problems.append(f"expected {n} paths, found {len(solution.paths)}")
        return problems

    evaluable = True
    for i, path in enumerate(solution.paths):
        if path.robot != i:
            problems.append(f"path {i} is labeled for robot {path.robot}")
        if not path.vertices:
            problems.append(f"robot {i} has an empty path")
            evaluable = False
            continue
        if path.vertices[0] != scenario.starts[i]:
            problems.append(
                f"robot {i} path starts at {path.vertices[0]}, expected {scenario.starts[i]}")
        if len(set(path.vertices)) != len(path.vertices):
            problems.append(f"robot {i} path repeats a vertex")
            evaluable = False
            continue
        bad_ids = [v for v in path.vertices if not 0 <= v < graph.n]
        if bad_ids:
            problems.append(f"robot {i} path visits unknown vertex {bad_ids[0]}")
            evaluable = False
            continue
        true_cost = path_cost(graph, path.vertices)
        if abs(true_cost - path.cost) > tol:
            problems.append(
                f"robot {i} stored cost {path.cost} differs from recomputed {true_cost}")
        if true_cost > scenario.budget + tol:
            problems.append(
                f"robot {i} path cost {true_cost} exceeds budget {scenario.budget} "
                f"by {true_cost - scenario.budget}")

    everyone = set(range(n))
    if solution.s1_robots & solution.s2_robots:
        problems.append("redundancy and coverage sets overlap")
    if (solution.s1_robots | solution.s2_robots) != everyone:
        problems.append("redundancy and coverage sets do not cover all robots")
    if len(solution.s1_robots) not in (scenario.alpha, 0):
        problems.append(
            f"redundancy set has {len(solution.s1_robots)} robots, expected {scenario.alpha} or 0")

    if not evaluable:
        # Unknown or repeated vertices make the reward checks ill-defined.
        return problems

    rewards = [eval_vertex_set(model, p.vertices) for p in solution.paths]
    for i, (got, expect) in enumerate(zip(solution.per_path_rewards, rewards)):
        if abs(got - expect) > tol:
            problems.append(f"robot {i} stored reward {got} differs from recomputed {expect}")
    team = eval_team(model, solution.paths)
    if abs(team - solution.team_reward) > tol:
        problems.append(
            f"stored team reward {solution.team_reward} differs from recomputed {team}")

    if solution.s1_robots and solution.s2_robots:
        min_s1 = min(rewards[i] for i in solution.s1_robots)
        max_s2 = max(rewards[j] for j in solution.s2_robots)
        if min_s1 < max_s2 - tol:
            problems.append(
                f"coverage path reward {max_s2} outranks redundancy path reward {min_s1}")
    return problems
