"""Adversary models: remove robots from a solved team and score the survivors.

The exhaustive attack is the ground-truth worst case (feasible because the
residual only depends on which robots survive, and teams are small); the
greedy attack is the scalable stand-in, never below the true worst case.
Random and partial attacks mirror the benchmark protocols for evaluating a
plan against adversaries weaker than the one it was built for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .planner import Solution
from .reward import RewardModel, eval_team
from .orienteering import SizeGuardError

SUBSET_GUARD = 10 ** 6


@dataclass(frozen=True)
class AttackOutcome:
    removed: frozenset[int]
    residual: float
    model: str
    seed: Optional[int] = None


def _residual(model: RewardModel, solution: Solution, removed) -> float:
    survivors = [p for p in solution.paths if p.robot not in removed]
    return eval_team(model, survivors)


def _check_size(solution: Solution, size: int) -> None:
    if size < 0:
        raise ValueError("attack size must be non-negative")
    if size >= solution.n_robots:
        raise ValueError(f"attack size must be < {solution.n_robots} robots, got {size}")


def worst_case_attack(model: RewardModel, solution: Solution, size: int,
                      max_subsets: int = SUBSET_GUARD) -> AttackOutcome:
    """Exhaustive minimization of the surviving team reward over removals.

    Enumerates all subsets of exactly `size` robots (monotonicity means a
    minimizer of full size always exists) and keeps the lexicographically
    smallest minimizer.
    """
    _check_size(solution, size)
    n = solution.n_robots
    if math.comb(n, size) > max_subsets:
        raise SizeGuardError(
            f"C({n},{size}) removal subsets exceed the guard of {max_subsets}; "
            "use greedy_attack instead")
    best_set = frozenset(range(size))
    best_residual = _residual(model, solution, best_set)
    for combo in combinations(range(n), size):
        removed = frozenset(combo)
        residual = _residual(model, solution, removed)
        if residual < best_residual:
            best_residual = residual
            best_set = removed
    return AttackOutcome(removed=best_set, residual=best_residual, model="worst-exhaustive")


def greedy_attack(model: RewardModel, solution: Solution, size: int) -> AttackOutcome:
    """Remove, one at a time, the robot whose loss hurts the survivors most."""
    _check_size(solution, size)
    removed: set[int] = set()
    for _ in range(size):
        best_robot = None
        best_residual = math.inf
        for r in range(solution.n_robots):
            if r in removed:
                continue
            residual = _residual(model, solution, removed | {r})
            if residual < best_residual:
                best_residual = residual
                best_robot = r
        removed.add(best_robot)
    return AttackOutcome(removed=frozenset(removed),
                         residual=_residual(model, solution, removed),
                         model="worst-greedy")


def random_attack(model: RewardModel, solution: Solution, size: int, seed: int) -> AttackOutcome:
    """Uniformly random removal of exactly `size` robots, deterministic per seed."""
    _check_size(solution, size)
    rng = np.random.default_rng(seed)
    removed = frozenset(int(r) for r in rng.choice(solution.n_robots, size=size, replace=False))
    return AttackOutcome(removed=removed, residual=_residual(model, solution, removed),
                         model="random", seed=seed)


def partial_worst_attack(model: RewardModel, solution: Solution, planned_alpha: int,
                         actual_size: int, max_subsets: int = SUBSET_GUARD) -> AttackOutcome:
    """Worst-case attack weaker than planned for: the planner assumed
    `planned_alpha` losses but only `actual_size` robots are removed."""
    if actual_size > planned_alpha:
        raise ValueError(
            f"actual_size {actual_size} exceeds the planned attack size {planned_alpha}")
    outcome = worst_case_attack(model, solution, actual_size, max_subsets=max_subsets)
    return AttackOutcome(removed=outcome.removed, residual=outcome.residual, model="partial")
