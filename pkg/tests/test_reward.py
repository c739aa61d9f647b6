import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmop.graph import Path
from rmop.reward import (CurvatureEstimate, IncrementalEval, RewardError, RewardModel,
                         curvature, eval_team, eval_vertex_set, marginal,
                         team_curvature, vertex_curvature)

from helpers import oracle_eval, random_tiny_scenario

TOL = 1e-9


def path_of(robot, *vertices):
    return Path(robot=robot, vertices=tuple(vertices), cost=0.0)


def random_coverage_model(rng, n=6, n_cells=5):
    weights = rng.integers(0, 11, size=n_cells).astype(float)
    cover = rng.random((n, n_cells)) < 0.5
    return RewardModel.coverage([
        [(c, float(weights[c])) for c in range(n_cells) if cover[v, c]]
        for v in range(n)
    ])


class TestEvalVertexSet:
    def test_modular_is_additive(self):
        m = RewardModel.modular([0.0, 5.0, 3.0])
        assert eval_vertex_set(m, {1, 2}) == 8.0

    def test_coverage_counts_a_cell_once(self):
        m = RewardModel.coverage([[(0, 1.0)], [(0, 1.0)]])
        assert eval_vertex_set(m, {0, 1}) == 1.0

    def test_masked_vertex_contributes_zero(self):
        m = RewardModel.modular([0.0, 5.0]).with_masked([1])
        assert eval_vertex_set(m, {1}) == 0.0

    def test_empty_set_is_zero(self):
        m = RewardModel.modular([1.0, 2.0])
        assert eval_vertex_set(m, set()) == 0.0

    def test_invalid_id_rejected(self):
        m = RewardModel.modular([1.0])
        with pytest.raises(RewardError, match="out of range"):
            eval_vertex_set(m, {3})

    def test_inconsistent_cell_weights_rejected(self):
        with pytest.raises(RewardError, match="inconsistent"):
            RewardModel.coverage([[(0, 1.0)], [(0, 2.0)]])

    def test_negative_weight_rejected(self):
        with pytest.raises(RewardError):
            RewardModel.modular([-1.0])


class TestEvalTeam:
    def test_shared_vertices_counted_once(self):
        m = RewardModel.modular([0.0, 5.0, 3.0])
        paths = [path_of(0, 0, 1), path_of(1, 0, 1, 2)]
        assert eval_team(m, paths) == 8.0

    def test_single_path_equals_vertex_set(self):
        m = RewardModel.modular([0.0, 5.0, 3.0])
        p = path_of(0, 0, 1)
        assert eval_team(m, [p]) == eval_vertex_set(m, {0, 1})

    def test_empty_team_is_zero(self):
        m = RewardModel.modular([1.0])
        assert eval_team(m, []) == 0.0


class TestMarginal:
    def test_marginal_over_empty_base(self):
        m = RewardModel.modular([0.0, 5.0])
        p = path_of(0, 0, 1)
        assert marginal(m, [], [p]) == eval_team(m, [p])

    def test_subset_addition_is_zero(self):
        m = RewardModel.modular([0.0, 5.0, 3.0])
        base = [path_of(0, 0, 1, 2)]
        assert marginal(m, base, [path_of(1, 0, 1)]) == 0.0

    def test_disjoint_modular_paths_add(self):
        m = RewardModel.modular([0.0, 8.0, 4.0])
        assert marginal(m, [path_of(0, 1)], [path_of(1, 2)]) == 4.0


class TestCurvature:
    def test_modular_model_is_exactly_zero(self):
        m = RewardModel.modular([3.0, 1.0, 2.5, 0.0])
        est = vertex_curvature(m)
        assert est.value == 0.0
        assert est.skipped_zero_singletons == 1

    def test_fully_redundant_pair_is_one(self):
        m = RewardModel.coverage([[(0, 1.0)], [(0, 1.0)]])
        assert vertex_curvature(m).value == 1.0

    def test_matches_direct_definition_on_random_coverage(self):
        # Independent evaluation of the leave-one-out definition.
        rng = np.random.default_rng(42)
        for _ in range(20):
            m = random_coverage_model(rng)
            n = m.n
            full = oracle_eval(m, range(n))
            ratios = []
            for v in range(n):
                single = oracle_eval(m, [v])
                if single > 0:
                    rest = [u for u in range(n) if u != v]
                    ratios.append((full - oracle_eval(m, rest)) / single)
            expected = 1.0 - min(ratios) if ratios else 0.0
            got = vertex_curvature(m).value
            assert got == pytest.approx(min(1.0, max(0.0, expected)), abs=1e-12)

    def test_all_zero_singletons_reported(self):
        m = RewardModel.modular([0.0, 0.0])
        est = vertex_curvature(m)
        assert est.value == 0.0
        assert est.skipped_zero_singletons == 2

    def test_generic_curvature_empty_ground_set_rejected(self):
        with pytest.raises(RewardError):
            curvature([], lambda xs: 0.0)

    def test_team_curvature_of_duplicate_paths_is_one(self):
        m = RewardModel.modular([1.0, 2.0])
        paths = [path_of(0, 0, 1), path_of(1, 0, 1)]
        assert team_curvature(m, paths).value == 1.0

    def test_value_always_in_unit_interval(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m = random_coverage_model(rng, n=int(rng.integers(2, 7)))
            est = vertex_curvature(m)
            assert 0.0 <= est.value <= 1.0


def random_subset(rng, n):
    return {v for v in range(n) if rng.random() < 0.5}


class TestSetFunctionLaws:
    """Submodularity and monotonicity spot checks; the full 1000-pair sweeps
    live in the acceptance suite."""

    @pytest.mark.parametrize("kind", ["modular", "coverage"])
    def test_submodular_and_monotone(self, kind):
        rng = np.random.default_rng(3)
        for _ in range(10):
            scenario = random_tiny_scenario(int(rng.integers(0, 10_000)), kind=kind)
            m = RewardModel.from_scenario(scenario)
            n = m.n
            for _ in range(100):
                a = random_subset(rng, n)
                b = random_subset(rng, n)
                fa, fb = eval_vertex_set(m, a), eval_vertex_set(m, b)
                fu = eval_vertex_set(m, a | b)
                fi = eval_vertex_set(m, a & b)
                assert fa + fb >= fu + fi - TOL
                assert eval_vertex_set(m, a) <= eval_vertex_set(m, a | b) + TOL

    def test_team_reward_submodular_even_with_modular_paths(self):
        rng = np.random.default_rng(5)
        m = RewardModel.modular(list(rng.integers(0, 9, size=8).astype(float)))
        pool = [path_of(i, *sorted(random_subset(rng, 8) | {0})) for i in range(12)]
        for _ in range(300):
            a = {pool[i] for i in random_subset(rng, len(pool))}
            b = {pool[i] for i in random_subset(rng, len(pool))}
            fa, fb = eval_team(m, a), eval_team(m, b)
            fu = eval_team(m, a | b)
            fi = eval_team(m, a & b)
            assert fa + fb >= fu + fi - TOL

    @pytest.mark.parametrize("kind", ["modular", "coverage"])
    def test_whole_set_dominates_discounted_singleton_sum(self, kind):
        # h(A) >= (1 - k_h) * sum of singletons, for any subset A.
        rng = np.random.default_rng(11)
        for _ in range(5):
            scenario = random_tiny_scenario(int(rng.integers(0, 10_000)), kind=kind)
            m = RewardModel.from_scenario(scenario)
            k = vertex_curvature(m).value
            for _ in range(200):
                a = random_subset(rng, m.n)
                singles = sum(eval_vertex_set(m, {v}) for v in a)
                assert eval_vertex_set(m, a) >= (1.0 - k) * singles - TOL


class TestIncrementalEval:
    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.booleans(), st.integers(0, 5)), max_size=30),
           st.booleans())
    def test_tracks_eval_vertex_set(self, ops, use_coverage):
        if use_coverage:
            m = random_coverage_model(np.random.default_rng(1), n=6)
        else:
            m = RewardModel.modular([2.0, 0.0, 5.0, 1.0, 3.0, 4.0]).with_masked([3])
        ev = IncrementalEval(m)
        members = set()
        for add, v in ops:
            if add and v not in members:
                gain = ev.gain(v)
                assert ev.add(v) == gain
                members.add(v)
            elif not add and v in members:
                ev.remove(v)
                members.discard(v)
            assert ev.value == pytest.approx(eval_vertex_set(m, members), abs=1e-12)
            assert ev.members == members

    def test_gain_matches_marginal(self):
        m = random_coverage_model(np.random.default_rng(2), n=6)
        ev = IncrementalEval(m)
        base = set()
        for v in [0, 3, 5]:
            ev.add(v)
            base.add(v)
        for v in range(6):
            expected = eval_vertex_set(m, base | {v}) - eval_vertex_set(m, base)
            assert ev.gain(v) == pytest.approx(expected, abs=1e-12)
