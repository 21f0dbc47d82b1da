"""Unit tests for candidate filters, Steiner heuristics, oracles and ME values."""

import math

import numpy as np
import pytest

from apps.core.exceptions import InstanceTooLargeError, ParameterError
from apps.dataset.knn import knn_of_vector
from apps.graphs.analysis import reverse_graph
from apps.graphs.types import DirectedGraph
from apps.reach.delta0 import PairSet, delta0_for_query, find_delta0
from apps.steiner.effort import (
    me_basic,
    me_chain,
    me_constrained,
    me_exhaustive,
    me_radius_sweep,
    radius_ladder,
    select_pairs,
    witness_networks,
)
from apps.steiner.oracles import dst_exact_bruteforce, vdsn_exact_bruteforce
from apps.steiner.solvers import (
    decision_cost,
    dst_shortest_path,
    out_degree_weights,
    shortest_path_tree,
    vdsn_heuristic,
    verify_solution,
)
from apps.steiner.types import CandidateFilter, SteinerSolution
from tests.factories import (
    RandomDigraphFactory,
    complete_graph,
    line_points,
    path_graph,
    random_pairs,
)

UNLIMITED = CandidateFilter.unlimited()

# Root 0 fans out to 1, 2, 3; only 3 reaches both terminals 4 and 5
FAN = DirectedGraph.from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 4), (3, 5)])

DIAMOND = DirectedGraph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


def _weight(nodes, weights):
    return sum(float(weights[v]) for v in nodes)


class TestCandidateFilter:
    """Tests for radius filters."""

    def test_from_query(self):
        flt = CandidateFilter.from_query(line_points(0, 1, 2, 3), [0.0], 1.5)
        assert flt.allowed == {0, 1}
        assert 1 in flt
        assert 2 not in flt

    def test_boundary_is_inclusive(self):
        flt = CandidateFilter.from_query(line_points(0, 1, 2, 3), [0.0], 2.0)
        assert flt.allowed == {0, 1, 2}

    def test_unlimited(self):
        flt = CandidateFilter.from_query(line_points(0, 1), [0.0], math.inf)
        assert flt == UNLIMITED
        assert 10**6 in flt
        assert flt.vertices(3) == [0, 1, 2]

    def test_from_neighbors(self):
        nn = knn_of_vector(line_points(0, 1, 2, 3), [0.0], 4)
        assert CandidateFilter.from_neighbors(nn, 1.0).allowed == {0, 1}

    def test_explicit_vertex_set(self):
        flt = CandidateFilter.of([3, 1])
        assert flt.vertices(10) == [1, 3]
        assert math.isnan(flt.radius)


class TestShortestPathTree:
    """Tests for BFS and node-weighted Dijkstra trees."""

    def test_hop_counts_include_the_root(self):
        tree = shortest_path_tree(path_graph(4), 0, UNLIMITED)
        assert tree.cost == {0: 1.0, 1: 2.0, 2: 3.0, 3: 4.0}
        assert tree.path(3) == [3, 2, 1, 0]

    def test_hop_ties_go_to_the_smaller_id(self):
        tree = shortest_path_tree(DIAMOND, 0, UNLIMITED)
        assert tree.parent[3] == 1

    def test_weights_reroute(self):
        tree = shortest_path_tree(DIAMOND, 0, UNLIMITED, weights=[1.0, 5.0, 1.0, 1.0])
        assert tree.parent[3] == 2
        assert tree.cost[3] == 3.0

    def test_filter_blocks_vertices(self):
        tree = shortest_path_tree(DIAMOND, 0, CandidateFilter.of([0, 2, 3]))
        assert tree.parent[3] == 2
        assert not tree.reached(1)

    def test_root_outside_filter(self):
        with pytest.raises(ParameterError):
            shortest_path_tree(DIAMOND, 0, CandidateFilter.of([1, 2]))

    def test_cheapest_orders_by_cost_then_id(self):
        tree = shortest_path_tree(FAN, 0, UNLIMITED)
        assert tree.cheapest([5, 4, 3]) == [3, 4, 5]
        assert tree.cheapest([5, 4, 3], keep=2) == [3, 4]


class TestDecisionCost:
    """Tests for the decision cost of a node set."""

    def test_fan_out_counts_every_neighbor(self):
        g = DirectedGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        cost, per_node = decision_cost(g, {0, 1})
        assert cost == 4
        assert per_node[0] == {0, 1, 2, 3}
        assert per_node[1] == {1}

    def test_vertex_without_inner_neighbor_counts_once(self):
        g = DirectedGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        assert decision_cost(g, {0})[0] == 1

    def test_empty_set(self):
        assert decision_cost(FAN, set()) == (0, {})

    def test_weights_are_one_plus_out_degree(self):
        assert out_degree_weights(FAN).tolist() == [4.0, 2.0, 2.0, 3.0, 1.0, 1.0]


class TestDirectedSteinerTree:
    """Tests for the shortest-path heuristic against the exact oracle."""

    def test_fan_heuristic_and_optimum(self):
        heuristic = dst_shortest_path(FAN, 0, {4, 5}, UNLIMITED)
        exact = dst_exact_bruteforce(FAN, 0, {4, 5}, UNLIMITED)
        assert heuristic.nodes == {0, 1, 2, 4, 5}
        assert heuristic.me == 5
        assert exact.nodes == {0, 3, 4, 5}
        assert exact.me == 4
        assert verify_solution(FAN, heuristic)
        assert verify_solution(FAN, exact)

    def test_keep_connects_only_the_cheapest(self):
        solution = dst_shortest_path(path_graph(5), 0, {2, 4}, UNLIMITED, keep=1)
        assert solution.nodes == {0, 1, 2}
        assert solution.per_start == {0: {2}}

    def test_unreachable_terminal(self):
        solution = dst_shortest_path(path_graph(4), 2, {0, 3}, UNLIMITED)
        assert not solution.feasible
        assert solution.unreachable == {0}
        assert not dst_exact_bruteforce(path_graph(4), 2, {0, 3}, UNLIMITED).feasible

    def test_root_outside_filter_is_infeasible(self):
        flt = CandidateFilter.of([1, 2])
        assert not dst_shortest_path(path_graph(3), 0, {2}, flt).feasible
        assert not dst_exact_bruteforce(path_graph(3), 0, {2}, flt).feasible

    def test_root_as_terminal(self):
        solution = dst_shortest_path(path_graph(3), 1, {1}, UNLIMITED)
        assert solution.nodes == {1}
        assert solution.me == 1

    def test_oracle_size_limit(self):
        with pytest.raises(InstanceTooLargeError):
            dst_exact_bruteforce(complete_graph(21), 0, {1}, UNLIMITED)

    @pytest.mark.parametrize("seed", range(15))
    def test_never_beats_the_optimum(self, seed):
        g = RandomDigraphFactory(count=12, density=0.25, seed=seed)
        rng = np.random.default_rng(seed)
        root = int(rng.integers(12))
        terminals = set(rng.choice(12, size=3, replace=False).tolist())
        heuristic = dst_shortest_path(g, root, terminals, UNLIMITED)
        exact = dst_exact_bruteforce(g, root, terminals, UNLIMITED)
        assert heuristic.feasible == exact.feasible
        if exact.feasible:
            assert exact.me <= heuristic.me
            assert verify_solution(g, heuristic)


class TestSteinerNetwork:
    """Tests for the multi-start network heuristic."""

    @pytest.mark.parametrize("seed", range(15))
    def test_feasible_and_never_smaller_than_the_optimum(self, seed):
        g = RandomDigraphFactory(count=12, density=0.25, seed=100 + seed)
        pairs = random_pairs(12, seed)
        heuristic = vdsn_heuristic(g, pairs, UNLIMITED)
        exact = vdsn_exact_bruteforce(g, pairs, UNLIMITED)
        assert heuristic.feasible == exact.feasible
        if exact.feasible:
            assert exact.me <= heuristic.me
            assert verify_solution(g, heuristic, pairs.by_start())

    @pytest.mark.parametrize("seed", range(8))
    def test_weighted_optimum(self, seed):
        g = RandomDigraphFactory(count=9, density=0.3, seed=200 + seed)
        pairs = random_pairs(9, seed, max_starts=2, max_terminals=3)
        weights = out_degree_weights(g)
        heuristic = vdsn_heuristic(g, pairs, UNLIMITED, weights=weights)
        exact = vdsn_exact_bruteforce(g, pairs, UNLIMITED, weights=weights)
        assert heuristic.feasible == exact.feasible
        if exact.feasible:
            assert _weight(exact.nodes, weights) <= _weight(heuristic.nodes, weights)

    def test_grouped_starts_use_the_representative(self):
        g = DirectedGraph.from_edges(4, [(0, 1), (1, 0), (1, 2), (2, 3)])
        pairs = PairSet.from_groups([([1, 0], [2, 3])])
        solution = vdsn_heuristic(g, pairs, UNLIMITED)
        assert set(solution.per_start) == {1}
        assert solution.nodes == {1, 2, 3}
        assert verify_solution(g, solution)

    def test_empty_pairs(self):
        solution = vdsn_heuristic(FAN, PairSet(), UNLIMITED)
        assert solution.feasible
        assert solution.me == 0

    def test_infeasible_start(self):
        pairs = PairSet.single(4, [0])
        assert not vdsn_heuristic(FAN, pairs, UNLIMITED).feasible

    def test_verify_rejects_missing_nodes(self):
        solution = dst_shortest_path(path_graph(4), 0, {3}, UNLIMITED)
        broken = SteinerSolution(
            nodes=solution.nodes - {2},
            me=solution.me - 1,
            cost_union=solution.cost_union,
            per_start=solution.per_start,
        )
        assert not verify_solution(path_graph(4), broken)
        assert not verify_solution(path_graph(4), SteinerSolution.infeasible())


class TestMinimumEffort:
    """Tests for ME values on small line instances."""

    def _line(self):
        base = line_points(0, 1, 2, 3, 4)
        g = path_graph(5)
        nn = knn_of_vector(base, [0.0], 5)
        return base, g, reverse_graph(g), nn

    def test_basic_on_a_path(self):
        _, g, _, nn = self._line()
        assert me_basic(g, nn, 3, 1.0) == 3
        assert me_basic(g, nn, 3, 0.6) == 2

    def test_basic_without_a_qualifying_root(self):
        _, _, _, nn = self._line()
        assert me_basic(DirectedGraph.empty(5), nn, 2, 1.0) == math.inf

    def test_constrained_and_exhaustive_on_a_path(self):
        base, g, rev, nn = self._line()
        detail = find_delta0(g, rev, nn, 3, 1.0, 0.3)
        assert detail.radius == 2.0
        assert me_constrained(g, base, [0.0], nn, 3, 1.0, 0.3, detail.radius, detail.pairs) == 3
        assert me_exhaustive(g, base, [0.0], nn, 3, 1.0, 0.3, detail.radius, detail.pairs) == 3

    def test_empty_pairs_are_infinite(self):
        base, g, _, nn = self._line()
        assert me_constrained(g, base, [0.0], nn, 3, 1.0, 0.3, 2.0, PairSet()) == math.inf

    def test_select_pairs_takes_nearest_groups_first(self):
        nn = knn_of_vector(line_points(0, 1, 2, 3), [0.0], 4)
        pairs = PairSet.from_groups([([2], [2, 3]), ([0, 1], [0, 1])])
        chosen = select_pairs(pairs, nn, 4, 0.5)
        assert chosen.starts() == {0, 1}
        assert select_pairs(pairs, nn, 4, 0.75).starts() == {0, 1, 2}


class TestRadiusLadder:
    """Tests for the nested radii witness networks are solved on."""

    def test_rungs_grow_geometrically_up_to_the_limit(self):
        assert radius_ladder(2.0, 7.0) == (2.0, 3.0, 4.5, 6.75, 10.125)

    def test_anchor_at_the_limit(self):
        assert radius_ladder(3.0, 3.0) == (3.0,)

    def test_zero_anchor_jumps_to_the_limit(self):
        assert radius_ladder(0.0, 5.0) == (0.0, 5.0)

    def test_infinite_anchor(self):
        assert radius_ladder(math.inf, 5.0) == (math.inf,)

    def test_ratio_must_exceed_one(self):
        with pytest.raises(ParameterError):
            radius_ladder(1.0, 5.0, ratio=1.0)

    def test_networks_below_the_witness_radius_do_not_exist(self):
        base = line_points(0, 1, 2, 3, 4)
        g = path_graph(5)
        nn = knn_of_vector(base, [0.0], 5)
        detail = find_delta0(g, reverse_graph(g), nn, 3, 1.0, 0.3)
        assert detail.pairs.radius == detail.radius
        networks = witness_networks(g, base, [0.0], nn, 3, 1.0, 0.3, math.inf, detail.pairs)
        assert networks.rungs[0] == detail.radius
        assert networks.me(detail.radius) == 3
        assert networks.me(1.0) == math.inf


@pytest.mark.slow
class TestMinimumEffortOnSample:
    """ME values of fifty pooled queries on the approximate MRNG."""

    @pytest.fixture(scope="class")
    def witnesses(self, sample_base, sample_query_pool, sample_mrng):
        """(query, critical point detail) of every pooled query with a witness."""
        mrng, rev = sample_mrng
        found = []
        for i in range(sample_query_pool.count):
            q = sample_query_pool[i]
            detail = delta0_for_query(mrng, rev, sample_base, q, 10, 0.9, 0.95)
            if detail.success:
                found.append((q, detail))
        return found

    def test_most_pooled_queries_have_a_witness(self, witnesses):
        assert len(witnesses) >= 40

    def test_chain_is_ordered(self, sample_base, sample_mrng, witnesses):
        mrng, _ = sample_mrng
        for q, detail in witnesses:
            chain = me_chain(mrng, sample_base, q, detail.neighbors, 10, 0.9, 0.95,
                             detail.radius, detail.pairs, root_set=detail.neighbors.top(10).ids)
            assert chain.ordered
            assert chain.exhaustive >= 9

    def test_constrained_never_grows_with_the_radius(self, sample_base, sample_mrng, witnesses):
        mrng, _ = sample_mrng
        for q, detail in witnesses:
            values = [
                me_constrained(mrng, sample_base, q, detail.neighbors, 10, 0.9, 0.95, radius,
                               detail.pairs)
                for radius in (detail.radius, 1.5 * detail.radius, math.inf)
            ]
            assert math.isfinite(values[0])
            assert values[0] >= values[1] >= values[2]

    def test_exhaustive_never_grows_with_the_radius(self, sample_base, sample_mrng, witnesses):
        mrng, _ = sample_mrng
        for q, detail in witnesses[:10]:
            values = [
                me_exhaustive(mrng, sample_base, q, detail.neighbors, 10, 0.9, 0.95, radius,
                              detail.pairs)
                for radius in (detail.radius, 1.5 * detail.radius, math.inf)
            ]
            assert values[0] >= values[1] >= values[2]

    def test_sweep_matches_single_radius_values(self, sample_base, sample_mrng, witnesses):
        mrng, _ = sample_mrng
        for q, detail in witnesses[:10]:
            radii = [math.inf, detail.radius, 1.5 * detail.radius]
            swept = me_radius_sweep(mrng, sample_base, q, detail.neighbors, 10, 0.9, 0.95,
                                    radii, detail.pairs)
            single = [
                me_constrained(mrng, sample_base, q, detail.neighbors, 10, 0.9, 0.95, r,
                               detail.pairs)
                for r in radii
            ]
            assert swept == single

    def test_constrained_never_drops_as_acc_rises(self, sample_base, sample_query_pool,
                                                  sample_mrng):
        mrng, rev = sample_mrng
        for i in range(sample_query_pool.count):
            q = sample_query_pool[i]
            values = []
            for acc in (0.5, 0.8, 1.0):
                detail = delta0_for_query(mrng, rev, sample_base, q, 10, acc, 0.95)
                values.append(
                    me_constrained(mrng, sample_base, q, detail.neighbors, 10, acc, 0.95,
                                   detail.radius, detail.pairs)
                    if detail.success else math.inf
                )
            assert values[0] <= values[1] <= values[2]
