"""Cost scaling, rounding, and subdivision behind the weighted solvers."""

import random
from fractions import Fraction

import pytest

from survsteiner import (
    Graph,
    Infeasible,
    ProblemKind,
    SolveStats,
    build_scaling_gadget,
    oracle_min_subgraph,
    subgraph_nodes,
    weighted_steiner_cycle,
)


def triangle(costs=(1, 1, 1)):
    return Graph.build(
        3,
        [(0, 1, costs[0], True), (1, 2, costs[1], True), (2, 0, costs[2], True)],
    )


def square_with_diagonal():
    return Graph.build(
        4,
        [(0, 1, 3, True), (1, 2, 1, True), (2, 3, 4, True),
         (3, 0, 2, True), (0, 2, 2, True)],
    )


class TestGadgetConstruction:
    def test_unit_costs_epsilon_one(self):
        g = triangle()
        gadget = build_scaling_gadget(g, [0, 1, 2], Fraction(1))
        assert gadget.beta == 1
        assert gadget.mu == Fraction(1, 3)
        # every edge becomes ceil(1 / (1/3)) = 3 unit edges
        counts = gadget.fold_weights()
        assert all(counts[eid] == 3 for eid in g.edge_ids())
        assert gadget.subdivided_graph.m == 9

    def test_zero_cost_edge_becomes_one_unit_edge(self):
        g = Graph.build(
            3,
            [(0, 1, 0, True), (1, 2, 2, True), (2, 0, 2, True)],
        )
        gadget = build_scaling_gadget(g, [0, 1, 2], Fraction(1, 2))
        assert gadget.fold_weights()[0] == 1

    def test_node_budget_bound(self):
        rng = random.Random(3)
        for _ in range(20):
            n = rng.randrange(3, 7)
            specs = [(v - 1, v, rng.randrange(0, 30), True) for v in range(1, n)]
            specs += [(n - 1, 0, rng.randrange(0, 30), True)]
            for _ in range(rng.randrange(0, 4)):
                u, v = rng.sample(range(n), 2)
                specs.append((u, v, rng.randrange(0, 30), True))
            g = Graph.build(n, specs)
            for eps in (Fraction(1, 2), Fraction(1, 10)):
                gadget = build_scaling_gadget(g, [0, 1, 2], eps)
                bound = g.n + Fraction(g.m * g.n * g.n, eps)
                assert gadget.subdivided_graph.n <= bound

    def test_threshold_is_smallest_feasible_prefix(self):
        # expensive detour edge is not needed; beta stays at the cycle's max
        g = Graph.build(
            3,
            [(0, 1, 1, True), (1, 2, 2, True), (2, 0, 3, True), (0, 1, 50, True)],
        )
        gadget = build_scaling_gadget(g, [0, 1, 2], Fraction(1))
        assert gadget.beta == 3

    def test_costlier_than_n_beta_edges_are_dropped(self):
        g = Graph.build(
            3,
            [(0, 1, 1, True), (1, 2, 1, True), (2, 0, 1, True), (0, 1, 99, True)],
        )
        gadget = build_scaling_gadget(g, [0, 1, 2], Fraction(1))
        assert 3 not in gadget.fold_weights()

    def test_infeasible_graph_raises(self):
        g = Graph.build(2, [(0, 1, 1, True)])
        with pytest.raises(Infeasible):
            build_scaling_gadget(g, [0, 1], Fraction(1))

    def test_rounding_error_on_any_cycle_is_bounded(self):
        g = square_with_diagonal()
        eps = Fraction(1, 10)
        gadget = build_scaling_gadget(g, [0, 1, 2], eps)
        counts = gadget.fold_weights()
        mu = gadget.mu
        # rounded cost minus true cost on each surviving edge is < mu, so any
        # simple cycle (<= n edges) errs by at most n*mu <= eps*beta
        for eid, t in counts.items():
            c = g.edge(eid).cost
            assert 0 <= t * mu - c <= mu
        assert g.n * mu <= eps * gadget.beta


class TestWeightedSteinerCycle:
    def test_unit_triangle_is_exact(self):
        sol = weighted_steiner_cycle(triangle(), [0, 1, 2], Fraction(1, 2))
        assert sol.cost == 3
        assert sol.ratio_bound == Fraction(3, 2)
        assert sol.optimal is False

    def test_square_with_diagonal_within_ratio(self):
        g = square_with_diagonal()
        ref = oracle_min_subgraph(g, [0, 1, 2], ProblemKind.CYCLE, weighted=True)
        assert ref.cost == 6
        sol = weighted_steiner_cycle(g, [0, 1, 2], Fraction(1, 10))
        assert sol.cost <= Fraction(11, 10) * ref.cost

    def test_single_edge_graph_infeasible(self):
        g = Graph.build(2, [(0, 1, 5, True)])
        with pytest.raises(Infeasible):
            weighted_steiner_cycle(g, [0, 1], Fraction(1))

    def test_back_mapping_returns_original_edges(self):
        g = square_with_diagonal()
        sol = weighted_steiner_cycle(g, [0, 1, 2], Fraction(1, 2))
        assert sol.edges <= set(g.edge_ids())
        assert set(sol.certificate["nodes"]) <= set(range(g.n))

    def test_stats_record_the_gadget(self):
        g = square_with_diagonal()
        stats = SolveStats()
        weighted_steiner_cycle(g, [0, 1, 2], Fraction(1, 2), stats=stats)
        assert stats.beta is not None and stats.mu is not None
        assert stats.subdivided_nodes is not None
        assert stats.subdivided_nodes >= g.n

    def test_zero_cost_optimum(self):
        # a zero-cost cycle exists: scaling short-circuits to the exact answer
        g = Graph.build(
            3,
            [(0, 1, 0, True), (1, 2, 0, True), (2, 0, 0, True), (0, 2, 7, True)],
        )
        sol = weighted_steiner_cycle(g, [0, 1, 2], Fraction(1, 10))
        assert sol.cost == 0
        assert sol.edges == frozenset({0, 1, 2})

    @pytest.mark.parametrize("seed", range(25))
    def test_ratio_against_oracle_on_random_instances(self, seed):
        rng = random.Random(seed)
        n = rng.randrange(4, 7)
        specs = [(i, (i + 1) % n, rng.randrange(0, 20), True) for i in range(n)]
        for _ in range(rng.randrange(0, 3)):
            u, v = rng.sample(range(n), 2)
            specs.append((u, v, rng.randrange(0, 20), True))
        g = Graph.build(n, specs)
        terms = rng.sample(range(n), 3)
        ref = oracle_min_subgraph(g, terms, ProblemKind.CYCLE, weighted=True)
        for eps in (Fraction(1, 2), Fraction(1, 10)):
            sol = weighted_steiner_cycle(g, terms, eps)
            assert sol.cost <= (1 + eps) * ref.cost
            nodes = subgraph_nodes(g, sol.edges)
            assert set(terms) <= nodes
