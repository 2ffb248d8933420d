# Copyright 2025 The lacuna Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Tests for graph generation, structure and spectral checks.
"""

import networkx as nx
import numpy as np
import pytest

from lacuna.exceptions import DisconnectedSetError, GraphGenerationError, ValidationError
from lacuna.graph import (
    a1_violations,
    ball,
    ball_distances,
    ball_of_set,
    ball_tree_excess,
    check_assumptions,
    cheeger_check,
    count_treelike_balls,
    distances_from_set,
    edge_boundary,
    exterior_boundary,
    generate_random_regular,
    girth,
    interior_boundary,
    is_connected_set,
    isoperimetric_profile,
    join_with_bottleneck,
    max_sampled_tree_excess,
    restart_budget,
    sample_connected_set,
    spectral_gap,
    sphere,
    tree_excess,
)
from lacuna.graph.spectral import _second_eigenvalue_dense, _second_eigenvalue_iterative
from lacuna.models import RegularGraph, VertexSet
from lacuna.utils import make_rng


class TestGenerator:
    """Test the pairing-model generator."""

    def test_four_vertices_gives_k4(self, k4):
        """The only simple 3-regular graph on 4 vertices is K4."""
        g = generate_random_regular(4, 3, seed=7)
        assert np.array_equal(g.adjacency, k4.adjacency)
        assert g.restarts >= 0

    def test_deterministic_for_seed(self):
        """Same seed, same graph."""
        a = generate_random_regular(100, 3, seed=5)
        b = generate_random_regular(100, 3, seed=5)
        assert np.array_equal(a.adjacency, b.adjacency)

    def test_different_seeds_differ(self):
        """Different seeds give different graphs at this size."""
        a = generate_random_regular(100, 3, seed=5)
        b = generate_random_regular(100, 3, seed=6)
        assert not np.array_equal(a.adjacency, b.adjacency)

    @pytest.mark.parametrize("n,d", [(100, 3), (50, 4), (30, 5)])
    def test_simple_regular(self, n, d):
        """The result is simple and d-regular (networkx oracle)."""
        g = generate_random_regular(n, d, seed=1)
        nx_graph = nx.Graph(g.edges().tolist())
        assert nx_graph.number_of_nodes() == n
        assert nx_graph.number_of_edges() == n * d // 2
        assert all(deg == d for _, deg in nx_graph.degree())
        assert nx.number_of_selfloops(nx_graph) == 0

    @pytest.mark.parametrize("n,d", [(5, 3), (3, 3), (10, 2)])
    def test_invalid_parameters(self, n, d):
        """Odd n*d, n <= d and d < 3 are rejected."""
        with pytest.raises(ValidationError):
            generate_random_regular(n, d, seed=0)

    def test_restart_budget_exhausted(self):
        """A dense pairing with no restarts allowed fails."""
        with pytest.raises(GraphGenerationError):
            generate_random_regular(12, 10, seed=0, max_restarts=0)

    def test_restart_budget_grows_with_degree(self):
        """The budget follows exp((d^2-1)/4)."""
        assert restart_budget(3) < restart_budget(5) < restart_budget(7)


class TestRegularGraph:
    """Test the RegularGraph model."""

    def test_from_edges_rejects_wrong_degree(self):
        """A path is not 3-regular."""
        with pytest.raises(ValidationError):
            RegularGraph.from_edges(4, 3, [(0, 1), (1, 2), (2, 3)])

    def test_connected_flag(self, k4, two_k4):
        """Connectivity is computed on construction."""
        assert k4.connected
        assert not two_k4.connected

    def test_neighbours_sorted(self, petersen):
        """Adjacency rows are sorted."""
        for x in range(petersen.n):
            row = petersen.neighbours(x)
            assert list(row) == sorted(row)
            assert all(petersen.has_edge(x, int(y)) for y in row)

    def test_transition_matrix_is_stochastic(self, petersen):
        """Rows of P sum to one."""
        P = petersen.transition_matrix()
        assert np.allclose(np.asarray(P.sum(axis=1)).ravel(), 1.0)


class TestStructure:
    """Test balls, boundaries and tree excess."""

    def test_ball_of_radius_zero(self, petersen):
        """B(x, 0) = {x}."""
        assert list(ball(petersen, 3, 0)) == [3]

    def test_petersen_balls(self, petersen):
        """Balls of the Petersen graph have sizes 1, 4, 10."""
        assert ball(petersen, 0, 1).cardinality == 4
        assert ball(petersen, 0, 2).cardinality == 10
        assert sphere(petersen, 0, 2).cardinality == 6

    def test_ball_matches_networkx(self, cubic200):
        """Ball distances agree with networkx shortest paths."""
        nx_graph = nx.Graph(cubic200.edges().tolist())
        expected = nx.single_source_shortest_path_length(nx_graph, 0, cutoff=4)
        assert ball_distances(cubic200, 0, 4) == expected

    def test_negative_radius(self, k4):
        """Negative radii are rejected."""
        with pytest.raises(ValidationError):
            ball(k4, 0, -1)

    def test_tree_excess(self, k4, petersen):
        """tx = |E_A| - |A| + 1."""
        assert tree_excess(k4, [0, 1, 2, 3]) == 3
        assert tree_excess(k4, [0, 1, 2]) == 1
        assert tree_excess(k4, [0]) == 0
        assert ball_tree_excess(petersen, 0, 1) == 0
        assert ball_tree_excess(petersen, 0, 2) == 6

    def test_tree_excess_needs_connected_set(self, two_k4):
        """Disconnected or empty sets are rejected."""
        with pytest.raises(DisconnectedSetError):
            tree_excess(two_k4, [0, 4])
        with pytest.raises(DisconnectedSetError):
            tree_excess(two_k4, [])

    def test_boundaries(self, petersen):
        """Boundaries of a single vertex."""
        assert set(exterior_boundary(petersen, [0])) == set(int(y) for y in petersen.neighbours(0))
        assert edge_boundary(petersen, [0]) == 3
        assert list(interior_boundary(petersen, [0])) == [0]
        assert interior_boundary(petersen, range(10)).cardinality == 0

    def test_distances_from_set(self, petersen):
        """Multi-source distances; -1 beyond the cut-off radius."""
        dist = distances_from_set(petersen, [0])
        assert dist[0] == 0
        assert set(dist.tolist()) == {0, 1, 2}
        cut = distances_from_set(petersen, [0], r=1)
        assert (cut == -1).sum() == 6
        assert ball_of_set(petersen, [0], 1) == ball(petersen, 0, 1)

    def test_is_connected_set(self, petersen):
        """Edges are connected, non-adjacent pairs are not."""
        assert is_connected_set(petersen, [0, 1])
        assert not is_connected_set(petersen, [0, 2])
        assert not is_connected_set(petersen, [])

    @pytest.mark.parametrize("fixture,expected", [("k4", 3), ("petersen", 5), ("tutte_coxeter", 8)])
    def test_girth(self, request, fixture, expected):
        """Known girths."""
        assert girth(request.getfixturevalue(fixture)) == expected

    def test_count_treelike_balls(self, tutte_coxeter, petersen):
        """Balls below half the girth are trees."""
        assert count_treelike_balls(tutte_coxeter, 3) == 30
        assert count_treelike_balls(petersen, 1) == 10
        assert count_treelike_balls(petersen, 2) == 0

    def test_count_treelike_balls_radius_above_r(self, tutte_coxeter):
        """r above floor(alpha1 ld n) is refused."""
        with pytest.raises(ValidationError):
            count_treelike_balls(tutte_coxeter, 3, alpha1=0.2)

    def test_sample_connected_set(self, cubic200):
        """Grown sets are connected and have the requested size."""
        rng = make_rng(0)
        for size in (1, 5, 40):
            A = sample_connected_set(cubic200, size, rng)
            assert A.cardinality == size
            assert is_connected_set(cubic200, A)

    def test_sampled_diagnostics(self, cubic200):
        """The profile is positive and the sampled excess is small."""
        rng = make_rng(1)
        profile = isoperimetric_profile(cubic200, 20, rng)
        assert 0 < profile <= 3
        assert max_sampled_tree_excess(cubic200, 8, 20, rng) <= 2


class TestJoin:
    """Test the two-edge bottleneck join."""

    def test_join_two_k4(self, k4):
        """Joining two K4 gives a connected 3-regular graph on 8 vertices."""
        g = join_with_bottleneck(k4, k4, (0, 1), (0, 1))
        assert g.n == 8 and g.d == 3
        assert g.connected
        assert g.has_edge(0, 4) and g.has_edge(1, 5)
        assert not g.has_edge(0, 1)

    def test_join_rejects_degree_mismatch(self, k4, k5):
        """Degrees must agree."""
        with pytest.raises(ValidationError):
            join_with_bottleneck(k4, k5, (0, 1), (0, 1))

    def test_join_rejects_non_edge(self, petersen):
        """e1 must be an edge."""
        with pytest.raises(ValidationError):
            join_with_bottleneck(petersen, petersen, (0, 2), (0, 1))

    def test_bottleneck_shrinks_gap(self, petersen):
        """A two-edge bottleneck has a smaller gap than its halves."""
        g = join_with_bottleneck(petersen, petersen, (0, 1), (0, 1))
        assert spectral_gap(g) < spectral_gap(petersen)


class TestSpectral:
    """Test spectral gaps and assumption checks."""

    @pytest.mark.parametrize(
        "fixture,expected", [("k4", 4.0 / 3.0), ("petersen", 2.0 / 3.0), ("k5", 5.0 / 4.0)]
    )
    def test_known_gaps(self, request, fixture, expected):
        """Gaps from the transition spectra."""
        assert spectral_gap(request.getfixturevalue(fixture)) == pytest.approx(expected, abs=1e-9)

    def test_iterative_matches_dense(self, cubic200):
        """The Lanczos path agrees with the dense eigendecomposition."""
        dense = _second_eigenvalue_dense(cubic200)
        iterative = _second_eigenvalue_iterative(cubic200)
        assert iterative == pytest.approx(dense, abs=1e-8)

    def test_check_assumptions_tree_like(self, tutte_coxeter):
        """Radius-3 balls of the girth-8 graph are trees."""
        report = check_assumptions(tutte_coxeter, alpha1=0.8, alpha2=0.01)
        assert report.a0_ok
        assert report.a1_radius == 3
        assert report.a1_ok
        assert report.girth == 8
        assert report.a2_ok()

    def test_check_assumptions_violations(self, petersen):
        """Radius-3 balls of the Petersen graph are the whole graph."""
        report = check_assumptions(petersen, alpha1=1.0)
        assert not report.a1_ok
        assert report.a1_violations == list(range(10))
        assert a1_violations(petersen, 1) == []

    def test_a2_needs_threshold(self, petersen):
        """a2_ok without a threshold is an error."""
        report = check_assumptions(petersen)
        with pytest.raises(ValidationError):
            report.a2_ok()
        assert report.a2_ok(0.5)
        assert not report.a2_ok(0.7)

    def test_check_assumptions_disconnected(self, two_k4):
        """Disconnected graphs are refused."""
        with pytest.raises(ValidationError):
            check_assumptions(two_k4)

    def test_cheeger_check_is_measured(self, petersen):
        """The Cheeger record is diagnostic only."""
        record = cheeger_check(petersen, 1.0)
        assert record.passed is None
        assert record.lhs == pytest.approx((1.0 / 3.0) ** 2 / 2)


class TestVertexSet:
    """Test the VertexSet model."""

    def test_set_algebra(self):
        """Union, intersection, difference and complement."""
        a = VertexSet.from_vertices(6, [0, 1, 2])
        b = VertexSet.from_vertices(6, [2, 3])
        assert list(a.union(b)) == [0, 1, 2, 3]
        assert list(a.intersection(b)) == [2]
        assert list(a.difference(b)) == [0, 1]
        assert list(a.complement()) == [3, 4, 5]
        assert a.intersection(b).issubset(a)
        assert 2 in a and 5 not in a
        assert len(VertexSet.full(6)) == 6 and len(VertexSet.empty(6)) == 0
