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
Tests for vacant components, classification and the instrumented exploration.
"""

import math

import networkx as nx
import numpy as np
import pytest

from lacuna.exceptions import DisconnectedSetError, ValidationError
from lacuna.interlace import params as interlacement_params
from lacuna.models import (
    ClassifyParams,
    ExplorationStep,
    ExplorationTrace,
    SegmentBundle,
    TerminationReason,
    Trajectory,
    VertexClass,
    VertexSet,
    VertexState,
)
from lacuna.pim import sample_segments
from lacuna.utils import make_rng
from lacuna.vacancy import (
    UnionFind,
    bfs_explore_instrumented,
    boundary_component,
    capped_future_radius,
    classification_census,
    classify_params,
    classify_vertex,
    components,
    default_future_radius,
    drift_statistics,
    future_set,
    local_component,
    mesoscopic_census,
    string_congestion,
)


def _vacant(n, vertices):
    return VertexSet.from_vertices(n, vertices)


def _params(**overrides):
    values = dict(
        n=30, d=3, u=1.0, beta=0.0, epsilon=0.0, h=1.0, l0=5, l1=2,
        tree_radius=3, small_size=100.0, v_plus=0.5, m_minus=1.5,
    )
    values.update(overrides)
    return ClassifyParams(**values)


def _bundle(n, visits):
    segments = tuple(
        Trajectory(vertices=list(vs), jump_times=list(range(1, len(vs))), horizon=float(len(vs)), n=n)
        for vs in visits
    )
    return SegmentBundle(segments=segments, L=1.0, ell=1.0)


class TestUnionFind:
    """Test the disjoint-set forest."""

    def test_union(self):
        """Unions merge once and count components."""
        uf = UnionFind(5)
        assert uf.union(0, 1)
        assert uf.union(3, 4)
        assert not uf.union(1, 0)
        assert uf.find(0) == uf.find(1)
        assert uf.find(2) != uf.find(3)
        assert uf.num_components == 3


class TestComponents:
    """Test vacant components."""

    def test_petersen(self, petersen):
        """{0,1,2,3} and {9} are the vacant components."""
        summary = components(petersen, _vacant(10, [0, 1, 2, 3, 9]))
        assert summary.sizes == [4, 1]
        assert summary.c_max_size == 4
        assert summary.c_sec_size == 1
        assert summary.component_count == 2
        assert summary.vacant_count == 5
        assert summary.labels[3] == 0
        assert summary.labels[9] == 9
        assert summary.labels[5] == -1
        assert list(summary.component_of(2)) == [0, 1, 2, 3]
        assert list(summary.vertex_sizes()) == [4, 4, 4, 4, 0, 0, 0, 0, 0, 1]

    def test_empty(self, petersen):
        """No vacant vertex, no component."""
        summary = components(petersen, _vacant(10, []))
        assert summary.sizes == []
        assert summary.c_max_size == 0
        assert summary.c_sec_size == 0

    def test_matches_networkx(self, cubic200):
        """Component sizes agree with networkx on the induced subgraph."""
        bits = make_rng(5).random(200) < 0.6
        summary = components(cubic200, bits)
        nxg = nx.Graph()
        nxg.add_nodes_from(np.flatnonzero(bits).tolist())
        nxg.add_edges_from((a, b) for a, b in cubic200.edges().tolist() if bits[a] and bits[b])
        expected = sorted((len(c) for c in nx.connected_components(nxg)), reverse=True)
        assert summary.sizes == expected

    def test_wrong_size(self, petersen):
        """Configurations must match the graph."""
        with pytest.raises(ValidationError):
            components(petersen, np.ones(9, dtype=bool))

    def test_local_component(self, petersen):
        """Restricting to B cuts the component."""
        config = _vacant(10, [0, 1, 2, 3])
        assert list(local_component(petersen, config, 0, [0, 1, 3])) == [0, 1]
        with pytest.raises(ValidationError):
            local_component(petersen, config, 2, [0, 1])

    def test_mesoscopic_census(self, petersen):
        """Vertices in components of at least the threshold."""
        config = _vacant(10, [0, 1, 2, 3, 9])
        assert mesoscopic_census(petersen, config, 3) == 4
        assert mesoscopic_census(petersen, config, 1) == 5
        assert mesoscopic_census(petersen, config, 5) == 0


class TestBoundaries:
    """Test boundary components, futures and string counts."""

    def test_boundary_component(self, petersen):
        """All vacant: the sphere of radius l."""
        config = VertexSet.full(10)
        assert list(boundary_component(petersen, config, 0, 0)) == [0]
        assert list(boundary_component(petersen, config, 0, 1)) == [1, 4, 5]
        assert len(boundary_component(petersen, config, 0, 2)) == 6
        assert len(boundary_component(petersen, _vacant(10, [1, 4, 5]), 0, 1)) == 0
        with pytest.raises(ValidationError):
            boundary_component(petersen, config, 0, -1)

    def test_string_congestion(self, petersen):
        """Layers 1, 3, 6 give 1*6 + 3*3 + 6*1."""
        config = VertexSet.full(10)
        assert string_congestion(petersen, config, 0, 2) == 21
        assert string_congestion(petersen, config, 0, 0) == 1
        with pytest.raises(ValidationError):
            string_congestion(petersen, config, 0, -1)

    def test_proper_future(self, tutte_coxeter):
        """Girth 8: the future of a neighbour within radius 2 is a cherry."""
        y = int(tutte_coxeter.neighbours(0)[0])
        future, proper = future_set(tutte_coxeter, [0], y, 2)
        assert len(future) == 3
        assert y in future
        assert proper

    def test_improper_future(self, petersen):
        """In the Petersen graph the future of 2 from {0, 1} touches 0."""
        future, proper = future_set(petersen, [0, 1], 2, 2)
        assert len(future) == 8
        assert not proper

    def test_future_errors(self, petersen):
        """Bad radii, interior or far vertices and disconnected sets are refused."""
        with pytest.raises(ValidationError):
            future_set(petersen, [0], 1, 0)
        with pytest.raises(ValidationError):
            future_set(petersen, [0, 1], 1, 2)
        with pytest.raises(ValidationError):
            future_set(petersen, [0], 7, 2)
        with pytest.raises(DisconnectedSetError):
            future_set(petersen, [0, 2], 1, 2)


class TestClassification:
    """Test the small/proper/bad classification."""

    def test_params(self):
        """n = 2^12 on the cubic graph: ld n = 12."""
        prm = classify_params(4096, 3, 1.0, beta=0.26)
        assert prm.epsilon == 1 / 32
        assert prm.l1 == 3
        assert prm.tree_radius == 15
        assert prm.small_size == pytest.approx(144.0)
        assert prm.proper_threshold == pytest.approx(0.5 * 4096 ** (prm.v_plus * 0.26))
        v_minus = interlacement_params(3, 1.0 - 1 / 32).v_u
        assert prm.l0 == math.ceil(10 * math.log(math.log(4096)) / v_minus)

    def test_params_near_critical(self):
        """u(1+eps) must stay below u*."""
        with pytest.raises(ValidationError):
            classify_params(4096, 3, 4.0, epsilon=0.1)
        with pytest.raises(ValidationError):
            classify_params(4096, 3, 0.0)

    def test_occupied_is_small(self, tutte_coxeter):
        """An occupied vertex has an empty cluster."""
        config = _vacant(30, [])
        assert classify_vertex(tutte_coxeter, config, 0, _params()) is VertexClass.SMALL

    def test_proper(self, tutte_coxeter):
        """A cluster reaching past l1 with a large boundary is proper."""
        config = VertexSet.full(30)
        assert classify_vertex(tutte_coxeter, config, 0, _params()) is VertexClass.PROPER

    def test_small_when_contained(self, tutte_coxeter):
        """The whole graph fits within l1 = 10 and 1000 vertices."""
        config = VertexSet.full(30)
        prm = _params(l1=10, small_size=1000.0)
        assert classify_vertex(tutte_coxeter, config, 0, prm) is VertexClass.SMALL

    def test_bad(self, tutte_coxeter):
        """A thin boundary or a cycle in the tree ball makes x bad."""
        config = VertexSet.full(30)
        assert classify_vertex(tutte_coxeter, config, 0, _params(h=100.0)) is VertexClass.BAD
        assert classify_vertex(tutte_coxeter, config, 0, _params(tree_radius=4)) is VertexClass.BAD

    def test_census(self, tutte_coxeter):
        """The census covers every vertex once."""
        counts = classification_census(tutte_coxeter, VertexSet.full(30), _params())
        assert sum(counts.values()) == 30
        assert counts[VertexClass.PROPER] == 30
        partial = classification_census(tutte_coxeter, VertexSet.full(30), _params(), [0, 1])
        assert sum(partial.values()) == 2


class TestExploration:
    """Test the instrumented breadth-first search."""

    def test_queue_bookkeeping(self, petersen):
        """q_{k+1} = q_k + r_k, and occupied pops have r = -1."""
        bundle = _bundle(10, [[2, 3], [7], [3, 4]])
        trace = bfs_explore_instrumented(petersen, bundle, 0, K_cap=100.0, r=1)
        steps = trace.steps
        assert trace.termination_reason is TerminationReason.QUEUE_EMPTY
        assert steps[0].vertex == 0
        assert steps[0].state is VertexState.EXPLORED_VACANT
        assert steps[0].r == 2
        assert steps[0].proper_future is None
        for before, after in zip(steps, steps[1:]):
            assert after.q == before.q + before.r
            assert after.explored_vacant + after.explored_occupied == before.k
        for step in steps:
            occupied = step.vertex in (2, 3, 4, 7)
            assert step.state is (VertexState.EXPLORED_OCCUPIED if occupied else VertexState.EXPLORED_VACANT)
            if occupied:
                assert step.r == -1
            if step.k >= 2:
                assert isinstance(step.proper_future, bool)
        assert steps[-1].q + steps[-1].r == 0

    def test_ties(self, petersen):
        """Every segment through an explored occupied vertex gets tied once."""
        bundle = _bundle(10, [[2, 3], [7], [3, 4]])
        trace = bfs_explore_instrumented(petersen, bundle, 0, K_cap=100.0, r=1)
        last = trace.steps[-1]
        assert last.free_count + last.tied_count == 3
        assert trace.segment_count == 3
        assert {s.vertex for s in trace.steps} == set(range(10))

    def test_occupied_start(self, petersen):
        """An occupied start is explored and the search ends."""
        trace = bfs_explore_instrumented(petersen, _bundle(10, [[0]]), 0, r=1)
        assert len(trace.steps) == 1
        assert trace.steps[0].r == -1
        assert trace.explored_vacant == 0

    def test_size_cap(self, petersen):
        """The search stops after K_cap * ld n explored-vacant vertices."""
        trace = bfs_explore_instrumented(petersen, _bundle(10, [[9]]), 0, K_cap=0.1, r=1)
        assert trace.termination_reason is TerminationReason.SIZE_CAP
        assert trace.explored_vacant == 1

    def test_count_limits_segments(self, petersen):
        """Only the first `count` segments occupy vertices."""
        trace = bfs_explore_instrumented(petersen, _bundle(10, [[5], [0]]), 0, count=1, r=1)
        assert trace.steps[0].state is VertexState.EXPLORED_VACANT
        assert trace.segment_count == 1

    def test_bad_start(self, petersen):
        """The start must be a vertex."""
        with pytest.raises(ValidationError):
            bfs_explore_instrumented(petersen, _bundle(10, [[1]]), 10)

    def test_future_radius(self):
        """The default radius is at least 2."""
        assert default_future_radius(10, 3) >= 2
        assert default_future_radius(2**16, 3) >= default_future_radius(2**8, 3)

    @pytest.mark.parametrize("r", [1, 2, 3, 6])
    def test_proper_flags_match_future_set(self, cubic200, r):
        """Per-step properness equals future_set on the set explored so far."""
        bundle = sample_segments(cubic200, 6, 8.0, make_rng(21))
        for x in (0, 57, 123):
            trace = bfs_explore_instrumented(cubic200, bundle, x, K_cap=100.0, r=r)
            explored = []
            for step in trace.steps:
                if step.k >= 2:
                    assert step.proper_future == future_set(cubic200, explored, step.vertex, r)[1]
                explored.append(step.vertex)

    def test_future_radius_is_capped(self):
        """The capped radius stays within the tree-like radius floor(alpha1 ld n)."""
        assert default_future_radius(2**14, 3) == 26
        assert capped_future_radius(2**14, 3) == 2
        assert capped_future_radius(2**22, 3) == 4
        assert capped_future_radius(2**22, 3, alpha1=10.0) == default_future_radius(2**22, 3)


class TestDrift:
    """Test the drift summary of explorations."""

    @staticmethod
    def _step(k, r, proper):
        return ExplorationStep(k, k, VertexState.EXPLORED_VACANT, 1, r, 0, 0, 0, 0, proper)

    def test_statistics(self):
        """Down steps are counted over proper steps only."""
        trace = ExplorationTrace(
            start=0,
            steps=[self._step(1, 2, None), self._step(2, -1, True), self._step(3, 1, True), self._step(4, -1, False)],
            termination_reason=TerminationReason.QUEUE_EMPTY,
            segment_count=0,
        )
        stats = drift_statistics([trace])
        assert stats["proper_steps"] == 2
        assert stats["down_steps"] == 1
        assert stats["down_frequency"] == pytest.approx(0.5)
        assert stats["max_failures"] == 1

    def test_empty(self):
        """No traces, no frequency."""
        stats = drift_statistics([])
        assert math.isnan(stats["down_frequency"])
        assert stats["mean_failures"] == 0.0
