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
Tests for random walks, bridges and jump statistics.
"""

import math

import numpy as np
import pytest
from scipy import stats

from lacuna.exceptions import BridgeTruncationError, UnreachableEndpointError, ValidationError
from lacuna.graph import distances_from_set
from lacuna.models import Provenance, Trajectory
from lacuna.utils import make_rng, poisson_cutoff
from lacuna.walk import BridgeSampler, jump_stats, range_of, sample_bridge, sample_walk, vacant_set


class TestSampleWalk:
    """Test continuous-time walk sampling."""

    def test_walk_follows_edges(self, petersen):
        """Every skeleton step is an edge and times are sorted."""
        traj = sample_walk(petersen, 0, 50.0, make_rng(1))
        assert traj.start == 0
        assert traj.horizon == 50.0
        assert traj.check_adjacent(petersen)
        assert np.all(np.diff(traj.jump_times) >= 0)

    def test_deterministic_for_seed(self, cubic200):
        """Same stream, same trajectory."""
        a = sample_walk(cubic200, None, 100.0, make_rng(4))
        b = sample_walk(cubic200, None, 100.0, make_rng(4))
        assert np.array_equal(a.vertices, b.vertices)
        assert np.array_equal(a.jump_times, b.jump_times)

    def test_zero_horizon(self, k4):
        """T = 0 gives a single vertex and no jumps."""
        traj = sample_walk(k4, 2, 0.0, make_rng(0))
        assert traj.n_jumps == 0
        assert traj.end == 2

    def test_jump_count_is_poisson(self, cubic200):
        """The jump count over [0, T] has mean T."""
        T = 10_000.0
        traj = sample_walk(cubic200, None, T, make_rng(2))
        assert abs(traj.n_jumps - T) < 5 * math.sqrt(T)

    def test_invalid_arguments(self, k4):
        """Negative horizons and bad starts are rejected."""
        with pytest.raises(ValidationError):
            sample_walk(k4, 0, -1.0, make_rng(0))
        with pytest.raises(ValidationError):
            sample_walk(k4, 7, 1.0, make_rng(0))


class TestTrajectory:
    """Test the Trajectory model."""

    def test_position_at(self):
        """Right-continuous positions."""
        traj = Trajectory(vertices=[0, 1, 2], jump_times=[1.0, 2.0], horizon=3.0, n=4)
        assert traj.position_at(0.0) == 0
        assert traj.position_at(0.999) == 0
        assert traj.position_at(1.0) == 1
        assert traj.position_at(3.0) == 2
        with pytest.raises(ValidationError):
            traj.position_at(3.5)

    def test_invalid_trajectories(self):
        """Mismatched lengths and unsorted times are rejected."""
        with pytest.raises(ValidationError):
            Trajectory(vertices=[0, 1], jump_times=[], horizon=1.0, n=4)
        with pytest.raises(ValidationError):
            Trajectory(vertices=[0, 1, 2], jump_times=[2.0, 1.0], horizon=3.0, n=4)
        with pytest.raises(ValidationError):
            Trajectory(vertices=[0, 1], jump_times=[5.0], horizon=3.0, n=4)

    def test_dump(self):
        """Header then one line per visit."""
        traj = Trajectory(vertices=[0, 1], jump_times=[0.5], horizon=1.0, n=4)
        assert traj.dump() == "1 1\n0 0\n1 0.5\n"

    def test_check_adjacent_detects_teleport(self, petersen):
        """0 and 2 are not adjacent in the Petersen graph."""
        traj = Trajectory(vertices=[0, 2], jump_times=[0.5], horizon=1.0, n=10)
        assert not traj.check_adjacent(petersen)


class TestRangeAndVacancy:
    """Test ranges and vacant sets."""

    def test_range_includes_start(self):
        """The position at time s belongs to the range."""
        traj = Trajectory(vertices=[0, 1, 2], jump_times=[1.0, 2.0], horizon=3.0, n=4)
        assert list(range_of(traj, 0.0, 0.0)) == [0]
        assert list(range_of(traj, 1.5, 3.0)) == [1, 2]
        assert list(range_of(traj, 0.0, 3.0)) == [0, 1, 2]

    def test_range_bad_interval(self):
        """Intervals must lie inside [0, horizon]."""
        traj = Trajectory(vertices=[0], jump_times=[], horizon=1.0, n=4)
        with pytest.raises(ValidationError):
            range_of(traj, 0.5, 0.2)
        with pytest.raises(ValidationError):
            range_of(traj, 0.0, 2.0)

    def test_vacant_set_complements_range(self, cubic200):
        """Vacant = not visited up to u n."""
        traj = sample_walk(cubic200, None, 400.0, make_rng(3))
        config = vacant_set(cubic200, traj, 1.0)
        visited = range_of(traj, 0.0, 200.0)
        assert np.array_equal(config.bits, ~visited.bits)
        assert config.provenance is Provenance.FULL_WALK
        assert config.u_level == 1.0

    def test_vacant_set_monotone_in_u(self, cubic200):
        """Vacant sets shrink as u grows on one trajectory."""
        traj = sample_walk(cubic200, None, 600.0, make_rng(5))
        small = vacant_set(cubic200, traj, 1.0).vacant_set()
        large = vacant_set(cubic200, traj, 3.0).vacant_set()
        assert large.issubset(small)

    def test_level_zero(self, cubic200):
        """Only the start vertex is occupied at u = 0."""
        traj = sample_walk(cubic200, 17, 0.0, make_rng(0))
        config = vacant_set(cubic200, traj, 0.0)
        assert config.vacant_count == 199
        assert not config.is_vacant(17)

    def test_short_trajectory(self, cubic200):
        """The trajectory must reach u n."""
        traj = sample_walk(cubic200, None, 10.0, make_rng(0))
        with pytest.raises(ValidationError):
            vacant_set(cubic200, traj, 1.0)
        with pytest.raises(ValidationError):
            vacant_set(cubic200, traj, -1.0)


def _k4_power(k: int) -> np.ndarray:
    P = (np.ones((4, 4)) - np.eye(4)) / 3.0
    return np.linalg.matrix_power(P, k)


class TestBridges:
    """Test exact bridge sampling."""

    def test_endpoints_on_k4(self, k4):
        """Every bridge starts at x and ends at y."""
        rng = make_rng(9)
        sampler = BridgeSampler(k4, 1, 2.0)
        for _ in range(2000):
            bridge = sampler.sample(0, rng)
            assert bridge.start == 0 and bridge.end == 1
            assert bridge.check_adjacent(k4)
            assert bridge.horizon == 2.0

    def test_jump_count_law_on_k4(self, k4):
        """Law of k is proportional to Poisson(ell)(k) P^k(x, y)."""
        ell = 2.0
        sampler = BridgeSampler(k4, 1, ell)
        ks = np.arange(sampler.k_max + 1)
        weights = stats.poisson.pmf(ks, ell) * (1 - (-1.0 / 3.0) ** ks) / 4.0
        np.testing.assert_allclose(sampler.jump_count_law(0), weights / weights.sum(), atol=1e-12)

    def test_first_step_chi_square(self, k4):
        """The first skeleton step matches its exact conditional law."""
        ell = 2.0
        sampler = BridgeSampler(k4, 1, ell)
        law = sampler.jump_count_law(0)
        exact = np.zeros(4)
        for k in range(1, law.size):
            total = _k4_power(k)[0, 1]
            for w in (1, 2, 3):
                exact[w] += law[k] * (1.0 / 3.0) * _k4_power(k - 1)[w, 1] / total

        rng = make_rng(11)
        samples = 20_000
        counts = np.zeros(4)
        for _ in range(samples):
            bridge = sampler.sample(0, rng)
            counts[bridge.vertices[1]] += 1
        support = exact > 0
        result = stats.chisquare(counts[support], exact[support] / exact[support].sum() * samples)
        assert result.pvalue > 0.001

    def test_time_reversal_on_k4(self, k4):
        """A reversed y-to-x bridge has the law of an x-to-y bridge."""
        ell = 2.0
        samples = 5000
        forward = BridgeSampler(k4, 1, ell)
        backward = BridgeSampler(k4, 0, ell)
        rng = make_rng(13)
        mids = np.zeros((2, 4))
        jumps = np.zeros((2, 6))
        for _ in range(samples):
            a = forward.sample(0, rng).vertices
            b = backward.sample(1, rng).vertices[::-1]
            assert b[0] == 0 and b[-1] == 1
            for row, skel in enumerate((a, b)):
                mids[row, skel[skel.size // 2]] += 1
                jumps[row, min(skel.size - 1, 5)] += 1
        for table in (mids, jumps):
            table = table[:, table.sum(axis=0) > 0]
            assert stats.chi2_contingency(table).pvalue > 0.001

    def test_short_bridge_crosses_graph(self, cubic200):
        """Bridges much shorter than the graph distance still reach y."""
        rng = make_rng(17)
        far = int(np.argmax(distances_from_set(cubic200, [0])))
        bridge = sample_bridge(cubic200, far, 0, 0.01, rng)
        assert bridge.start == far and bridge.end == 0
        assert bridge.check_adjacent(cubic200)
        assert bridge.n_jumps >= distances_from_set(cubic200, [0])[far]

    def test_zero_duration(self, k4):
        """A bridge of length zero exists only from y to y."""
        rng = make_rng(0)
        assert sample_bridge(k4, 2, 2, 0.0, rng).n_jumps == 0
        with pytest.raises(UnreachableEndpointError):
            sample_bridge(k4, 0, 2, 0.0, rng)

    def test_truncation_budget(self, k4):
        """Absurd durations are refused before allocation."""
        with pytest.raises(BridgeTruncationError):
            BridgeSampler(k4, 0, 1e7)

    def test_invalid_target(self, k4):
        """Targets must be vertices."""
        with pytest.raises(ValidationError):
            BridgeSampler(k4, 9, 1.0)

    def test_cutoff_covers_mean(self):
        """The truncation is at least mean + 12 sqrt(mean)."""
        assert poisson_cutoff(100.0) >= 220
        assert poisson_cutoff(0.0) == 0


class TestJumpStats:
    """Test jump-count reports."""

    def test_flags(self):
        """Segments outside (h/2, 2h) and long bridges are flagged."""
        lazy = Trajectory(vertices=[0], jump_times=[], horizon=10.0, n=4)
        busy = Trajectory(vertices=[0, 1] * 15 + [0], jump_times=np.linspace(0, 10, 30), horizon=10.0, n=4)
        fine = Trajectory(vertices=[0] + [1, 0] * 5, jump_times=np.linspace(0, 10, 10), horizon=10.0, n=4)
        report = jump_stats([lazy, busy, fine], [busy])
        assert report.flagged_segments == [0, 1]
        assert report.segment_counts == [0, 30, 10]
        assert report.bridge_counts == [30]
        assert report.flagged_bridges == [0]  # 30 > ln(4)^3
        assert report.segment_flag_rate == pytest.approx(2 / 3)
        assert not report.clean

    def test_empty(self):
        """No trajectories, no flags."""
        report = jump_stats([])
        assert report.clean
        assert report.segment_flag_rate == 0.0

    def test_long_segments_are_clean(self, cubic200):
        """Segments of length 200 essentially never leave (h/2, 2h)."""
        rng = make_rng(6)
        segments = [sample_walk(cubic200, None, 200.0, rng) for _ in range(20)]
        assert jump_stats(segments).flagged_segments == []
