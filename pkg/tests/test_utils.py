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
Tests for lacuna utility functions.
"""

import math
from unittest.mock import patch

import numpy as np
import pytest

from lacuna.exceptions import ValidationError
from lacuna.utils import ld, make_rng, poisson_cutoff, run_replicas, spawn_rngs, tv_distance


class TestLogarithms:
    """Test base d-1 logarithms."""

    def test_ld(self):
        """ld is the logarithm in base d-1."""
        assert ld(8, 3) == pytest.approx(3.0)
        assert ld(81, 4) == pytest.approx(4.0)

    def test_ld_degree(self):
        """d = 2 has no base."""
        with pytest.raises(ValidationError):
            ld(8, 2)


class TestRandomStreams:
    """Test random stream helpers."""

    def test_make_rng_deterministic(self):
        """Equal seeds give equal streams."""
        assert np.array_equal(make_rng(7).random(5), make_rng(7).random(5))
        assert not np.array_equal(make_rng(7).random(5), make_rng(8).random(5))

    def test_make_rng_list_seed(self):
        """List seeds address sub-streams."""
        assert not np.array_equal(make_rng([3, 1]).random(5), make_rng([3, 2]).random(5))

    def test_spawn_rngs(self):
        """Spawned streams are distinct and reproducible."""
        first = [r.random() for r in spawn_rngs(5, 3)]
        again = [r.random() for r in spawn_rngs(5, 3)]
        assert first == again
        assert len(set(first)) == 3


class TestPoissonCutoff:
    """Test Poisson truncation."""

    @pytest.mark.parametrize("mean", [0.5, 4.0, 37.0, 1000.0])
    def test_cutoff(self, mean):
        """The cutoff clears mean + 12 sqrt(mean)."""
        assert poisson_cutoff(mean) >= mean + 12 * math.sqrt(mean)

    def test_zero_mean(self):
        """No jumps are needed at mean zero."""
        assert poisson_cutoff(0.0) == 0

    def test_negative_mean(self):
        """Means are nonnegative."""
        with pytest.raises(ValidationError):
            poisson_cutoff(-1.0)


class TestReplicas:
    """Test replica runs."""

    def test_sorted_unique_seeds(self):
        """Results come back in ascending seed order, once per seed."""
        assert run_replicas(lambda s: s * 10, [3, 1, 2, 1]) == [10, 20, 30]

    def test_threads_do_not_change_results(self):
        """Threaded runs match serial runs."""

        def replica(seed):
            return float(make_rng(seed).random())

        assert run_replicas(replica, range(8), threads=4) == run_replicas(replica, range(8))

    @patch("lacuna.utils.ThreadPoolExecutor")
    def test_serial_without_threads(self, mock_pool):
        """One thread never starts a pool."""
        run_replicas(lambda s: s, [0, 1, 2], threads=1)
        mock_pool.assert_not_called()


class TestTotalVariation:
    """Test total variation distances."""

    def test_identical(self):
        """Equal laws are at distance zero."""
        assert tv_distance([0.2, 0.8], [0.2, 0.8]) == 0.0

    def test_padding(self):
        """The shorter law is padded with zeros."""
        assert tv_distance([1.0], [0.5, 0.5]) == pytest.approx(0.5)
        assert tv_distance([0.0, 1.0], [1.0]) == pytest.approx(1.0)
