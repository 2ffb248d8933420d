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
Tests for lacuna data models.
"""

import numpy as np
import pytest

from lacuna.exceptions import ValidationError
from lacuna.models import (
    AssumptionReport,
    ClusterHistogram,
    ComponentSummary,
    ExperimentConfig,
    PimParams,
    Provenance,
    QuasiStationaryResult,
    SweepRecord,
    TreeClusterSample,
    VacantConfig,
    VerificationRecord,
    VertexClass,
    VertexState,
)


def _pim_params(**overrides):
    values = dict(
        n=1024, d=3, u=1.0, gamma=0.5, L=32.0, ell=48.0, count_floor=12, count_ceil=13,
        epsilon=1 / 32, beta=0.002, delta=0.1, q_sprinkle=0.25, J=6, u_prime=2.5, u_n=1.5,
    )
    values.update(overrides)
    return PimParams(**values)


class TestEnums:
    """Test enum values used in output files."""

    def test_vertex_states(self):
        """States print with hyphens."""
        assert VertexState.EXPLORED_VACANT.value == "explored-vacant"
        assert VertexState.EXPLORED_OCCUPIED.value == "explored-occupied"

    def test_vertex_classes(self):
        """Three classes."""
        assert {c.value for c in VertexClass} == {"small", "proper", "bad"}


class TestPimParams:
    """Test PimParams invariants."""

    def test_count_for(self):
        """Counts are floor or ceil of level n / (L + ell)."""
        prm = _pim_params()
        assert prm.count_for(1.0) == 12
        assert prm.count_for(1.0, "ceil") == 13

    @pytest.mark.parametrize(
        "overrides",
        [{"L": 0.0}, {"ell": -1.0}, {"count_ceil": 11}, {"count_ceil": 14}, {"q_sprinkle": 1.0}],
    )
    def test_invalid(self, overrides):
        """Lengths, counts and q are checked on construction."""
        with pytest.raises(ValidationError):
            _pim_params(**overrides)


class TestSweepRecord:
    """Test sweep record validation."""

    def test_valid(self):
        """A consistent record validates."""
        SweepRecord(1024, 3, 1.0, 0, 700, 5, 800, None, 1.0).validate()

    @pytest.mark.parametrize(
        "c_max,c_sec,vacant",
        [(5, 700, 800), (900, 5, 800), (700, 5, 2000)],
    )
    def test_invalid(self, c_max, c_sec, vacant):
        """c_sec <= c_max <= vacant_count <= n."""
        with pytest.raises(ValidationError):
            SweepRecord(1024, 3, 1.0, 0, c_max, c_sec, vacant, True, 1.0).validate()


class TestExperimentConfig:
    """Test experiment config validation."""

    def test_defaults(self):
        """Defaults validate."""
        config = ExperimentConfig()
        config.validate()
        assert config.seeds == [0]
        assert config.variant == "floor"

    @pytest.mark.parametrize(
        "overrides",
        [
            {"n": 0},
            {"d": 2},
            {"replicas": 0},
            {"gamma": 1.0},
            {"gamma": -0.5},
            {"u_grid": [2.0, 1.0]},
            {"u_grid": [-1.0]},
            {"variant": "round"},
            {"seeds": [-1]},
            {"K": 0.0},
            {"r": 0},
        ],
    )
    def test_invalid(self, overrides):
        """Out-of-range fields are rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig(**overrides).validate()


class TestResults:
    """Test small result containers."""

    def test_verification_record(self):
        """to_dict uses the output key names."""
        record = VerificationRecord("EH_upper", {"n": 10}, np.float64(0.5), 1, True)
        assert record.to_dict() == {
            "check": "EH_upper",
            "inputs": {"n": 10},
            "lhs": 0.5,
            "rhs": 1.0,
            "pass": True,
            "note": "",
        }

    def test_tree_cluster_sample(self):
        """Size and depth of a root cluster."""
        sample = TreeClusterSample(frozenset({(), (0,), (0, 1)}))
        assert sample.size == 3
        assert sample.depth == 2
        assert TreeClusterSample(frozenset()).depth == -1

    def test_histogram_frequencies(self):
        """Frequencies divide by the sample count, capped samples included."""
        hist = ClusterHistogram(counts={0: 2, 1: 1, 9: 1}, capped=1, samples=5)
        np.testing.assert_allclose(hist.frequencies(2), [0.4, 0.2, 0.0])

    def test_assumption_report(self):
        """A2 needs a threshold."""
        report = AssumptionReport(True, 2, True, [], 0.3, 5, 0.2)
        assert report.a2_ok(0.1)
        assert not report.a2_ok(0.5)
        with pytest.raises(ValidationError):
            report.a2_ok()

    def test_quasi_stationary_exit_time(self):
        """The exit time is 1 / (1 - lambda)."""
        result = QuasiStationaryResult(np.zeros(3), 0.75, 10)
        assert result.expected_exit_time == pytest.approx(4.0)

    def test_vacant_config(self):
        """Vacancy bits are read only."""
        config = VacantConfig(bits=[True, False, True], provenance=Provenance.FULL_WALK, u_level=1.0)
        assert config.vacant_count == 2
        assert config.is_vacant(2)
        with pytest.raises(ValueError):
            config.bits[0] = False

    def test_component_summary(self):
        """Sizes per vertex from labels."""
        summary = ComponentSummary(labels=np.array([0, 0, -1, 3]), sizes=[2, 1])
        assert list(summary.vertex_sizes()) == [2, 2, 0, 1]
        assert list(summary.component_of(2)) == []
