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
Tests for hitting times, potentials and the quasi-stationary law.
"""

import math

import numpy as np
import pytest
from scipy import sparse

from lacuna.exceptions import OracleSizeError, SingularSystemError, ValidationError
from lacuna.potential import (
    MarkovChain,
    as_chain,
    capacity,
    conditional_avoid_probability,
    conditional_rate,
    dirichlet_form,
    equilibrium_potential,
    eratio_profile,
    eratio_slope,
    expected_hitting_time,
    hitpoint_rate,
    quasi_stationary,
    survival_probability,
    variational_identity_check,
    verify_boundary_hitting,
    verify_EH_bounds,
    verify_quasi_stationary,
)


class TestHittingTimes:
    """Test expected hitting times."""

    def test_complete_graph(self, k4):
        """From any other vertex of K4 the hitting time is Exp(1/3)."""
        solution = expected_hitting_time(k4, [0])
        np.testing.assert_allclose(solution.expected_times, [0.0, 3.0, 3.0, 3.0], atol=1e-12)
        assert solution.stationary_mean == pytest.approx(9 / 4)

    def test_petersen(self, petersen):
        """Neighbours take 9 steps on average, distance-two vertices 12."""
        solution = expected_hitting_time(petersen, [0])
        assert solution.expected_times[1] == pytest.approx(9.0)
        assert solution.expected_times[7] == pytest.approx(12.0)
        assert solution.stationary_mean == pytest.approx(9.9)

    def test_minimizer_normalization(self, petersen):
        """f* is 1 on A and has stationary mean 0."""
        solution = expected_hitting_time(petersen, [0, 5])
        assert solution.f_star[0] == pytest.approx(1.0)
        assert float(np.mean(solution.f_star)) == pytest.approx(0.0, abs=1e-12)

    def test_unreachable_target(self, two_k4):
        """A disconnected chain cannot hit a set in one component from the other."""
        with pytest.raises(SingularSystemError):
            expected_hitting_time(two_k4, [0])

    def test_empty_target(self, k4):
        """The target set must be nonempty."""
        with pytest.raises(SingularSystemError):
            expected_hitting_time(k4, [])

    def test_oracle_size_limit(self):
        """Chains above the oracle limit are refused."""
        big = MarkovChain(P=sparse.identity(50_001, format="csr"), pi=np.full(50_001, 1 / 50_001))
        with pytest.raises(OracleSizeError):
            as_chain(big)


class TestPotentials:
    """Test equilibrium potentials, Dirichlet forms and capacities."""

    def test_gamblers_ruin(self, ruin_chain):
        """Up with 1/3 from 1: reach 3 before 0 with probability 1/7."""
        field = equilibrium_potential(ruin_chain, [3], [0])
        assert field.values[1] == pytest.approx(1 / 7)
        assert field.values[2] == pytest.approx(3 / 7)
        assert field.values[3] == 1.0
        assert field.values[0] == 0.0

    def test_capacity_is_energy(self, petersen):
        """cap(A, C) = D(g*, g*)."""
        A, C = [0], [7, 8]
        field = equilibrium_potential(petersen, A, C)
        energy = dirichlet_form(petersen, field.values, field.values)
        assert capacity(petersen, A, C) == pytest.approx(energy, rel=1e-10)

    def test_invalid_boundaries(self, k4):
        """Boundaries must be nonempty and disjoint."""
        with pytest.raises(ValidationError):
            equilibrium_potential(k4, [0], [0, 1])
        with pytest.raises(ValidationError):
            equilibrium_potential(k4, [], [1])

    def test_dirichlet_shape(self, k4):
        """Functions must cover every state."""
        with pytest.raises(ValidationError):
            dirichlet_form(k4, [1.0, 0.0], [1.0, 0.0])

    def test_birth_death_arguments(self):
        """R and p_up are validated."""
        with pytest.raises(ValidationError):
            MarkovChain.birth_death(0, 0.5)
        with pytest.raises(ValidationError):
            MarkovChain.birth_death(3, 1.0)


class TestBounds:
    """Test the hitting-time sandwiches."""

    def test_variational_identity(self, petersen):
        """1/E[H_A] equals the Dirichlet energy of f*."""
        record = variational_identity_check(petersen, [0, 3])
        assert record.passed is True
        assert record.lhs == pytest.approx(record.rhs)

    @pytest.mark.parametrize("A,C", [([0], [7, 8, 9]), ([0, 1], [7, 8]), ([0], [1])])
    def test_eh_bounds(self, petersen, A, C):
        """Both sides of the capacity sandwich hold."""
        records = verify_EH_bounds(petersen, A, C)
        assert [r.check for r in records] == ["EH_lower", "EH_upper"]
        assert all(r.passed for r in records)

    def test_eh_overlap(self, k4):
        """A and C must be disjoint."""
        with pytest.raises(ValidationError):
            verify_EH_bounds(k4, [0], [0])

    def test_quasi_stationary_complete_graph(self, k4):
        """Killed on one vertex, K4 survives each jump with probability 2/3."""
        result = quasi_stationary(k4, [0])
        assert result.eigenvalue == pytest.approx(2 / 3)
        assert result.expected_exit_time == pytest.approx(3.0)
        np.testing.assert_allclose(result.distribution, [0.0, 1 / 3, 1 / 3, 1 / 3])

    def test_quasi_stationary_disconnected(self, petersen):
        """Killing every neighbour of 0 isolates it."""
        with pytest.raises(ValidationError):
            quasi_stationary(petersen, [1, 4, 5])

    def test_quasi_stationary_bounds(self, petersen):
        """Flow, mean and tail sandwiches all hold."""
        records = verify_quasi_stationary(petersen, [0], times=(1.0, 10.0))
        assert len(records) == 7
        assert all(r.passed for r in records)


class TestSurvival:
    """Test survival probabilities and decay rates."""

    def test_exponential_survival(self, k4):
        """From 1 the time to hit 0 in K4 is Exp(1/3)."""
        assert survival_probability(k4, [0], 1, 2.0) == pytest.approx(math.exp(-2 / 3), rel=1e-9)
        assert survival_probability(k4, [0], None, 2.0) == pytest.approx(0.75 * math.exp(-2 / 3), rel=1e-9)

    def test_survival_edges(self, k4):
        """T = 0 gives the mass outside A; bad arguments are refused."""
        assert survival_probability(k4, [0], None, 0.0) == pytest.approx(0.75)
        with pytest.raises(ValidationError):
            survival_probability(k4, [0], None, -1.0)
        with pytest.raises(ValidationError):
            survival_probability(k4, [], None, 1.0)

    @pytest.mark.parametrize("fixture", ["petersen", "tutte_coxeter", "cubic200"])
    def test_survival_monotone(self, request, fixture):
        """P[H_A > T] falls as T grows and as A is enlarged."""
        g = request.getfixturevalue(fixture)
        A, B = [0], [1, 5]
        times = [0.0, 0.5, 2.0, 10.0, 40.0]
        for nu in (None, 3):
            values = [survival_probability(g, A, nu, T) for T in times]
            assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))
            for T in times:
                assert survival_probability(g, A, nu, T) >= survival_probability(g, A + B, nu, T) - 1e-10

    def test_hitpoint_rate(self, k4):
        """-(n/T) ln(3/4 e^{-T/3})."""
        T = 3.0
        expected = 4 / 3 - (4 / T) * math.log(0.75)
        assert hitpoint_rate(k4, 0, T) == pytest.approx(expected, rel=1e-9)

    def test_conditional_avoid(self, k4):
        """Avoiding {0, 1} given avoiding 0 on K4 from stationarity is (2/3) e^{-T/3}."""
        T = 1.5
        expected = (2 / 3) * math.exp(-T / 3)
        assert conditional_avoid_probability(k4, [0], 1, T) == pytest.approx(expected, rel=1e-9)
        assert conditional_rate(k4, [0], 1, T) == pytest.approx(-(4 / T) * math.log(expected), rel=1e-9)

    def test_conditional_avoid_member(self, k4):
        """y must lie outside A."""
        with pytest.raises(ValidationError):
            conditional_avoid_probability(k4, [0, 1], 1, 1.0)


class TestBoundaryHitting:
    """Test hitting an inner ball before leaving an outer one."""

    def test_star(self, petersen):
        """From a neighbour, step back to the centre before leaving with 1/3."""
        report = verify_boundary_hitting(petersen, 0, 0, 1)
        assert report.tree_excess == 0
        assert report.tree_value == pytest.approx(1 / 3)
        assert set(report.probabilities) == {1, 4, 5}
        assert report.record.passed is True

    def test_deep_tree_ball(self, tutte_coxeter):
        """Girth 8 makes B(x, 3) a tree, so the value is 1/7 exactly."""
        report = verify_boundary_hitting(tutte_coxeter, 0, 1, 2)
        assert report.tree_value == pytest.approx(1 / 7)
        assert len(report.probabilities) == 12
        for value in report.probabilities.values():
            assert value == pytest.approx(1 / 7, abs=1e-10)
        assert report.record.check == "boundary_hitting_tree"

    def test_too_many_cycles(self, k5):
        """B(x, 1) in K5 carries six extra edges."""
        with pytest.raises(ValidationError):
            verify_boundary_hitting(k5, 0, 0, 1)

    def test_invalid_radii(self, petersen):
        """s must be positive."""
        with pytest.raises(ValidationError):
            verify_boundary_hitting(petersen, 0, 1, 0)


class TestHittingProfile:
    """Test the E-ratio profile."""

    def test_petersen_profile(self, petersen):
        """The worst vertex is at distance two for both s = 0 and s = 1."""
        profile = eratio_profile(petersen, [0], 5)
        assert [s for s, _ in profile] == [0, 1]
        for _, value in profile:
            assert value == pytest.approx(7 / 33)
        assert eratio_slope(profile) == pytest.approx(0.0, abs=1e-9)

    def test_slope_needs_points(self):
        """One point has no slope."""
        with pytest.raises(ValidationError):
            eratio_slope([(0, 0.5)])
