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
Spectral gap and the A0/A1/A2 assumption checks.
"""

import logging
from typing import List, Optional

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ..constants import DEFAULT_ALPHA1, DENSE_EIGEN_MAX_N, EIGEN_MAXITER, EIGEN_TOL
from ..exceptions import SpectralError, ValidationError
from ..models import AssumptionReport, RegularGraph, VerificationRecord
from ..utils import make_rng
from .structure import a1_violations, girth, treelike_radius

logger = logging.getLogger(__name__)


def _second_eigenvalue_dense(g: RegularGraph) -> float:
    eigenvalues = linalg.eigvalsh(g.transition_matrix().toarray())
    return float(eigenvalues[-2])


def _second_eigenvalue_iterative(g: RegularGraph) -> float:
    """Top eigenvalue of P restricted to functions orthogonal to constants."""
    P = g.transition_matrix()
    n = g.n

    def matvec(v: np.ndarray) -> np.ndarray:
        v = np.ravel(v)
        w = P @ (v - v.mean())
        return w - w.mean()

    operator = LinearOperator((n, n), matvec=matvec, dtype=float)
    v0 = make_rng(n).standard_normal(n)
    v0 -= v0.mean()
    try:
        values = eigsh(
            operator, k=1, which="LA", tol=EIGEN_TOL, maxiter=EIGEN_MAXITER, v0=v0,
            return_eigenvectors=False,
        )
    except ArpackNoConvergence as e:
        raise SpectralError(f"eigensolver did not converge for n={n}: {e}") from e
    return float(values[0])


def spectral_gap(g: RegularGraph) -> float:
    """
    lambda_G = 1 - lambda_2 of the transition operator.

    Dense eigendecomposition up to 2048 vertices, Lanczos on the deflated
    operator above.
    """
    if g.n <= DENSE_EIGEN_MAX_N:
        second = _second_eigenvalue_dense(g)
    else:
        second = _second_eigenvalue_iterative(g)
    return float(np.clip(1.0 - second, 0.0, 2.0))


def check_assumptions(
    g: RegularGraph, alpha1: float = DEFAULT_ALPHA1, alpha2: Optional[float] = None
) -> AssumptionReport:
    """
    Check regularity (A0), the tree-like condition (A1) and compute lambda_G (A2).

    Args:
        g: Connected regular graph
        alpha1: Tree-like radius factor
        alpha2: Spectral-gap threshold stored in the report

    Returns:
        AssumptionReport

    Raises:
        ValidationError: If g is not connected
        SpectralError: If the eigensolver does not converge
    """
    if not g.connected:
        raise ValidationError("assumption checks need a connected graph")
    degrees = np.bincount(g.adjacency.ravel(), minlength=g.n)
    a0_ok = bool(np.all(degrees == g.d))
    radius = treelike_radius(g, alpha1)
    violations: List[int] = a1_violations(g, radius)
    gap = spectral_gap(g)
    report = AssumptionReport(
        a0_ok=a0_ok,
        a1_radius=radius,
        a1_ok=not violations,
        a1_violations=violations,
        spectral_gap=gap,
        girth=girth(g),
        alpha1=alpha1,
        alpha2=alpha2,
    )
    logger.info(
        "assumptions n=%d d=%d: a1_radius=%d violations=%d gap=%.6f girth=%d",
        g.n, g.d, radius, len(violations), gap, report.girth,
    )
    return report


def cheeger_check(g: RegularGraph, profile: float) -> VerificationRecord:
    """
    Compare lambda_G with a sampled isoperimetric profile h.

    Records (h/d)^2/2 against lambda_G, the lower side of Cheeger's
    inequality in conductance form. The profile comes from random sets and
    may sit above the true minimum, so the record is measured only.
    """
    gap = spectral_gap(g)
    lower = (profile / g.d) ** 2 / 2.0
    return VerificationRecord(
        check="cheeger_lower",
        inputs={"n": g.n, "d": g.d, "profile": profile},
        lhs=lower,
        rhs=gap,
        passed=None,
        note="sampled profile; diagnostic only",
    )
