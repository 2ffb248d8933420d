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
Exact potential-theoretic oracles for reversible Markov chains.

Hitting times, equilibrium potentials, Dirichlet forms, survival
probabilities and quasi-stationary laws are computed by direct sparse
solves and uniformization. The verify_* functions turn the inequalities
relating these quantities into VerificationRecords.

Every function accepts a RegularGraph (simple random walk, uniform pi) or
a MarkovChain. Chains above ORACLE_MAX_N states are refused.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, sparse, stats
from scipy.sparse import csgraph
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from .constants import (
    BOUND_SLACK,
    DENSE_EIGEN_MAX_N,
    DIRICHLET_AGREEMENT,
    ORACLE_MAX_N,
    QSD_MAXITER,
    QSD_TOL,
    SOLVE_RESIDUAL,
    SURVIVAL_MAX_T,
)
from .exceptions import (
    NumericalError,
    OracleSizeError,
    QuasiStationaryError,
    SingularSystemError,
    ValidationError,
)
from .graph.spectral import spectral_gap
from .graph.structure import ball_distances, ball_tree_excess, distances_from_set
from .models import (
    BoundaryHittingReport,
    HittingSolution,
    PotentialField,
    QuasiStationaryResult,
    RegularGraph,
    VerificationRecord,
    VertexSet,
)
from .utils import poisson_cutoff

logger = logging.getLogger(__name__)


@dataclass
class MarkovChain:
    """Reversible chain: sparse transition matrix P and stationary law pi."""

    P: sparse.csr_matrix
    pi: np.ndarray
    graph: Optional[RegularGraph] = None

    @property
    def n(self) -> int:
        return int(self.pi.size)

    @classmethod
    def from_graph(cls, g: RegularGraph) -> "MarkovChain":
        return cls(P=g.transition_matrix(), pi=np.full(g.n, 1.0 / g.n), graph=g)

    @classmethod
    def birth_death(cls, R: int, p_up: float) -> "MarkovChain":
        """
        Chain on 0..R stepping up with probability p_up and down otherwise.

        Both ends reflect; pi solves detailed balance.
        """
        if R < 1:
            raise ValidationError(f"need R >= 1, got {R}")
        if not 0.0 < p_up < 1.0:
            raise ValidationError(f"p_up must be in (0,1), got {p_up}")
        up = np.full(R + 1, p_up)
        down = np.full(R + 1, 1.0 - p_up)
        up[0], down[0] = 1.0, 0.0
        up[R], down[R] = 0.0, 1.0
        rows, cols, vals = [], [], []
        for x in range(R + 1):
            if up[x] > 0:
                rows.append(x)
                cols.append(x + 1)
                vals.append(up[x])
            if down[x] > 0:
                rows.append(x)
                cols.append(x - 1)
                vals.append(down[x])
        P = sparse.csr_matrix((vals, (rows, cols)), shape=(R + 1, R + 1))
        weights = np.ones(R + 1)
        for x in range(R):
            weights[x + 1] = weights[x] * up[x] / down[x + 1]
        return cls(P=P, pi=weights / weights.sum())


ChainLike = Union[RegularGraph, MarkovChain]
SetLike = Union[VertexSet, Iterable[int], np.ndarray]


def as_chain(chain: ChainLike) -> MarkovChain:
    """Wrap a graph as its simple random walk and enforce the oracle size limit."""
    if isinstance(chain, RegularGraph):
        chain = MarkovChain.from_graph(chain)
    if chain.n > ORACLE_MAX_N:
        raise OracleSizeError(f"exact oracles accept at most {ORACLE_MAX_N} states, got {chain.n}")
    return chain


def _mask(chain: MarkovChain, A: SetLike) -> np.ndarray:
    if isinstance(A, VertexSet):
        bits = A.bits
    elif isinstance(A, np.ndarray) and A.dtype == bool:
        bits = A
    else:
        bits = np.zeros(chain.n, dtype=bool)
        index = np.fromiter((int(v) for v in A), dtype=np.int64)
        if index.size and (index.min() < 0 or index.max() >= chain.n):
            raise ValidationError("vertex id out of range")
        bits[index] = True
    if bits.size != chain.n:
        raise ValidationError(f"set over {bits.size} states used on a chain with {chain.n}")
    return np.asarray(bits, dtype=bool)


def _start_law(chain: MarkovChain, nu) -> np.ndarray:
    if nu is None:
        return chain.pi
    if isinstance(nu, (int, np.integer)):
        law = np.zeros(chain.n)
        law[int(nu)] = 1.0
        return law
    law = np.asarray(nu, dtype=float)
    if law.shape != (chain.n,) or np.any(law < 0) or not math.isclose(law.sum(), 1.0, rel_tol=1e-9):
        raise ValidationError("start law must be a probability vector over the states")
    return law


def _check_reaches(chain: MarkovChain, target: np.ndarray):
    """Every component holding a free state must hold a target state."""
    _, labels = csgraph.connected_components(chain.P, directed=False)
    hit = np.zeros(labels.max() + 1, dtype=bool)
    hit[labels[target]] = True
    if not np.all(hit[labels]):
        raise SingularSystemError("some states cannot reach the target set")


def _solve(M: sparse.spmatrix, b: np.ndarray) -> np.ndarray:
    """Sparse direct solve with up to three refinement steps."""
    M = sparse.csc_matrix(M)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MatrixRankWarning)
        x = np.atleast_1d(spsolve(M, b))
        for _ in range(4):
            if not np.all(np.isfinite(x)):
                raise SingularSystemError("linear system is singular")
            residual = b - M @ x
            scale = max(1.0, float(np.abs(x).max()), float(np.abs(b).max()))
            if float(np.abs(residual).max()) <= SOLVE_RESIDUAL * scale:
                return x
            x = x + np.atleast_1d(spsolve(M, residual))
    raise SingularSystemError(f"residual {np.abs(residual).max():.3e} above tolerance")


def _leq(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + BOUND_SLACK * max(1.0, abs(lhs), abs(rhs))


def expected_hitting_time(chain: ChainLike, A: SetLike) -> HittingSolution:
    """
    Solve for E_x[H_A] and the normalized minimizer f* = 1 - E_x[H_A] / E[H_A].

    Args:
        chain: Graph or Markov chain
        A: Target set

    Returns:
        HittingSolution with stationary_mean = sum_x pi_x E_x[H_A]

    Raises:
        SingularSystemError: If A is empty or some state cannot reach A
    """
    chain = as_chain(chain)
    a = _mask(chain, A)
    if not a.any():
        raise SingularSystemError("target set is empty")
    times = np.zeros(chain.n)
    b = ~a
    if b.any():
        _check_reaches(chain, a)
        M = sparse.identity(int(b.sum()), format="csr") - chain.P[b][:, b]
        times[b] = _solve(M, np.ones(int(b.sum())))
    mean = float(chain.pi @ times)
    f_star = np.ones(chain.n) if mean == 0 else 1.0 - times / mean
    return HittingSolution(expected_times=times, stationary_mean=mean, f_star=f_star)


def equilibrium_potential(chain: ChainLike, A: SetLike, C: SetLike) -> PotentialField:
    """
    g*(x) = P_x[H_A <= H_C]: 1 on A, 0 on C and harmonic elsewhere.

    Raises:
        ValidationError: If A or C is empty or they overlap
    """
    chain = as_chain(chain)
    a, c = _mask(chain, A), _mask(chain, C)
    if not a.any() or not c.any():
        raise ValidationError("both boundary sets must be nonempty")
    if np.any(a & c):
        raise ValidationError("boundary sets overlap")
    values = a.astype(float)
    free = ~(a | c)
    if free.any():
        _check_reaches(chain, a | c)
        M = sparse.identity(int(free.sum()), format="csr") - chain.P[free][:, free]
        rhs = np.asarray(chain.P[free][:, a].sum(axis=1)).ravel()
        values[free] = _solve(M, rhs)
        harmonic = (chain.P @ values - values)[free]
        if np.abs(harmonic).max() > 1e-9:
            raise NumericalError(f"potential not harmonic: residual {np.abs(harmonic).max():.3e}")
    values = np.clip(values, 0.0, 1.0)
    return PotentialField(values=values, boundary_A=VertexSet(a), boundary_C=VertexSet(c))


def dirichlet_form(chain: ChainLike, f: Sequence[float], h: Sequence[float]) -> float:
    """
    D(f, h) = 1/2 sum (f(x)-f(y))(h(x)-h(y)) pi_x p_xy.

    The generator form -sum (Pf - f) h pi is computed as well and must agree.
    """
    chain = as_chain(chain)
    f = np.asarray(f, dtype=float)
    h = np.asarray(h, dtype=float)
    if f.shape != (chain.n,) or h.shape != (chain.n,):
        raise ValidationError("functions must be defined on every state")
    coo = chain.P.tocoo()
    rows, cols = coo.row, coo.col
    edge_form = 0.5 * float(
        np.sum((f[rows] - f[cols]) * (h[rows] - h[cols]) * chain.pi[rows] * coo.data)
    )
    generator_form = -float(np.sum((chain.P @ f - f) * h * chain.pi))
    scale = max(1.0, float(np.abs(f).max()) * float(np.abs(h).max()))
    if abs(edge_form - generator_form) > DIRICHLET_AGREEMENT * scale:
        raise NumericalError(
            f"Dirichlet forms disagree: {edge_form:.15g} vs {generator_form:.15g}"
        )
    return edge_form


def escape_probabilities(chain: ChainLike, A: SetLike, C: SetLike) -> np.ndarray:
    """P_z[return time to A > H_C] for z in A, zero elsewhere, by one-step decomposition."""
    chain = as_chain(chain)
    field = equilibrium_potential(chain, A, C)
    escape = chain.P @ (1.0 - field.values)
    return np.where(field.boundary_A.bits, escape, 0.0)


def capacity(chain: ChainLike, A: SetLike, C: SetLike) -> float:
    """sum_{z in A} pi_z P_z[return time to A > H_C], which equals D(g*, g*)."""
    chain = as_chain(chain)
    return float(chain.pi @ escape_probabilities(chain, A, C))


def survival_probability(chain: ChainLike, A: SetLike, nu, T: float) -> float:
    """
    P_nu[H_A > T] for the continuous-time chain, by uniformization.

    Args:
        chain: Graph or Markov chain
        A: Nonempty target set
        nu: Start law: None for pi, a state id, or a probability vector
        T: Time horizon, at most 1e7

    Returns:
        sum_k Poisson(T)(k) * nu (P restricted to A^c)^k 1, truncated at mass 1e-12
    """
    chain = as_chain(chain)
    a = _mask(chain, A)
    if not a.any():
        raise ValidationError("target set is empty")
    if T < 0:
        raise ValidationError(f"time must be nonnegative, got {T}")
    if T > SURVIVAL_MAX_T:
        raise ValidationError(f"time {T} above the uniformization cap {SURVIVAL_MAX_T}")
    law = _start_law(chain, nu)
    free = ~a
    mass = law[free]
    if T == 0 or not mass.any():
        return float(mass.sum())
    K = poisson_cutoff(T)
    weights = stats.poisson.pmf(np.arange(K + 1), T)
    killed = chain.P[free][:, free].T.tocsr()
    total = 0.0
    for k in range(K + 1):
        total += weights[k] * mass.sum()
        mass = killed @ mass
    return float(min(max(total, 0.0), 1.0))


def conditional_avoid_probability(
    chain: ChainLike, A: SetLike, y: int, T: float, nu=None
) -> float:
    """
    P[H_{A+y} > T | H_A > T] as a ratio of two survival probabilities.

    Raises:
        ValidationError: If y is in A
        NumericalError: If P[H_A > T] < 1e-300
    """
    chain = as_chain(chain)
    a = _mask(chain, A)
    if a[y]:
        raise ValidationError(f"vertex {y} lies in the conditioning set")
    denominator = survival_probability(chain, a, nu, T)
    if denominator < 1e-300:
        raise NumericalError(f"conditioning event has probability {denominator:.3e}")
    with_y = a.copy()
    with_y[y] = True
    return survival_probability(chain, with_y, nu, T) / denominator


def hitpoint_rate(chain: ChainLike, y: int, T: float) -> float:
    """-(n/T) ln P[H_y > T] from the stationary start."""
    chain = as_chain(chain)
    return -(chain.n / T) * math.log(survival_probability(chain, [y], None, T))


def conditional_rate(chain: ChainLike, A: SetLike, y: int, T: float) -> float:
    """-(n/T) ln P[H_{A+y} > T | H_A > T]."""
    chain = as_chain(chain)
    return -(chain.n / T) * math.log(conditional_avoid_probability(chain, A, y, T))


def chain_spectral_gap(chain: ChainLike) -> float:
    """1 - lambda_2 of a reversible chain."""
    if isinstance(chain, RegularGraph):
        return spectral_gap(chain)
    if chain.graph is not None:
        return spectral_gap(chain.graph)
    if chain.n > DENSE_EIGEN_MAX_N:
        raise OracleSizeError(f"dense spectral gap limited to {DENSE_EIGEN_MAX_N} states")
    root = np.sqrt(chain.pi)
    symmetric = (chain.P.toarray() * root[:, None]) / root[None, :]
    symmetric = 0.5 * (symmetric + symmetric.T)
    eigenvalues = linalg.eigvalsh(symmetric)
    return float(1.0 - eigenvalues[-2])


def quasi_stationary(
    chain: ChainLike, A: SetLike, tol: float = QSD_TOL, max_iter: int = QSD_MAXITER
) -> QuasiStationaryResult:
    """
    Quasi-stationary law of the chain killed on A.

    Lazy power iteration on the killed operator; stops when the residual
    |alpha Q - lambda alpha|_1 at the Rayleigh quotient lambda is below tol.

    Raises:
        ValidationError: If A is empty, covers everything, or A^c is disconnected
        QuasiStationaryError: If the iteration does not converge
    """
    chain = as_chain(chain)
    a = _mask(chain, A)
    if not a.any() or a.all():
        raise ValidationError("killing set must be a nonempty proper subset")
    free = ~a
    killed = chain.P[free][:, free]
    count, _ = csgraph.connected_components(killed, directed=False)
    if count != 1:
        raise ValidationError("complement of the killing set is not connected")
    left = killed.T.tocsr()
    alpha = np.full(int(free.sum()), 1.0 / free.sum())
    for iteration in range(1, max_iter + 1):
        image = left @ alpha
        eigenvalue = float(image.sum())
        residual = float(np.abs(image - eigenvalue * alpha).sum())
        if residual <= tol:
            distribution = np.zeros(chain.n)
            distribution[free] = alpha
            logger.debug("quasi-stationary law after %d iterations", iteration)
            return QuasiStationaryResult(distribution, eigenvalue, iteration)
        alpha = 0.5 * (alpha + image)
        alpha /= alpha.sum()
    raise QuasiStationaryError(f"no convergence after {max_iter} iterations (residual {residual:.3e})")


def verify_quasi_stationary(
    chain: ChainLike,
    A: SetLike,
    times: Sequence[float] = (1.0, 10.0, 100.0),
    gap: Optional[float] = None,
) -> List[VerificationRecord]:
    """
    Check the quasi-stationary sandwiches.

    Expected times: pi(A^c) / Q(A, A^c) <= E[H_A] / pi(A^c) <= E_alpha[H_A]
    <= E[H_A] + 1/lambda_G. Tails: (1 - 1/(lambda_G E_alpha H_A)) e^{-t/E_alpha H_A}
    <= P[H_A > t] <= pi(A^c) e^{-t/E_alpha H_A}.
    """
    chain = as_chain(chain)
    a = _mask(chain, A)
    outside = float(chain.pi[~a].sum())
    mean = expected_hitting_time(chain, a).stationary_mean
    exit_time = quasi_stationary(chain, a).expected_exit_time
    gap = chain_spectral_gap(chain) if gap is None else gap
    flow = float(chain.pi[a] @ np.asarray(chain.P[a][:, ~a].sum(axis=1)).ravel())
    inputs = {"n": chain.n, "A_size": int(a.sum())}

    flow_bound = outside / flow
    records = [
        VerificationRecord("qsd_flow_bound", inputs, flow_bound, mean / outside,
                           _leq(flow_bound, mean / outside)),
        VerificationRecord("qsd_lower", inputs, mean / outside, exit_time,
                           _leq(mean / outside, exit_time)),
        VerificationRecord("qsd_upper", inputs, exit_time, mean + 1.0 / gap,
                           _leq(exit_time, mean + 1.0 / gap)),
    ]
    coefficient = 1.0 - 1.0 / (gap * exit_time)
    for t in times:
        survival = survival_probability(chain, a, None, t)
        decay = math.exp(-t / exit_time)
        lower = coefficient * decay
        records.append(
            VerificationRecord("qsd_tail_lower", {**inputs, "t": t}, lower, survival,
                               _leq(lower, survival), "vacuous" if lower <= 0 else "")
        )
        records.append(
            VerificationRecord("qsd_tail_upper", {**inputs, "t": t}, survival, outside * decay,
                               _leq(survival, outside * decay))
        )
    return records


def verify_EH_bounds(chain: ChainLike, A: SetLike, C: SetLike) -> List[VerificationRecord]:
    """
    Check D(g*,g*) (1 - 2 sup_C |f*|) <= 1/E[H_A] <= D(g*,g*) / pi(C)^2.

    A lower side that is not positive is vacuous: recorded as passing with
    the note "vacuous".
    """
    chain = as_chain(chain)
    a, c = _mask(chain, A), _mask(chain, C)
    if np.any(a & c):
        raise ValidationError("A and C overlap")
    solution = expected_hitting_time(chain, a)
    potential = equilibrium_potential(chain, a, c).values
    energy = dirichlet_form(chain, potential, potential)
    sup_f = float(np.abs(solution.f_star[c]).max())
    pi_c = float(chain.pi[c].sum())
    inverse = 1.0 / solution.stationary_mean
    lower = energy * (1.0 - 2.0 * sup_f)
    upper = energy / pi_c**2
    inputs = {"n": chain.n, "A_size": int(a.sum()), "C_size": int(c.sum()), "sup_f_star": sup_f}
    return [
        VerificationRecord("EH_lower", inputs, lower, inverse, _leq(lower, inverse),
                           "vacuous" if lower <= 0 else ""),
        VerificationRecord("EH_upper", inputs, inverse, upper, _leq(inverse, upper)),
    ]


def variational_identity_check(chain: ChainLike, A: SetLike) -> VerificationRecord:
    """1/E[H_A] = D(f*, f*)."""
    chain = as_chain(chain)
    solution = expected_hitting_time(chain, A)
    energy = dirichlet_form(chain, solution.f_star, solution.f_star)
    inverse = 1.0 / solution.stationary_mean
    return VerificationRecord(
        "variational_identity", {"n": chain.n}, inverse, energy,
        abs(inverse - energy) <= 1e-9 * max(1.0, inverse),
    )


def verify_boundary_hitting(g: RegularGraph, x: int, r: int, s: int) -> BoundaryHittingReport:
    """
    P_y[hit B(x,r) before leaving B(x,r+s)] for y at distance r+s from x.

    On a tree the distance from x is a birth-death chain stepping inward with
    probability 1/d, which gives (d-2) / ((d-1)^(s+1) - 1) for every y. That
    value is asserted when tx(B(x, r+s)) = 0 and only reported when it is 1.

    Raises:
        ValidationError: If s < 1, r < 0 or tx(B(x, r+s)) > 1
    """
    if s < 1 or r < 0:
        raise ValidationError(f"need r >= 0 and s >= 1, got r={r}, s={s}")
    outer = r + s
    excess = ball_tree_excess(g, x, outer)
    if excess > 1:
        raise ValidationError(f"tree excess {excess} of B({x},{outer}) exceeds 1")
    dist = ball_distances(g, x, outer)
    inner = [v for v, k in dist.items() if k <= r]
    in_ball = np.zeros(g.n, dtype=bool)
    in_ball[list(dist.keys())] = True
    field = equilibrium_potential(g, inner, ~in_ball)
    probabilities = {v: float(field.values[v]) for v, k in dist.items() if k == outer}
    tree_value = (g.d - 2) / ((g.d - 1) ** (s + 1) - 1)
    worst = max(probabilities.values())
    inputs = {"x": x, "r": r, "s": s, "d": g.d, "tree_excess": excess}
    if excess == 0:
        exact = all(abs(p - tree_value) <= 1e-10 for p in probabilities.values())
        record = VerificationRecord("boundary_hitting_tree", inputs, worst, tree_value, exact)
    else:
        record = VerificationRecord(
            "boundary_hitting_cycle", inputs, worst, tree_value, None,
            f"ratio to tree value {worst / tree_value:.4f}",
        )
        logger.info("boundary hitting with one cycle: max %.6g vs tree %.6g", worst, tree_value)
    return BoundaryHittingReport(probabilities, worst, tree_value, excess, record)


def eratio_profile(g: RegularGraph, A: SetLike, s_max: int) -> List[Tuple[int, float]]:
    """
    sup over dist(y, A) > s of |E_y[H_A] / E[H_A] - 1| for s = 0..s_max.

    Distances with no vertex beyond them are omitted.
    """
    solution = expected_hitting_time(g, A)
    dist = distances_from_set(g, A)
    ratio = np.abs(solution.expected_times / solution.stationary_mean - 1.0)
    profile = []
    for s in range(s_max + 1):
        beyond = dist > s
        if beyond.any():
            profile.append((s, float(ratio[beyond].max())))
    return profile


def eratio_slope(profile: Sequence[Tuple[int, float]]) -> float:
    """Least-squares slope of ln(sup ratio) against s."""
    points = [(s, v) for s, v in profile if v > 0]
    if len(points) < 2:
        raise ValidationError("need two positive profile points for a slope")
    s_values, values = zip(*points)
    slope, _ = np.polyfit(np.array(s_values, dtype=float), np.log(values), 1)
    return float(slope)
