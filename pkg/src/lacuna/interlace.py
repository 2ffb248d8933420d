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
Random interlacements on the d-regular tree.

The vacant cluster of the root is a branching process: the root is vacant
with probability exp(-u f_root) and every vacant vertex has each of its
children vacant independently with probability p_u = exp(-u f_other).

Two root conventions coexist. The planted tree gives the root d-1
children, which is what the critical-value arithmetic uses. The full
d-regular tree gives it d children, which is what a graph neighbourhood
looks like. Every sampler takes `root_children` (default d-1).

Tree vertices are root paths: () is the root, (i,) its i-th child.
"""

import logging
import math
from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .constants import (
    DEFAULT_DEPTH_CAP,
    DEFAULT_SIZE_CAP,
    EXTINCTION_MAXITER,
    EXTINCTION_TOL,
    TOTAL_PROGENY_MAX,
)
from .exceptions import NumericalError, ValidationError
from .models import ClusterHistogram, InterlacementParams, TreeClusterSample

logger = logging.getLogger(__name__)

TreeNode = Tuple[int, ...]


def _check_degree(d: int):
    if d < 3:
        raise ValidationError(f"degree must be at least 3, got {d}")


def _root_children(d: int, root_children: Optional[int]) -> int:
    if root_children is None:
        return d - 1
    if root_children not in (d - 1, d):
        raise ValidationError(f"root must have d-1 or d children, got {root_children}")
    return root_children


def u_star(d: int) -> float:
    """Critical intensity d(d-1) ln(d-1) / (d-2)^2."""
    _check_degree(d)
    return d * (d - 1) * math.log(d - 1) / (d - 2) ** 2


def params(d: int, u: float) -> InterlacementParams:
    """
    Derived quantities of the branching description at intensity u.

    Raises:
        ValidationError: If d < 3 or u < 0
        NumericalError: If the two expressions of v_u disagree
    """
    _check_degree(d)
    if u < 0:
        raise ValidationError(f"intensity must be nonnegative, got {u}")
    f_root = (d - 2) / (d - 1)
    f_other = (d - 2) ** 2 / (d * (d - 1))
    p_u = math.exp(-u * f_other)
    m_u = (d - 1) * p_u
    critical = u_star(d)
    v_u = 1.0 - u / critical

    log_form = math.log(m_u) / math.log(d - 1)
    if abs(log_form - v_u) > 1e-12 * max(1.0, abs(v_u)):
        raise NumericalError(f"v_u mismatch at d={d}, u={u}: {v_u} vs {log_form}")
    return InterlacementParams(
        d=d, u=u, p_u=p_u, m_u=m_u, v_u=v_u, u_star=critical, f_root=f_root, f_other=f_other
    )


def offspring_pgf(d: int, u: float, s: float) -> float:
    """Generating function (1 - p + p s)^(d-1) of the Binomial(d-1, p_u) offspring law."""
    p = params(d, u).p_u
    return (1.0 - p + p * s) ** (d - 1)


def extinction_probability(d: int, u: float, tol: float = EXTINCTION_TOL) -> float:
    """
    Extinction probability of the offspring process started from one vertex.

    Iterates s <- phi(s) from 0 until the increment drops below `tol`.
    The root-birth factor is not included.

    Returns:
        Smallest fixed point of phi, or 1.0 when m_u <= 1
    """
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    prm = params(d, u)
    if prm.m_u <= 1.0:
        return 1.0
    p = prm.p_u
    s = 0.0
    for _ in range(EXTINCTION_MAXITER):
        s_new = (1.0 - p + p * s) ** (d - 1)
        if s_new - s < tol:
            return s_new
        s = s_new
    raise NumericalError(f"extinction iteration did not settle at d={d}, u={u}")


def generation_survival(d: int, u: float, r: int) -> float:
    """
    Probability 1 - phi^(r)(0) that the offspring process of one vertex
    still has descendants in generation r. The root-birth factor is not
    included.
    """
    if r < 0:
        raise ValidationError(f"generation must be nonnegative, got {r}")
    p = params(d, u).p_u
    s = 0.0
    for _ in range(r):
        s = (1.0 - p + p * s) ** (d - 1)
    return 1.0 - s


def reach_depth_probability(d: int, u: float, r: int, root_children: Optional[int] = None) -> float:
    """Probability that the root cluster contains a vertex at depth r, root birth included."""
    if r < 0:
        raise ValidationError(f"depth must be nonnegative, got {r}")
    c = _root_children(d, root_children)
    prm = params(d, u)
    born = math.exp(-u * prm.f_root)
    if r == 0:
        return born
    line = prm.p_u * generation_survival(d, u, r - 1)
    return born * (1.0 - (1.0 - line) ** c)


def _grow(
    d: int,
    u: float,
    rng: np.random.Generator,
    depth_cap: int,
    size_cap: int,
    root_children: int,
) -> Tuple[List[Tuple[TreeNode, float]], bool]:
    """
    Breadth-first growth of the root cluster at level u.

    Returns the vacant vertices in BFS order with the uniform that decided
    each of them, and whether the size cap stopped the growth.
    """
    if depth_cap < 0 or size_cap <= 0:
        raise ValidationError("depth and size caps must be positive")
    prm = params(d, u)
    root_uniform = float(rng.random())
    if root_uniform >= math.exp(-u * prm.f_root):
        return [], False

    alive: List[Tuple[TreeNode, float]] = [((), root_uniform)]
    queue = deque([()])
    while queue:
        node = queue.popleft()
        if len(node) >= depth_cap:
            continue
        width = root_children if not node else d - 1
        draws = rng.random(width)
        for i in np.flatnonzero(draws < prm.p_u).tolist():
            child = node + (i,)
            alive.append((child, float(draws[i])))
            if len(alive) >= size_cap:
                logger.debug("cluster at u=%g hit size cap %d", u, size_cap)
                return alive, True
            queue.append(child)
    return alive, False


def _sample_from(
    alive: Sequence[Tuple[TreeNode, float]], d: int, u: float, depth_cap: int, capped: bool
) -> TreeClusterSample:
    prm = params(d, u)
    root_threshold = math.exp(-u * prm.f_root)
    kept = set()
    for node, uniform in alive:
        if not node:
            if uniform < root_threshold:
                kept.add(node)
        elif node[:-1] in kept and uniform < prm.p_u:
            kept.add(node)
    truncated = depth_cap if any(len(v) == depth_cap for v in kept) else None
    return TreeClusterSample(vertices=frozenset(kept), truncated_at=truncated, size_capped=capped)


def sample_cluster(
    d: int,
    u: float,
    rng: np.random.Generator,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    size_cap: int = DEFAULT_SIZE_CAP,
    root_children: Optional[int] = None,
) -> TreeClusterSample:
    """
    Sample the vacant cluster of the root.

    Args:
        d: Tree degree
        u: Intensity
        rng: Random stream
        depth_cap: Vertices at this depth are kept but not expanded
        size_cap: Growth stops once the cluster has this many vertices
        root_children: d-1 for the planted tree, d for the full tree

    Returns:
        TreeClusterSample with truncation recorded
    """
    c = _root_children(d, root_children)
    alive, capped = _grow(d, u, rng, depth_cap, size_cap, c)
    return _sample_from(alive, d, u, depth_cap, capped)


def sample_coupled_clusters(
    d: int,
    us: Sequence[float],
    rng: np.random.Generator,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    size_cap: int = DEFAULT_SIZE_CAP,
    root_children: Optional[int] = None,
) -> List[TreeClusterSample]:
    """
    Sample root clusters at several intensities from common uniforms.

    A vertex is vacant at level u when its uniform lies below its vacancy
    probability at u and its parent is vacant at u, so the clusters are
    decreasing in u. Results follow the order of `us`.
    """
    if not us:
        return []
    c = _root_children(d, root_children)
    alive, capped = _grow(d, min(us), rng, depth_cap, size_cap, c)
    return [_sample_from(alive, d, u, depth_cap, capped) for u in us]


def sample_cluster_sizes(
    d: int,
    u: float,
    samples: int,
    rng: np.random.Generator,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    size_cap: int = DEFAULT_SIZE_CAP,
    root_children: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sizes of the root cluster intersected with the ball of radius depth_cap.

    Generation counts are drawn directly: Z_0 ~ Bernoulli(exp(-u f_root)),
    Z_1 ~ Binomial(root_children Z_0, p_u), Z_{k+1} ~ Binomial((d-1) Z_k, p_u).

    Returns:
        (sizes, capped) where capped marks samples that reached depth_cap
        or size_cap
    """
    if samples < 0:
        raise ValidationError(f"sample count must be nonnegative, got {samples}")
    c = _root_children(d, root_children)
    prm = params(d, u)
    generation = (rng.random(samples) < math.exp(-u * prm.f_root)).astype(np.int64)
    sizes = generation.copy()
    capped = np.zeros(samples, dtype=bool)
    for depth in range(1, depth_cap + 1):
        if not generation.any():
            break
        width = c if depth == 1 else d - 1
        generation = rng.binomial(width * generation, prm.p_u)
        sizes += generation
        over = sizes >= size_cap
        if over.any():
            capped |= over
            generation[over] = 0
    else:
        capped |= generation > 0
    return sizes, capped


def cluster_size_histogram(
    d: int,
    u: float,
    samples: int,
    rng: np.random.Generator,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    size_cap: int = DEFAULT_SIZE_CAP,
    root_children: Optional[int] = None,
) -> ClusterHistogram:
    """Histogram of |C_o|; samples that reach a cap go to the `capped` bucket."""
    sizes, capped = sample_cluster_sizes(d, u, samples, rng, depth_cap, size_cap, root_children)
    values, counts = np.unique(sizes[~capped], return_counts=True)
    hist = {int(v): int(c) for v, c in zip(values, counts)}
    return ClusterHistogram(counts=hist, capped=int(capped.sum()), samples=samples)


def _truncated_power(w: np.ndarray, k: int, size: int) -> np.ndarray:
    out = np.zeros(size)
    out[0] = 1.0
    for _ in range(k):
        out = np.convolve(out, w)[:size]
    return out


def total_progeny_law(
    d: int,
    u: float,
    max_size: int = TOTAL_PROGENY_MAX,
    root_children: Optional[int] = None,
    method: str = "convolution",
) -> np.ndarray:
    """
    Exact law of |C_o| on 0..max_size.

    The mass of larger and of infinite clusters is left out, so the vector
    sums to less than one in general.

    Args:
        method: "convolution" solves the subtree recursion coefficient by
            coefficient; "hitting_time" uses the closed form
            P[total = k | c founders] = (c/k) P[Binomial(k(d-1), p) = k-c]
    """
    if max_size < 0:
        raise ValidationError(f"max_size must be nonnegative, got {max_size}")
    c = _root_children(d, root_children)
    prm = params(d, u)
    p = prm.p_u
    born = math.exp(-u * prm.f_root)
    size = max_size + 1

    if method == "convolution":
        # t: progeny of one vacant vertex; w: one child slot, possibly occupied
        t = np.zeros(size)
        for _ in range(size):
            w = p * t
            w[0] = 1.0 - p
            shifted = _truncated_power(w, d - 1, size)
            t = np.concatenate(([0.0], shifted[:-1]))
        w = p * t
        w[0] = 1.0 - p
        rooted = _truncated_power(w, c, size)
        law = born * np.concatenate(([0.0], rooted[:-1]))
    elif method == "hitting_time":
        founders = stats.binom.pmf(np.arange(c + 1), c, p)
        law = np.zeros(size)
        for k in range(1, size):
            # the root plus k-1 descendants grown from j founders
            total = 0.0
            for j in range(min(c, k - 1) + 1):
                if j == 0:
                    total += founders[0] * (k == 1)
                else:
                    m = k - 1
                    total += founders[j] * j / m * stats.binom.pmf(m - j, m * (d - 1), p)
            law[k] = born * total
    else:
        raise ValidationError(f"unknown method '{method}'")
    law[0] = 1.0 - born
    return law


def _check_rooted_subtree(d: int, K: Iterable[TreeNode]) -> List[TreeNode]:
    nodes = [tuple(v) for v in K]
    present = set(nodes)
    if len(present) != len(nodes):
        raise ValidationError("tree vertex listed twice")
    if () not in present:
        raise ValidationError("subtree must contain the root")
    for v in nodes:
        if v and v[:-1] not in present:
            raise ValidationError(f"subtree is not connected: parent of {v} missing")
        for depth, i in enumerate(v):
            width = d if depth == 0 else d - 1
            if not 0 <= i < width:
                raise ValidationError(f"child index {i} out of range at depth {depth} in {v}")
    return nodes


def tree_capacity(d: int, K: Iterable[TreeNode]) -> float:
    """
    Capacity of a finite subtree K of the d-regular tree containing the root.

    A walk leaving x in one of its d - deg_K(x) free directions never
    returns with probability (d-2)/(d-1), so each vertex contributes
    (d - deg_K(x))/d * (d-2)/(d-1).

    Raises:
        ValidationError: If K is rootless, disconnected or indexes past the degree
    """
    _check_degree(d)
    nodes = _check_rooted_subtree(d, K)
    present = set(nodes)
    children: Dict[TreeNode, int] = {v: 0 for v in nodes}
    for v in nodes:
        if v:
            children[v[:-1]] += 1
    escape = (d - 2) / (d - 1)
    total = 0.0
    for v in nodes:
        degree = children[v] + (1 if v else 0)
        total += (d - degree) / d * escape
    logger.debug("capacity of %d-vertex subtree: %g", len(present), total)
    return total


def vacancy_probability(d: int, u: float, K: Iterable[TreeNode]) -> float:
    """Probability exp(-u cap(K)) that K is vacant."""
    return math.exp(-u * tree_capacity(d, K))


def product_vacancy_probability(d: int, u: float, K: Iterable[TreeNode]) -> float:
    """Product of the branching marginals: exp(-u f_root) for the root, p_u for the rest."""
    _check_degree(d)
    nodes = _check_rooted_subtree(d, K)
    prm = params(d, u)
    return math.exp(-u * prm.f_root) * prm.p_u ** (len(nodes) - 1)


def path_subtree(k: int) -> List[TreeNode]:
    """The root path of length k: (), (0,), (0, 0), ..."""
    return [(0,) * i for i in range(k + 1)]
