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
Balls, boundaries, tree excess and girth of regular graphs.

All searches are breadth-first over the adjacency lists. Vertex sets are
passed as VertexSet or as any iterable of vertex ids.
"""

import logging
import math
from collections import deque
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from ..exceptions import BoundViolation, DisconnectedSetError, ValidationError
from ..models import RegularGraph, VertexSet
from ..utils import ld

logger = logging.getLogger(__name__)

SetLike = Union[VertexSet, Iterable[int]]


def as_vertex_set(g: RegularGraph, A: SetLike) -> VertexSet:
    """Coerce an iterable of vertex ids into a VertexSet on g."""
    if isinstance(A, VertexSet):
        if A.n != g.n:
            raise ValidationError(f"vertex set over {A.n} vertices used on a graph with {g.n}")
        return A
    return VertexSet.from_vertices(g.n, A)


def _check_vertex(g: RegularGraph, x: int):
    if not 0 <= x < g.n:
        raise ValidationError(f"vertex {x} out of range 0..{g.n - 1}")


def ball_distances(g: RegularGraph, x: int, r: int) -> Dict[int, int]:
    """Distances from x to every vertex of B(x, r), in BFS order."""
    _check_vertex(g, x)
    if r < 0:
        raise ValidationError(f"radius must be nonnegative, got {r}")
    nbrs = g.neighbour_lists
    dist = {x: 0}
    frontier = [x]
    for level in range(1, r + 1):
        nxt = []
        for v in frontier:
            for w in nbrs[v]:
                if w not in dist:
                    dist[w] = level
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return dist


def ball(g: RegularGraph, x: int, r: int) -> VertexSet:
    """B(x, r) = {y : dist(x, y) <= r}."""
    return VertexSet.from_vertices(g.n, ball_distances(g, x, r).keys())


def sphere(g: RegularGraph, x: int, r: int) -> VertexSet:
    """Interior boundary of B(x, r): the vertices at distance exactly r."""
    dist = ball_distances(g, x, r)
    return VertexSet.from_vertices(g.n, (v for v, k in dist.items() if k == r))


def distances_from_set(g: RegularGraph, A: SetLike, r: Optional[int] = None) -> np.ndarray:
    """Multi-source BFS distances to A; -1 beyond radius r or when unreachable."""
    A = as_vertex_set(g, A)
    nbrs = g.neighbour_lists
    dist = np.full(g.n, -1, dtype=np.int64)
    sources = A.vertices()
    dist[sources] = 0
    frontier = sources.tolist()
    level = 0
    while frontier and (r is None or level < r):
        level += 1
        nxt = []
        for v in frontier:
            for w in nbrs[v]:
                if dist[w] < 0:
                    dist[w] = level
                    nxt.append(w)
        frontier = nxt
    return dist


def ball_of_set(g: RegularGraph, A: SetLike, r: int) -> VertexSet:
    """B(A, r) = {y : dist(y, A) <= r}."""
    return VertexSet(distances_from_set(g, A, r) >= 0)


def is_connected_set(g: RegularGraph, A: SetLike) -> bool:
    """True when A is nonempty and induces a connected subgraph."""
    A = as_vertex_set(g, A)
    members = A.vertices()
    if members.size == 0:
        return False
    return len(_component_within(g, A.bits, int(members[0]))) == members.size


def _component_within(g: RegularGraph, allowed: np.ndarray, x: int) -> List[int]:
    nbrs = g.neighbour_lists
    seen = {x}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for w in nbrs[v]:
            if allowed[w] and w not in seen:
                seen.add(w)
                queue.append(w)
    return list(seen)


def induced_edge_count(g: RegularGraph, A: SetLike) -> int:
    """Number of edges of g with both endpoints in A."""
    A = as_vertex_set(g, A)
    members = A.vertices()
    inside = A.bits[g.adjacency[members]]
    return int(np.count_nonzero(inside)) // 2


def tree_excess(g: RegularGraph, A: SetLike) -> int:
    """
    Tree excess |E_A| - |A| + 1 of a connected vertex set.

    Raises:
        DisconnectedSetError: If A is empty or not connected
    """
    A = as_vertex_set(g, A)
    if not is_connected_set(g, A):
        raise DisconnectedSetError("tree excess needs a nonempty connected set")
    return induced_edge_count(g, A) - A.cardinality + 1


def ball_tree_excess(g: RegularGraph, x: int, r: int) -> int:
    """Tree excess of B(x, r); balls are connected so no check is needed."""
    dist = ball_distances(g, x, r)
    members = np.fromiter(dist.keys(), dtype=np.int64)
    bits = np.zeros(g.n, dtype=bool)
    bits[members] = True
    edges = int(np.count_nonzero(bits[g.adjacency[members]])) // 2
    return edges - members.size + 1


def exterior_boundary(g: RegularGraph, A: SetLike) -> VertexSet:
    """Vertices outside A with a neighbour in A."""
    A = as_vertex_set(g, A)
    touched = np.zeros(g.n, dtype=bool)
    touched[g.adjacency[A.vertices()].ravel()] = True
    return VertexSet(touched & ~A.bits)


def interior_boundary(g: RegularGraph, A: SetLike) -> VertexSet:
    """Vertices of A with a neighbour outside A."""
    A = as_vertex_set(g, A)
    outside_nbr = np.any(~A.bits[g.adjacency], axis=1)
    return VertexSet(A.bits & outside_nbr)


def edge_boundary(g: RegularGraph, A: SetLike) -> int:
    """Size of the exterior boundary of A."""
    return exterior_boundary(g, A).cardinality


def sample_connected_set(
    g: RegularGraph, size: int, rng: np.random.Generator, root: Optional[int] = None
) -> VertexSet:
    """
    Grow a connected set by repeatedly adding a uniform frontier vertex.

    Args:
        g: Host graph
        size: Target cardinality (capped by the component of the root)
        rng: Random stream
        root: Start vertex, uniform when None

    Returns:
        Connected VertexSet containing the root
    """
    if size < 1:
        raise ValidationError(f"set size must be positive, got {size}")
    nbrs = g.neighbour_lists
    root = int(rng.integers(g.n)) if root is None else root
    _check_vertex(g, root)
    bits = np.zeros(g.n, dtype=bool)
    on_frontier = np.zeros(g.n, dtype=bool)
    bits[root] = True
    frontier: List[int] = []
    for w in nbrs[root]:
        if not on_frontier[w]:
            on_frontier[w] = True
            frontier.append(w)
    count = 1
    while count < size and frontier:
        i = int(rng.integers(len(frontier)))
        v = frontier[i]
        frontier[i] = frontier[-1]
        frontier.pop()
        bits[v] = True
        count += 1
        for w in nbrs[v]:
            if not bits[w] and not on_frontier[w]:
                on_frontier[w] = True
                frontier.append(w)
    return VertexSet(bits)


def isoperimetric_profile(
    g: RegularGraph, samples: int, rng: np.random.Generator, max_size: Optional[int] = None
) -> float:
    """
    Sampled upper estimate of min |boundary(A)|/|A| over connected A with |A| <= n/2.

    This is a diagnostic over random connected sets, not a certified minimum.
    """
    if samples < 1:
        raise ValidationError("need at least one sample")
    max_size = g.n // 2 if max_size is None else min(max_size, g.n // 2)
    best = math.inf
    for _ in range(samples):
        size = int(rng.integers(1, max_size + 1))
        A = sample_connected_set(g, size, rng)
        best = min(best, edge_boundary(g, A) / A.cardinality)
    return best


def max_sampled_tree_excess(
    g: RegularGraph, size: int, samples: int, rng: np.random.Generator
) -> int:
    """Largest tree excess seen over `samples` random connected sets of `size` vertices."""
    worst = 0
    for _ in range(samples):
        worst = max(worst, tree_excess(g, sample_connected_set(g, size, rng)))
    logger.info("max tree excess over %d sets of size %d: %d", samples, size, worst)
    return worst


def girth(g: RegularGraph) -> int:
    """Length of the shortest cycle, by BFS from every vertex truncated at the best so far."""
    nbrs = g.neighbour_lists
    best = math.inf
    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            if 2 * dist[v] + 1 >= best:
                break
            for w in nbrs[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
                elif parent[v] != w:
                    best = min(best, dist[v] + dist[w] + 1)
    return int(best) if best < math.inf else 0


def treelike_radius(g: RegularGraph, alpha1: float) -> int:
    """R = floor(alpha1 * ld n)."""
    return int(math.floor(alpha1 * ld(g.n, g.d)))


def a1_violations(g: RegularGraph, radius: int) -> List[int]:
    """Vertices whose ball of the given radius contains more than one cycle."""
    return [x for x in range(g.n) if ball_tree_excess(g, x, radius) > 1]


def count_treelike_balls(g: RegularGraph, r: int, alpha1: Optional[float] = None) -> int:
    """
    Count vertices x with tx(B(x, r)) = 0.

    When alpha1 is given, r must not exceed R = floor(alpha1 * ld n), the
    graph must have no ball of radius R with two cycles, and the count is
    checked against (1 - (d-1)^-(R-r)) * n.

    Raises:
        ValidationError: If r > R or the tree-like assumption fails
        BoundViolation: If the count is below the bound
    """
    if r < 0:
        raise ValidationError(f"radius must be nonnegative, got {r}")
    count = sum(1 for x in range(g.n) if ball_tree_excess(g, x, r) == 0)
    if alpha1 is None:
        return count
    R = treelike_radius(g, alpha1)
    if r > R:
        raise ValidationError(f"radius {r} exceeds tree-like radius {R}")
    violations = a1_violations(g, R)
    if violations:
        raise ValidationError(f"{len(violations)} balls of radius {R} hold more than one cycle")
    bound = (1.0 - float(g.d - 1) ** (-(R - r))) * g.n
    if count < bound:
        raise BoundViolation(f"{count} tree-like balls of radius {r}, bound {bound:.1f}")
    return count
