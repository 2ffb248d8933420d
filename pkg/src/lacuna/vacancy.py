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
Components of vacant configurations, vertex classification and the
instrumented breadth-first exploration of the vacant set left by segments.
"""

import logging
import math
from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_ALPHA1, DEFAULT_K_CAP, PROPER_H
from .exceptions import DisconnectedSetError, ValidationError
from .graph.structure import (
    SetLike,
    as_vertex_set,
    ball_distances,
    ball_tree_excess,
    distances_from_set,
    is_connected_set,
    tree_excess,
)
from .interlace import params as interlacement_params
from .interlace import u_star
from .models import (
    ClassifyParams,
    ComponentSummary,
    ExplorationStep,
    ExplorationTrace,
    RegularGraph,
    SegmentBundle,
    TerminationReason,
    VacantConfig,
    VertexClass,
    VertexSet,
    VertexState,
)
from .pim import admissible_epsilon
from .utils import ld

logger = logging.getLogger(__name__)


class UnionFind:
    """Disjoint sets over 0..size-1 with path compression and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size
        self.num_components = size

    def find(self, x: int) -> int:
        root = x
        while root != self.parent[root]:
            root = self.parent[root]
        # compress
        while x != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; False when they were already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.num_components -= 1
        return True


def _bits(g: RegularGraph, config) -> np.ndarray:
    bits = config.bits if isinstance(config, (VacantConfig, VertexSet)) else np.asarray(config)
    bits = np.asarray(bits, dtype=bool)
    if bits.shape != (g.n,):
        raise ValidationError(f"configuration over {bits.size} vertices used on a graph with {g.n}")
    return bits


def components(g: RegularGraph, config) -> ComponentSummary:
    """
    Connected components of the vacant vertices.

    Each component is labelled by its smallest vertex; occupied vertices
    get -1.
    """
    vacant = _bits(g, config)
    edges = g.edges()
    keep = vacant[edges[:, 0]] & vacant[edges[:, 1]]
    uf = UnionFind(g.n)
    for a, b in edges[keep].tolist():
        uf.union(a, b)

    labels = np.full(g.n, -1, dtype=np.int64)
    smallest: Dict[int, int] = {}
    for v in np.flatnonzero(vacant).tolist():
        root = uf.find(v)
        labels[v] = smallest.setdefault(root, v)
    counts = np.bincount(labels[vacant], minlength=g.n) if vacant.any() else np.zeros(0)
    sizes = sorted((int(c) for c in counts if c > 0), reverse=True)
    return ComponentSummary(labels=labels, sizes=sizes)


def _vacant_component(
    g: RegularGraph, vacant: np.ndarray, x: int, allowed: Optional[np.ndarray] = None
) -> List[int]:
    if not vacant[x] or (allowed is not None and not allowed[x]):
        return []
    nbrs = g.neighbour_lists
    seen = {x}
    order = [x]
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for w in nbrs[v]:
            if w not in seen and vacant[w] and (allowed is None or allowed[w]):
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


def local_component(g: RegularGraph, config, y: int, B: SetLike) -> VertexSet:
    """
    Component of y in the configuration restricted to B.

    Raises:
        ValidationError: If y is not in B
    """
    B = as_vertex_set(g, B)
    if y not in B:
        raise ValidationError(f"vertex {y} not in the restricting set")
    vacant = _bits(g, config)
    return VertexSet.from_vertices(g.n, _vacant_component(g, vacant, y, B.bits))


def _boundary_component(g: RegularGraph, vacant: np.ndarray, x: int, l: int) -> List[int]:
    if not vacant[x]:
        return []
    dist = ball_distances(g, x, l)
    allowed = np.zeros(g.n, dtype=bool)
    allowed[list(dist)] = True
    reached = _vacant_component(g, vacant, x, allowed)
    return [v for v in reached if dist[v] == l]


def boundary_component(g: RegularGraph, config, x: int, l: int) -> VertexSet:
    """Vertices at distance l from x joined to x by a vacant path inside B(x, l)."""
    if l < 0:
        raise ValidationError(f"radius must be nonnegative, got {l}")
    vacant = _bits(g, config)
    return VertexSet.from_vertices(g.n, _boundary_component(g, vacant, x, l))


def future_set(g: RegularGraph, A: SetLike, y: int, r: int) -> Tuple[VertexSet, bool]:
    """
    Future of y seen from A, and whether it is proper.

    The future is the component of y in B(A, r) minus A. It is proper when
    it induces a tree, y has a single neighbour y_bar in A, and no vertex
    of the future is adjacent to A outside y_bar.

    Raises:
        ValidationError: If r < 1 or y is not on the exterior boundary of A
        DisconnectedSetError: If A is empty or not connected
    """
    if r < 1:
        raise ValidationError(f"radius must be at least 1, got {r}")
    A = as_vertex_set(g, A)
    if not is_connected_set(g, A):
        raise DisconnectedSetError("future set needs a nonempty connected A")
    nbrs = g.neighbour_lists
    inside = A.bits
    if inside[y] or not any(inside[w] for w in nbrs[y]):
        raise ValidationError(f"vertex {y} is not on the exterior boundary of A")

    dist = distances_from_set(g, A, r)
    region = dist >= 1
    future = _vacant_component(g, region, y)
    F = VertexSet.from_vertices(g.n, future)

    anchors = [w for w in nbrs[y] if inside[w]]
    if len(anchors) != 1:
        return F, False
    y_bar = anchors[0]
    for z in future:
        if any(inside[w] and w != y_bar for w in nbrs[z]):
            return F, False
    return F, tree_excess(g, F) == 0


def classify_params(
    n: int,
    d: int,
    u: float,
    beta: Optional[float] = None,
    epsilon: Optional[float] = None,
    h: float = PROPER_H,
    tree_factor: float = 5.0,
    alpha1: float = DEFAULT_ALPHA1,
) -> ClassifyParams:
    """
    Scales of the small/proper/bad classification at level u.

    Raises:
        ValidationError: If u(1+epsilon) is not below u*
    """
    if u <= 0:
        raise ValidationError(f"level must be positive, got {u}")
    beta = alpha1 / 100 if beta is None else beta
    epsilon = admissible_epsilon(u, d) if epsilon is None else epsilon
    if u * (1 + epsilon) >= u_star(d):
        raise ValidationError(f"classification needs u(1+eps) < u*, got u={u}, eps={epsilon}")
    log_n = ld(n, d)
    v_minus = interlacement_params(d, u * (1 - epsilon)).v_u
    return ClassifyParams(
        n=n,
        d=d,
        u=u,
        beta=beta,
        epsilon=epsilon,
        h=h,
        l0=int(math.ceil(10 * math.log(math.log(n)) / v_minus)),
        l1=int(math.floor(beta * log_n)),
        tree_radius=int(math.floor(tree_factor * beta * log_n)),
        small_size=log_n**2,
        v_plus=interlacement_params(d, u * (1 + epsilon)).v_u,
        m_minus=interlacement_params(d, u * (1 - epsilon)).m_u,
    )


def _is_small(g: RegularGraph, vacant: np.ndarray, x: int, prm: ClassifyParams) -> bool:
    """|C_x| <= small_size and C_x inside B(x, l1), by a BFS that stops early."""
    if not vacant[x]:
        return True
    nbrs = g.neighbour_lists
    depth = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for w in nbrs[v]:
            if w in depth or not vacant[w]:
                continue
            depth[w] = depth[v] + 1
            # inside a tree ball the path depth is the graph distance
            if depth[w] > prm.l1 or len(depth) > prm.small_size:
                return False
            queue.append(w)
    return True


def _is_proper(g: RegularGraph, vacant: np.ndarray, x: int, prm: ClassifyParams) -> bool:
    if len(_boundary_component(g, vacant, x, prm.l1)) < prm.proper_threshold:
        return False
    if prm.l0 > prm.l1:
        return True
    for y in ball_distances(g, x, prm.l1):
        for l in range(prm.l0, prm.l1 + 1):
            if len(_boundary_component(g, vacant, y, l)) > prm.m_minus ** (1.25 * l):
                return False
    return True


def classify_vertex(g: RegularGraph, config, x: int, prm: ClassifyParams) -> VertexClass:
    """
    Classify x as small, proper or bad.

    A vertex whose ball of radius prm.tree_radius is not a tree is bad.
    """
    vacant = _bits(g, config)
    if ball_tree_excess(g, x, prm.tree_radius) != 0:
        return VertexClass.BAD
    if _is_small(g, vacant, x, prm):
        return VertexClass.SMALL
    if _is_proper(g, vacant, x, prm):
        return VertexClass.PROPER
    return VertexClass.BAD


def classification_census(
    g: RegularGraph, config, prm: ClassifyParams, vertices: Optional[Iterable[int]] = None
) -> Dict[VertexClass, int]:
    """Counts of small, proper and bad vertices over `vertices` (default all)."""
    vertices = range(g.n) if vertices is None else vertices
    counts = {cls: 0 for cls in VertexClass}
    for x in vertices:
        counts[classify_vertex(g, config, int(x), prm)] += 1
    return counts


def mesoscopic_census(
    g: RegularGraph, config, threshold: float, summary: Optional[ComponentSummary] = None
) -> int:
    """Number of vertices whose vacant component has at least `threshold` vertices."""
    summary = components(g, config) if summary is None else summary
    return int(sum(size for size in summary.sizes if size >= threshold))


def string_congestion(g: RegularGraph, config, y: int, l1: int) -> int:
    """Sum over l of |C_y^l| |C_y^{l1-l}|, the number of strings of length l1 through y."""
    if l1 < 0:
        raise ValidationError(f"string length must be nonnegative, got {l1}")
    vacant = _bits(g, config)
    layers = [len(_boundary_component(g, vacant, y, l)) for l in range(l1 + 1)]
    return int(sum(layers[l] * layers[l1 - l] for l in range(l1 + 1)))


def _visit_index(g: RegularGraph, segments: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    """CSR map from a vertex to the indices of the segments that visit it."""
    if not segments:
        return np.zeros(g.n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    visited = [np.unique(s.vertices) for s in segments]
    vertices = np.concatenate(visited)
    owners = np.repeat(np.arange(len(segments)), [v.size for v in visited])
    order = np.argsort(vertices, kind="stable")
    indptr = np.concatenate(([0], np.cumsum(np.bincount(vertices, minlength=g.n))))
    return indptr, owners[order]


def default_future_radius(n: int, d: int) -> int:
    """max(7 ld ld n, 2)."""
    return int(max(7 * ld(ld(n, d), d), 2)) if ld(n, d) > 1 else 2


def capped_future_radius(n: int, d: int, alpha1: float = DEFAULT_ALPHA1) -> int:
    """
    default_future_radius capped at the tree-like radius floor(alpha1 ld n).

    Past that radius futures carry cycles and are never proper. The cap
    never goes below 2.
    """
    return min(default_future_radius(n, d), max(int(math.floor(alpha1 * ld(n, d))), 2))


class _FutureTracker:
    """Distances to the explored set truncated at r, updated as vertices join it."""

    def __init__(self, g: RegularGraph, r: int):
        if r < 1:
            raise ValidationError(f"radius must be at least 1, got {r}")
        self.nbrs = g.neighbour_lists
        self.r = r
        self.dist: Dict[int, int] = {}

    def add(self, v: int):
        self.dist[v] = 0
        frontier = [v]
        level = 0
        while frontier and level < self.r:
            level += 1
            nxt = []
            for a in frontier:
                for w in self.nbrs[a]:
                    if self.dist.get(w, self.r + 1) > level:
                        self.dist[w] = level
                        nxt.append(w)
            frontier = nxt

    def proper(self, y: int) -> bool:
        """Same answer as future_set(g, explored, y, r)[1]."""
        dist = self.dist
        nbrs = self.nbrs
        seen = {y}
        queue = deque([y])
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if w not in seen and dist.get(w, 0) >= 1:
                    seen.add(w)
                    queue.append(w)
        anchors = [w for w in nbrs[y] if dist.get(w) == 0]
        if len(anchors) != 1:
            return False
        y_bar = anchors[0]
        edges = 0
        for z in seen:
            for w in nbrs[z]:
                if dist.get(w) == 0 and w != y_bar:
                    return False
                edges += w in seen
        return edges // 2 == len(seen) - 1


def bfs_explore_instrumented(
    g: RegularGraph,
    bundle: SegmentBundle,
    x: int,
    K_cap: float = DEFAULT_K_CAP,
    count: Optional[int] = None,
    r: Optional[int] = None,
) -> ExplorationTrace:
    """
    Breadth-first search of the vacant component of x with per-step records.

    A vertex is occupied when one of the first `count` segments visits it
    (default every segment). Popping an occupied vertex ties every segment
    through it. Popping a vacant vertex queues its unexplored neighbours in
    vertex order. The search stops when the queue is empty or the number
    of explored-vacant vertices reaches K_cap * ld n. From the second step
    on, each step records whether the future of the popped vertex seen
    from the explored set is proper.

    Args:
        r: Future-set radius (default max(7 ld ld n, 2))
    """
    if not 0 <= x < g.n:
        raise ValidationError(f"start vertex {x} out of range")
    segments = bundle.segments if count is None else bundle.segments[:count]
    r = default_future_radius(g.n, g.d) if r is None else r
    indptr, owners = _visit_index(g, segments)
    cap = K_cap * ld(g.n, g.d)
    nbrs = g.neighbour_lists

    seen = np.zeros(g.n, dtype=bool)  # in queue or explored
    futures = _FutureTracker(g, r)
    tied = np.zeros(len(segments), dtype=bool)
    tied_count = 0
    ev = eo = 0
    queue = deque([x])
    seen[x] = True
    steps: List[ExplorationStep] = []
    k = 0

    while True:
        if not queue:
            reason = TerminationReason.QUEUE_EMPTY
            break
        if ev >= cap:
            reason = TerminationReason.SIZE_CAP
            break
        k += 1
        q = len(queue)
        y = queue.popleft()
        proper = None
        if k >= 2:
            proper = futures.proper(y)

        free_before, tied_before = len(segments) - tied_count, tied_count
        visitors = owners[indptr[y] : indptr[y + 1]]
        if visitors.size:
            new = visitors[~tied[visitors]]
            tied[new] = True
            tied_count += int(new.size)
            assigned = VertexState.EXPLORED_OCCUPIED
            jump = -1
        else:
            assigned = VertexState.EXPLORED_VACANT
            added = 0
            for w in nbrs[y]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
                    added += 1
            jump = added - 1
        steps.append(
            ExplorationStep(
                k=k,
                vertex=y,
                state=assigned,
                q=q,
                r=jump,
                free_count=free_before,
                tied_count=tied_before,
                explored_vacant=ev,
                explored_occupied=eo,
                proper_future=proper,
            )
        )
        futures.add(y)
        if assigned is VertexState.EXPLORED_VACANT:
            ev += 1
        else:
            eo += 1

    logger.debug("exploration from %d: %d steps, %s", x, k, reason.value)
    return ExplorationTrace(
        start=x, steps=steps, termination_reason=reason, segment_count=len(segments)
    )


def drift_statistics(traces: Sequence[ExplorationTrace]) -> Dict[str, float]:
    """
    Down-step frequency over proper steps and properness failures per trace.

    Returns:
        Dictionary with proper_steps, down_steps, down_frequency,
        mean_failures and max_failures
    """
    proper_steps = down_steps = 0
    failures = []
    for trace in traces:
        for step in trace.steps:
            if step.proper_future:
                proper_steps += 1
                down_steps += step.r == -1
        failures.append(trace.properness_failures)
    return {
        "traces": len(traces),
        "proper_steps": proper_steps,
        "down_steps": down_steps,
        "down_frequency": down_steps / proper_steps if proper_steps else float("nan"),
        "mean_failures": float(np.mean(failures)) if failures else 0.0,
        "max_failures": max(failures, default=0),
    }
