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
Data models for graphs, trajectories, vacant configurations and reports.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .exceptions import ValidationError


class Provenance(Enum):
    """Which trajectory set generated a vacant configuration."""

    FULL_WALK = "full_walk"
    SEGMENTS = "segments"
    SEGMENTS_BRIDGES = "segments_bridges"
    SPRINKLED = "sprinkled"


class VertexClass(Enum):
    """Classification of a vertex under a vacant configuration."""

    SMALL = "small"
    PROPER = "proper"
    BAD = "bad"


class VertexState(Enum):
    """
    Exploration state of a vertex in the instrumented breadth-first search.

    States:
    - EXPLORED_VACANT: popped from the queue and not visited by any segment
    - EXPLORED_OCCUPIED: popped from the queue and visited by some segment
    - NOT_EXPLORED: never reached
    - IN_QUEUE: waiting to be explored
    """

    EXPLORED_VACANT = "explored-vacant"
    EXPLORED_OCCUPIED = "explored-occupied"
    NOT_EXPLORED = "not-explored"
    IN_QUEUE = "in-queue"


class TerminationReason(Enum):
    """Why an exploration stopped."""

    QUEUE_EMPTY = "queue_empty"
    SIZE_CAP = "size_cap"


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """
    Simple d-regular graph on vertices 0..n-1.

    Each adjacency row holds the d neighbours of a vertex in ascending order.
    Instances are immutable and safe to share across workers.
    """

    n: int
    d: int
    adjacency: np.ndarray
    connected: bool
    restarts: int = 0

    def __post_init__(self):
        adjacency = np.array(self.adjacency, dtype=np.int64)
        if adjacency.shape != (self.n, self.d):
            raise ValidationError(
                f"adjacency shape {adjacency.shape} does not match n={self.n}, d={self.d}"
            )
        adjacency.sort(axis=1)
        object.__setattr__(self, "adjacency", _readonly(adjacency))
        self._check_regular()
        if bool(self.connected) != (self._count_components() == 1):
            raise ValidationError("connected flag does not match the adjacency")

    def _check_regular(self):
        n, d, adjacency = self.n, self.d, self.adjacency
        if n <= d:
            raise ValidationError(f"need n > d, got n={n}, d={d}")
        if adjacency.size and (adjacency.min() < 0 or adjacency.max() >= n):
            raise ValidationError("neighbour id out of range")
        rows = np.repeat(np.arange(n, dtype=np.int64), d)
        cols = adjacency.ravel()
        if np.any(rows == cols):
            raise ValidationError("self-loop in adjacency")
        if d > 1 and np.any(np.diff(adjacency, axis=1) == 0):
            raise ValidationError("repeated neighbour in adjacency")
        forward = np.sort(rows * n + cols)
        backward = np.sort(cols * n + rows)
        if not np.array_equal(forward, backward):
            raise ValidationError("adjacency is not symmetric")

    def _count_components(self) -> int:
        count, _ = csgraph.connected_components(self.adjacency_matrix(), directed=False)
        return int(count)

    @classmethod
    def from_edges(
        cls, n: int, d: int, edges: Iterable[Tuple[int, int]], restarts: int = 0
    ) -> "RegularGraph":
        """
        Build a graph from an undirected edge list.

        Args:
            n: Vertex count
            d: Degree
            edges: Each undirected edge once
            restarts: Generator restarts to record

        Returns:
            RegularGraph with connectivity computed

        Raises:
            ValidationError: If the edges do not form a simple d-regular graph
        """
        pairs = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
        if (n * d) % 2 or len(pairs) != n * d // 2:
            raise ValidationError(f"expected {n * d // 2} edges for n={n}, d={d}, got {len(pairs)}")
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise ValidationError("edge endpoint out of range")
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        degrees = np.bincount(rows, minlength=n)
        if np.any(degrees != d):
            bad = int(np.flatnonzero(degrees != d)[0])
            raise ValidationError(f"vertex {bad} has degree {int(degrees[bad])}, expected {d}")
        order = np.lexsort((cols, rows))
        adjacency = cols[order].reshape(n, d)
        matrix = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        count, _ = csgraph.connected_components(matrix, directed=False)
        return cls(n=n, d=d, adjacency=adjacency, connected=count == 1, restarts=restarts)

    @cached_property
    def neighbour_lists(self) -> List[List[int]]:
        """Adjacency as nested Python lists for scalar loops."""
        return self.adjacency.tolist()

    def neighbours(self, x: int) -> np.ndarray:
        return self.adjacency[x]

    def has_edge(self, x: int, y: int) -> bool:
        row = self.adjacency[x]
        i = int(np.searchsorted(row, y))
        return i < self.d and int(row[i]) == y

    def edges(self) -> np.ndarray:
        """Undirected edges (u, v) with u < v in ascending order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.d)
        cols = self.adjacency.ravel()
        mask = rows < cols
        return np.stack([rows[mask], cols[mask]], axis=1)

    def adjacency_matrix(self) -> sparse.csr_matrix:
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.d)
        data = np.ones(self.n * self.d)
        return sparse.csr_matrix((data, (rows, self.adjacency.ravel())), shape=(self.n, self.n))

    def transition_matrix(self) -> sparse.csr_matrix:
        """One-step transition operator of simple random walk."""
        return self.adjacency_matrix() / self.d


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Membership bits over vertices 0..n-1."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _readonly(np.array(self.bits, dtype=bool)))

    @classmethod
    def from_vertices(cls, n: int, vertices: Iterable[int]) -> "VertexSet":
        bits = np.zeros(n, dtype=bool)
        index = np.fromiter((int(v) for v in vertices), dtype=np.int64)
        if index.size and (index.min() < 0 or index.max() >= n):
            raise ValidationError("vertex id out of range")
        bits[index] = True
        return cls(bits)

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(np.ones(n, dtype=bool))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    @property
    def cardinality(self) -> int:
        return int(np.count_nonzero(self.bits))

    def vertices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def __len__(self) -> int:
        return self.cardinality

    def __contains__(self, x: object) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= int(x) < self.n and bool(self.bits[int(x)])

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices().tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))

    __hash__ = None  # type: ignore[assignment]

    def union(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.bits | other.bits)

    def intersection(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.bits & other.bits)

    def difference(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.bits & ~other.bits)

    def complement(self) -> "VertexSet":
        return VertexSet(~self.bits)

    def issubset(self, other: "VertexSet") -> bool:
        return not bool(np.any(self.bits & ~other.bits))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Continuous-time nearest-neighbour path on [0, horizon].

    The walk sits at vertices[i] on [jump_times[i-1], jump_times[i]).
    """

    vertices: np.ndarray
    jump_times: np.ndarray
    horizon: float
    n: int

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=np.int64)
        times = np.array(self.jump_times, dtype=float)
        if vertices.size == 0:
            raise ValidationError("trajectory needs a start vertex")
        if times.size != vertices.size - 1:
            raise ValidationError(
                f"{times.size} jump times for {vertices.size} skeleton vertices"
            )
        if self.horizon < 0:
            raise ValidationError(f"negative horizon {self.horizon}")
        if times.size and (times[0] < 0 or times[-1] > self.horizon or np.any(np.diff(times) < 0)):
            raise ValidationError("jump times must be sorted inside [0, horizon]")
        object.__setattr__(self, "vertices", _readonly(vertices))
        object.__setattr__(self, "jump_times", _readonly(times))
        object.__setattr__(self, "horizon", float(self.horizon))

    @property
    def n_jumps(self) -> int:
        return int(self.jump_times.size)

    @property
    def start(self) -> int:
        return int(self.vertices[0])

    @property
    def end(self) -> int:
        return int(self.vertices[-1])

    def position_at(self, t: float) -> int:
        """Vertex occupied at time t (right-continuous)."""
        if t < 0 or t > self.horizon:
            raise ValidationError(f"time {t} outside [0, {self.horizon}]")
        return int(self.vertices[np.searchsorted(self.jump_times, t, side="right")])

    def check_adjacent(self, graph: RegularGraph) -> bool:
        """True when every skeleton step follows an edge of `graph`."""
        if self.vertices.size < 2:
            return True
        src, dst = self.vertices[:-1], self.vertices[1:]
        return bool(np.all(np.any(graph.adjacency[src] == dst[:, None], axis=1)))

    def dump(self) -> str:
        """Debug text: header "n_jumps horizon", then "vertex time" per visit."""
        lines = [f"{self.n_jumps} {self.horizon:.17g}"]
        times = np.concatenate([[0.0], self.jump_times])
        for vertex, time in zip(self.vertices.tolist(), times.tolist()):
            lines.append(f"{vertex} {time:.17g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class VacantConfig:
    """Vacancy bits (True = not visited) with the generating provenance."""

    bits: np.ndarray
    provenance: Provenance
    u_level: float

    def __post_init__(self):
        object.__setattr__(self, "bits", _readonly(np.array(self.bits, dtype=bool)))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    @property
    def vacant_count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_vacant(self, x: int) -> bool:
        return bool(self.bits[x])

    def vacant_set(self) -> VertexSet:
        return VertexSet(self.bits)


@dataclass
class ComponentSummary:
    """Connected components of a vacant configuration."""

    labels: np.ndarray  # smallest vertex of the component, -1 when occupied
    sizes: List[int]  # descending

    @property
    def c_max_size(self) -> int:
        return self.sizes[0] if self.sizes else 0

    @property
    def c_sec_size(self) -> int:
        return self.sizes[1] if len(self.sizes) > 1 else 0

    @property
    def component_count(self) -> int:
        return len(self.sizes)

    @property
    def vacant_count(self) -> int:
        return int(sum(self.sizes))

    def vertex_sizes(self) -> np.ndarray:
        """Size of the component of each vertex, 0 for occupied vertices."""
        vacant = self.labels >= 0
        counts = np.bincount(self.labels[vacant], minlength=self.labels.size)
        return np.where(vacant, counts[np.where(vacant, self.labels, 0)], 0)

    def component_of(self, x: int) -> np.ndarray:
        if self.labels[x] < 0:
            return np.empty(0, dtype=np.int64)
        return np.flatnonzero(self.labels == self.labels[x])


@dataclass
class ExplorationStep:
    """One step of the instrumented breadth-first search."""

    k: int
    vertex: int
    state: VertexState
    q: int  # queue length before the step
    r: int  # q_{k+1} - q_k
    free_count: int
    tied_count: int
    explored_vacant: int
    explored_occupied: int
    proper_future: Optional[bool]


@dataclass
class ExplorationTrace:
    """Record of one instrumented exploration."""

    start: int
    steps: List[ExplorationStep]
    termination_reason: TerminationReason
    segment_count: int

    @property
    def explored_vacant(self) -> int:
        if not self.steps:
            return 0
        last = self.steps[-1]
        return last.explored_vacant + (last.state == VertexState.EXPLORED_VACANT)

    @property
    def properness_failures(self) -> int:
        return sum(1 for step in self.steps if step.proper_future is False)


@dataclass(frozen=True)
class InterlacementParams:
    """Branching description of random interlacements on the d-regular tree."""

    d: int
    u: float
    p_u: float
    m_u: float
    v_u: float
    u_star: float
    f_root: float
    f_other: float


@dataclass(frozen=True)
class TreeClusterSample:
    """
    Vacant cluster of the tree root.

    Nodes are root paths: the root is (), its i-th child is (i,), and so on.
    """

    vertices: FrozenSet[Tuple[int, ...]]
    truncated_at: Optional[int] = None
    size_capped: bool = False

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def depth(self) -> int:
        return max((len(v) for v in self.vertices), default=-1)


@dataclass
class ClusterHistogram:
    """Cluster-size counts; `capped` collects samples that hit a cap."""

    counts: Dict[int, int]
    capped: int
    samples: int

    def frequencies(self, max_size: int) -> np.ndarray:
        out = np.zeros(max_size + 1)
        for size, count in self.counts.items():
            if size <= max_size:
                out[size] = count
        return out / max(self.samples, 1)


@dataclass(frozen=True)
class PimParams:
    """Scales of the piecewise independent measure."""

    n: int
    d: int
    u: float
    gamma: float
    L: float
    ell: float
    count_floor: int
    count_ceil: int
    epsilon: float
    beta: float
    delta: float
    q_sprinkle: float
    J: int
    u_prime: float
    u_n: float

    def __post_init__(self):
        if self.L <= 0 or self.ell <= 0:
            raise ValidationError("segment and bridge lengths must be positive")
        if not self.count_floor <= self.count_ceil <= self.count_floor + 1:
            raise ValidationError("segment counts out of order")
        if not 0.0 < self.q_sprinkle < 1.0:
            raise ValidationError(f"sprinkling parameter {self.q_sprinkle} not in (0,1)")

    def count_for(self, level: float, variant: str = "floor") -> int:
        """Segments needed for `level`: floor or ceil of level*n/(L+ell)."""
        value = level * self.n / (self.L + self.ell)
        if variant == "floor":
            return int(math.floor(value))
        if variant == "ceil":
            return int(math.ceil(value))
        raise ValidationError(f"unknown count variant '{variant}'")


@dataclass(frozen=True)
class SegmentBundle:
    """Segments Y^i with optional consecutive bridges Z^i and long-range Z^{i,j}."""

    segments: Tuple[Trajectory, ...]
    L: float
    ell: float
    bridges: Optional[Tuple[Trajectory, ...]] = None
    longrange: Optional[Dict[Tuple[int, int], Trajectory]] = None

    @property
    def count(self) -> int:
        return len(self.segments)


@dataclass
class SprinkleResult:
    """Outcome of sprinkling; `config` is None off the good event."""

    config: Optional[VacantConfig]
    good_event: bool
    kept_count: int
    kept_indices: List[int]
    trajectory: Optional[Trajectory] = None


@dataclass
class RadonNikodymReport:
    """Per-vertex vacancy frequencies under the direct walk and the concatenation."""

    replicas: int
    walk_frequencies: np.ndarray
    concat_frequencies: np.ndarray
    max_difference: float
    flagged_vertices: List[int]
    z: float

    @property
    def flagged(self) -> bool:
        return bool(self.flagged_vertices)


@dataclass
class JumpStatsReport:
    """Jump counts of segments and bridges with their flags."""

    segment_counts: List[int]
    bridge_counts: List[int]
    flagged_segments: List[int]
    flagged_bridges: List[int]
    bridge_bound: float
    total_bridge_jumps: int
    total_bridge_bound: float

    @property
    def segment_flag_rate(self) -> float:
        if not self.segment_counts:
            return 0.0
        return len(self.flagged_segments) / len(self.segment_counts)

    @property
    def clean(self) -> bool:
        return (
            not self.flagged_segments
            and not self.flagged_bridges
            and self.total_bridge_jumps <= self.total_bridge_bound
        )


@dataclass
class HittingSolution:
    """Expected hitting times of a set and the normalized minimizer f*."""

    expected_times: np.ndarray
    stationary_mean: float
    f_star: np.ndarray


@dataclass
class PotentialField:
    """Equilibrium potential: 1 on boundary_A, 0 on boundary_C, harmonic elsewhere."""

    values: np.ndarray
    boundary_A: VertexSet
    boundary_C: VertexSet


@dataclass
class QuasiStationaryResult:
    """Quasi-stationary law of the chain killed on a set."""

    distribution: np.ndarray
    eigenvalue: float
    iterations: int

    @property
    def expected_exit_time(self) -> float:
        return 1.0 / (1.0 - self.eigenvalue)


@dataclass
class BoundaryHittingReport:
    """Probabilities of reaching the inner ball before leaving the outer one."""

    probabilities: Dict[int, float]
    max_probability: float
    tree_value: float
    tree_excess: int
    record: "VerificationRecord"


@dataclass
class AssumptionReport:
    """Outcome of the regularity, tree-like and expansion checks."""

    a0_ok: bool
    a1_radius: int
    a1_ok: bool
    a1_violations: List[int]
    spectral_gap: float
    girth: int
    alpha1: float
    alpha2: Optional[float] = None

    def a2_ok(self, threshold: Optional[float] = None) -> bool:
        threshold = self.alpha2 if threshold is None else threshold
        if threshold is None:
            raise ValidationError("no spectral-gap threshold given")
        return self.spectral_gap > threshold


@dataclass
class VerificationRecord:
    """One checked (or only measured) relation lhs <= rhs or lhs ~ rhs."""

    check: str
    inputs: Dict[str, Any]
    lhs: float
    rhs: float
    passed: Optional[bool]
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "inputs": self.inputs,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "pass": self.passed,
            "note": self.note,
        }


@dataclass
class ClassifyParams:
    """Scales used to classify vertices as small, proper or bad."""

    n: int
    d: int
    u: float
    beta: float
    epsilon: float
    h: float
    l0: int
    l1: int
    tree_radius: int
    small_size: float
    v_plus: float
    m_minus: float

    @property
    def proper_threshold(self) -> float:
        return self.h * self.n ** (self.v_plus * self.beta)


@dataclass
class ExperimentConfig:
    """Parameters of one experiment run."""

    command: Optional[str] = None
    n: int = 1024
    d: int = 3
    u_grid: List[float] = field(default_factory=list)
    seeds: List[int] = field(default_factory=lambda: [0])
    replicas: int = 100
    gamma: Optional[float] = None
    delta: float = 0.1
    variant: str = "floor"
    out: Optional[str] = None
    threads: int = 1
    seed: int = 0
    alpha1: float = 0.2
    alpha2: Optional[float] = None
    kappa: float = 0.01
    beta: Optional[float] = None
    T: Optional[float] = None
    s: int = 4
    K: float = 4.0
    ell: Optional[float] = None
    r: Optional[int] = None

    def validate(self):
        """Raise ValidationError when a field is out of range."""
        for name in ("n", "d", "replicas", "threads"):
            value = getattr(self, name)
            if value <= 0:
                raise ValidationError(f"{name} must be positive, got {value}")
        if self.d < 3:
            raise ValidationError(f"d must be at least 3, got {self.d}")
        for name in ("delta", "alpha1", "kappa", "K"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("gamma", "alpha2", "beta", "T", "ell"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValidationError(f"{name} must be positive, got {value}")
        if self.r is not None and self.r < 1:
            raise ValidationError(f"r must be at least 1, got {self.r}")
        if self.gamma is not None and self.gamma >= 1:
            raise ValidationError(f"gamma must be below 1, got {self.gamma}")
        if any(u < 0 for u in self.u_grid):
            raise ValidationError("u-grid values must be nonnegative")
        if list(self.u_grid) != sorted(self.u_grid):
            raise ValidationError("u-grid must be sorted")
        if self.variant not in ("floor", "ceil"):
            raise ValidationError(f"variant must be floor or ceil, got '{self.variant}'")
        if any(seed < 0 for seed in self.seeds):
            raise ValidationError("seeds must be nonnegative")


@dataclass
class SweepRecord:
    """One (u, seed) row of a phase-transition sweep."""

    n: int
    d: int
    u: float
    seed: int
    c_max: int
    c_sec: int
    vacant_count: int
    good_event: Optional[bool]
    wall_ms: float

    def validate(self):
        if self.c_max < self.c_sec:
            raise ValidationError(f"c_max {self.c_max} < c_sec {self.c_sec}")
        if self.vacant_count < self.c_max:
            raise ValidationError(f"vacant_count {self.vacant_count} < c_max {self.c_max}")
        if self.vacant_count > self.n:
            raise ValidationError(f"vacant_count {self.vacant_count} > n {self.n}")
