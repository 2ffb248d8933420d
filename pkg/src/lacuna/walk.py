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
Continuous-time simple random walk, its range and vacant set, and exact bridges.

A trajectory is stored exactly as its discrete skeleton plus jump times;
there is no time grid. Every sampler takes an explicit numpy Generator so
that replicas on disjoint streams do not depend on scheduling.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .constants import MAX_BRIDGE_JUMPS
from .exceptions import BridgeTruncationError, UnreachableEndpointError, ValidationError
from .graph import distances_from_set
from .models import (
    JumpStatsReport,
    Provenance,
    RegularGraph,
    Trajectory,
    VacantConfig,
    VertexSet,
)
from .utils import poisson_cutoff

logger = logging.getLogger(__name__)


def sample_walk(
    g: RegularGraph, start: Optional[int], T: float, rng: np.random.Generator
) -> Trajectory:
    """
    Sample simple random walk with rate-1 exponential holding times on [0, T].

    Args:
        g: Host graph
        start: Start vertex, or None to start from the uniform (stationary) law
        T: Horizon
        rng: Random stream

    Returns:
        Trajectory with Poisson(T) jumps at sorted uniform times
    """
    if T < 0:
        raise ValidationError(f"horizon must be nonnegative, got {T}")
    x0 = int(rng.integers(g.n)) if start is None else int(start)
    if not 0 <= x0 < g.n:
        raise ValidationError(f"start vertex {x0} out of range")

    jumps = int(rng.poisson(T)) if T > 0 else 0
    times = np.sort(rng.uniform(0.0, T, size=jumps))
    choices = rng.integers(0, g.d, size=jumps).tolist()
    nbrs = g.neighbour_lists
    skeleton = [x0] * (jumps + 1)
    current = x0
    for i, c in enumerate(choices, start=1):
        current = nbrs[current][c]
        skeleton[i] = current
    return Trajectory(vertices=np.array(skeleton), jump_times=times, horizon=T, n=g.n)


def range_of(traj: Trajectory, s: float, t: float) -> VertexSet:
    """Set of vertices visited on [s, t], including the position at time s."""
    if not 0 <= s <= t <= traj.horizon:
        raise ValidationError(f"bad interval [{s}, {t}] for horizon {traj.horizon}")
    first = int(np.searchsorted(traj.jump_times, s, side="right"))
    last = int(np.searchsorted(traj.jump_times, t, side="right"))
    bits = np.zeros(traj.n, dtype=bool)
    bits[traj.vertices[first : last + 1]] = True
    return VertexSet(bits)


def vacant_set(g: RegularGraph, traj: Trajectory, u: float) -> VacantConfig:
    """
    Vertices not visited by `traj` up to time u*n.

    Raises:
        ValidationError: If u < 0 or the trajectory is shorter than u*n
    """
    if u < 0:
        raise ValidationError(f"level must be nonnegative, got {u}")
    if traj.n != g.n:
        raise ValidationError("trajectory and graph have different vertex counts")
    horizon = u * g.n
    if traj.horizon < horizon:
        raise ValidationError(f"horizon {traj.horizon} shorter than u*n = {horizon}")
    visited = range_of(traj, 0.0, horizon)
    return VacantConfig(bits=~visited.bits, provenance=Provenance.FULL_WALK, u_level=u)


class BridgeSampler:
    """
    Exact sampler of random walk bridges of duration ell ending at y.

    The vectors h_j = P^j delta_y, j = 0..k_max, are computed once, so one
    sampler serves every bridge with the same target and duration. For
    ell > 0 the truncation is the Poisson cutoff shifted by the
    eccentricity of y, so every start is reachable even when ell is far
    below the graph distance.
    """

    def __init__(self, g: RegularGraph, y: int, ell: float):
        if ell < 0:
            raise ValidationError(f"bridge duration must be nonnegative, got {ell}")
        if not 0 <= y < g.n:
            raise ValidationError(f"target vertex {y} out of range")
        self.g = g
        self.y = int(y)
        self.ell = float(ell)
        self.k_max = poisson_cutoff(self.ell)
        if self.k_max > MAX_BRIDGE_JUMPS:
            raise BridgeTruncationError(
                f"bridge of duration {ell} needs {self.k_max} jumps, budget {MAX_BRIDGE_JUMPS}"
            )
        if self.ell > 0:
            self.k_max += int(distances_from_set(g, [self.y]).max())
        P = g.transition_matrix()
        h = np.zeros((self.k_max + 1, g.n))
        h[0, self.y] = 1.0
        for j in range(1, self.k_max + 1):
            h[j] = P @ h[j - 1]
        self._h = h
        if self.ell > 0:
            self._poisson = stats.poisson.pmf(np.arange(self.k_max + 1), self.ell)
        else:
            self._poisson = np.ones(1)

    def jump_count_law(self, x: int) -> np.ndarray:
        """Law of the jump count k, proportional to Poisson(ell)(k) * P^k(x, y)."""
        weights = self._poisson * self._h[:, x]
        total = weights.sum()
        if not total > 0:
            raise UnreachableEndpointError(
                f"no path of at most {self.k_max} steps from {x} to {self.y}"
            )
        return weights / total

    def sample(self, x: int, rng: np.random.Generator) -> Trajectory:
        """Draw one bridge from x to the sampler's target."""
        law = self.jump_count_law(x)
        k = int(rng.choice(law.size, p=law))
        nbrs = self.g.adjacency
        skeleton = np.empty(k + 1, dtype=np.int64)
        skeleton[0] = x
        current = x
        for j in range(k):
            options = nbrs[current]
            # P(w, z) is 1/d for every neighbour, so only h_{k-j-1} weighs
            weights = self._h[k - j - 1, options]
            current = int(options[rng.choice(options.size, p=weights / weights.sum())])
            skeleton[j + 1] = current
        times = np.sort(rng.uniform(0.0, self.ell, size=k))
        return Trajectory(vertices=skeleton, jump_times=times, horizon=self.ell, n=self.g.n)


def sample_bridge(
    g: RegularGraph, x: int, y: int, ell: float, rng: np.random.Generator
) -> Trajectory:
    """
    Sample a random walk bridge from x to y of duration ell.

    Raises:
        BridgeTruncationError: If the jump-count truncation exceeds its budget
        UnreachableEndpointError: If y cannot be reached within the truncation
    """
    return BridgeSampler(g, y, ell).sample(x, rng)


def jump_stats(
    segments: Sequence[Trajectory], bridges: Sequence[Trajectory] = ()
) -> JumpStatsReport:
    """
    Jump-count report for segments and bridges.

    A segment with horizon h > 0 is flagged when its jump count falls
    outside (h/2, 2h). A bridge is flagged when it jumps more than ln^3 n
    times. The total bridge jumps are compared with ln^5 n * n / h.
    """
    trajs = list(segments) + list(bridges)
    if not trajs:
        return JumpStatsReport([], [], [], [], 0.0, 0, 0.0)
    n = trajs[0].n
    log_n = math.log(n)

    segment_counts = [s.n_jumps for s in segments]
    flagged_segments = [
        i for i, s in enumerate(segments)
        if s.horizon > 0 and not s.horizon / 2 < s.n_jumps < 2 * s.horizon
    ]
    bridge_bound = log_n**3
    bridge_counts = [b.n_jumps for b in bridges]
    flagged_bridges = [i for i, count in enumerate(bridge_counts) if count > bridge_bound]

    horizon = max((s.horizon for s in segments), default=0.0)
    total_bound = log_n**5 * n / horizon if horizon > 0 else math.inf
    report = JumpStatsReport(
        segment_counts=segment_counts,
        bridge_counts=bridge_counts,
        flagged_segments=flagged_segments,
        flagged_bridges=flagged_bridges,
        bridge_bound=bridge_bound,
        total_bridge_jumps=int(sum(bridge_counts)),
        total_bridge_bound=total_bound,
    )
    if flagged_segments or flagged_bridges:
        logger.info(
            "jump stats: %d/%d segments and %d/%d bridges flagged",
            len(flagged_segments), len(segment_counts), len(flagged_bridges), len(bridge_counts),
        )
    return report

