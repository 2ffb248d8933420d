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
Piecewise independent measure: segments, bridges and sprinkling.

A bundle holds i.i.d. stationary segments Y^i of length L = n^gamma. The
consecutive bridges Z^i of length ell = (ln n)^2 join the end of Y^i to
the start of Y^{i+1}, and the long-range bridges Z^{i,j} join the end of
Y^i to the start of Y^{i+j}. Bundles are immutable; attaching bridges
returns a new bundle.
"""

import dataclasses
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_ALPHA1
from .exceptions import InsufficientSegmentsError, ValidationError
from .interlace import params as interlacement_params
from .interlace import u_star
from .models import (
    PimParams,
    Provenance,
    RadonNikodymReport,
    RegularGraph,
    SegmentBundle,
    SprinkleResult,
    Trajectory,
    VacantConfig,
)
from .walk import BridgeSampler, range_of, sample_walk, vacant_set

logger = logging.getLogger(__name__)

EPSILON_MODES = ("auto", "supercritical", "subcritical")


def admissible_epsilon(u: float, d: int = 3) -> float:
    """Largest 2^-k with u(1+eps) < (u+u*)/2 and 1/4 + 11/4 eps < u*/(2(u+u*))."""
    critical = u_star(d)
    for k in range(1, 64):
        eps = 2.0**-k
        if u * (1 + eps) < (u + critical) / 2 and 0.25 + 2.75 * eps < critical / (
            2 * (u + critical)
        ):
            return eps
    raise ValidationError(f"no admissible epsilon for u={u} (u* = {critical})")


def derive_params(
    n: int,
    u: float,
    d: int = 3,
    epsilon_mode: str = "auto",
    delta: float = 0.1,
    alpha1: float = DEFAULT_ALPHA1,
    gamma: Optional[float] = None,
    beta: Optional[float] = None,
) -> PimParams:
    """
    Derive segment length, counts and sprinkling scales for level u.

    In supercritical mode epsilon and the default gamma = v beta/2 are
    evaluated at u' = (u + u*)/2, the top of the sprinkling range, with v
    taken at u'(1+epsilon).

    Args:
        n: Vertex count
        u: Level
        d: Degree
        epsilon_mode: "supercritical" (needs u < u*), "subcritical" (eps = 0,
            gamma = beta/2) or "auto" to pick by the sign of u* - u
        delta: Sprinkling exponent
        alpha1: Tree-like radius factor; beta = alpha1/100
        gamma: Override for the segment exponent
        beta: Override for beta

    Raises:
        ValidationError: On u <= 0, an unknown mode, or supercritical mode at u >= u*
    """
    if u <= 0:
        raise ValidationError(f"level must be positive, got {u}")
    if n < 2:
        raise ValidationError(f"n must be at least 2, got {n}")
    if epsilon_mode not in EPSILON_MODES:
        raise ValidationError(f"unknown epsilon mode '{epsilon_mode}'")
    critical = u_star(d)
    if epsilon_mode == "auto":
        epsilon_mode = "supercritical" if u < critical else "subcritical"
    if epsilon_mode == "supercritical" and u >= critical:
        raise ValidationError(f"supercritical parameters need u < u* = {critical:.6f}, got {u}")

    beta = alpha1 / 100 if beta is None else beta
    u_prime = (u + critical) / 2
    if epsilon_mode == "supercritical":
        epsilon = admissible_epsilon(u_prime, d)
        default_gamma = interlacement_params(d, u_prime * (1 + epsilon)).v_u * beta / 2
    else:
        epsilon = 0.0
        default_gamma = beta / 2
    gamma = default_gamma if gamma is None else gamma
    if not 0 < gamma < 1:
        raise ValidationError(f"gamma must lie in (0,1), got {gamma}")

    L = n**gamma
    ell = math.log(n) ** 2
    count = u * n / (L + ell)
    prm = PimParams(
        n=n,
        d=d,
        u=u,
        gamma=gamma,
        L=L,
        ell=ell,
        count_floor=int(math.floor(count)),
        count_ceil=int(math.ceil(count)),
        epsilon=epsilon,
        beta=beta,
        delta=delta,
        q_sprinkle=n ** (-2 * delta),
        J=int(math.floor(math.log(n))),
        u_prime=u_prime,
        u_n=min(u + n ** (-delta), u_prime),
    )
    logger.debug("pim params: %s", prm)
    return prm


def sample_segments(
    g: RegularGraph, count: int, L: float, rng: np.random.Generator, ell: Optional[float] = None
) -> SegmentBundle:
    """
    Sample `count` i.i.d. segments of length L from the uniform start law.

    `ell` records the bridge length the bundle is meant for and defaults
    to (ln n)^2.
    """
    if count < 0:
        raise ValidationError(f"segment count must be nonnegative, got {count}")
    ell = math.log(g.n) ** 2 if ell is None else ell
    segments = tuple(sample_walk(g, None, L, rng) for _ in range(count))
    return SegmentBundle(segments=segments, L=L, ell=ell)


def _check_ell(bundle: SegmentBundle, ell: float):
    if bundle.bridges is not None or bundle.longrange is not None:
        if not math.isclose(bundle.ell, ell):
            raise ValidationError(f"bundle already has bridges of length {bundle.ell}, got {ell}")


def attach_bridges(
    g: RegularGraph, bundle: SegmentBundle, ell: float, rng: np.random.Generator
) -> SegmentBundle:
    """Attach Z^i from the end of Y^i to the start of Y^{i+1}, i < count-1."""
    if not bundle.segments:
        raise ValidationError("bundle has no segments")
    _check_ell(bundle, ell)
    bridges = [
        BridgeSampler(g, right.start, ell).sample(left.end, rng)
        for left, right in zip(bundle.segments, bundle.segments[1:])
    ]
    return dataclasses.replace(bundle, ell=ell, bridges=tuple(bridges))


def attach_longrange(
    g: RegularGraph, bundle: SegmentBundle, ell: float, J: int, rng: np.random.Generator
) -> SegmentBundle:
    """Attach Z^{i,j} from the end of Y^i to the start of Y^{i+j}, i < count-J, 1 <= j <= J."""
    if not bundle.segments:
        raise ValidationError("bundle has no segments")
    if J < 1:
        raise ValidationError(f"J must be at least 1, got {J}")
    _check_ell(bundle, ell)
    segments = bundle.segments
    sources = len(segments) - J
    drawn: Dict[Tuple[int, int], Trajectory] = {}
    # one sampler per target segment; it serves the J bridges ending there
    for target in range(1, len(segments)):
        pairs = [(target - j, j) for j in range(1, J + 1) if 0 <= target - j < sources]
        if not pairs:
            continue
        sampler = BridgeSampler(g, segments[target].start, ell)
        for i, j in pairs:
            drawn[(i, j)] = sampler.sample(segments[i].end, rng)
    longrange = {key: drawn[key] for key in sorted(drawn)}
    logger.debug("attached %d long-range bridges", len(longrange))
    return dataclasses.replace(bundle, ell=ell, longrange=longrange)


def _concatenate_pieces(pieces: Sequence[Trajectory]) -> Trajectory:
    """Join trajectories end to start, shifting jump times by the elapsed horizon."""
    if not pieces:
        raise ValidationError("nothing to concatenate")
    vertices: List[np.ndarray] = [pieces[0].vertices]
    times: List[np.ndarray] = [pieces[0].jump_times]
    offset = pieces[0].horizon
    for prev, piece in zip(pieces, pieces[1:]):
        if piece.start != prev.end:
            raise ValidationError(f"junction mismatch: {prev.end} then {piece.start}")
        vertices.append(piece.vertices[1:])
        times.append(piece.jump_times + offset)
        offset += piece.horizon
    return Trajectory(
        vertices=np.concatenate(vertices),
        jump_times=np.concatenate(times),
        horizon=offset,
        n=pieces[0].n,
    )


def concatenate(bundle: SegmentBundle) -> Trajectory:
    """
    Concatenate Y^0 Z^0 Y^1 ... Z^{k-2} Y^{k-1} into one trajectory.

    The horizon is k L + (k-1) ell.

    Raises:
        ValidationError: If the bundle has no segments or no bridges
    """
    if not bundle.segments:
        raise ValidationError("bundle has no segments")
    if bundle.bridges is None:
        if bundle.count == 1:
            return bundle.segments[0]
        raise ValidationError("bundle has no bridges")
    pieces: List[Trajectory] = []
    for i, segment in enumerate(bundle.segments):
        pieces.append(segment)
        if i < len(bundle.bridges):
            pieces.append(bundle.bridges[i])
    return _concatenate_pieces(pieces)


def _count(bundle: SegmentBundle, n: int, u_level: float, variant: str) -> int:
    if u_level < 0:
        raise ValidationError(f"level must be nonnegative, got {u_level}")
    value = u_level * n / (bundle.L + bundle.ell)
    if variant == "floor":
        count = int(math.floor(value))
    elif variant == "ceil":
        count = int(math.ceil(value))
    else:
        raise ValidationError(f"unknown count variant '{variant}'")
    if count > bundle.count:
        raise InsufficientSegmentsError(
            f"level {u_level} needs {count} segments, bundle has {bundle.count}"
        )
    return count


def _visited(n: int, trajs: Sequence[Trajectory]) -> np.ndarray:
    bits = np.zeros(n, dtype=bool)
    for traj in trajs:
        bits[traj.vertices] = True
    return bits


def xi_segments(
    g: RegularGraph, bundle: SegmentBundle, u_level: float, variant: str = "floor"
) -> VacantConfig:
    """
    Vacant set left by the first floor (or ceil) of u n/(L+ell) segments.

    Raises:
        InsufficientSegmentsError: If the bundle is too short for the level
    """
    count = _count(bundle, g.n, u_level, variant)
    visited = _visited(g.n, bundle.segments[:count])
    return VacantConfig(bits=~visited, provenance=Provenance.SEGMENTS, u_level=u_level)


def xi_prime(g: RegularGraph, bundle: SegmentBundle, u_level: float) -> VacantConfig:
    """
    Vacant set left by Y^i and every Z^{i,j} with i < M_u (ceil count).

    Raises:
        ValidationError: If the bundle carries no long-range bridges
        InsufficientSegmentsError: If the bundle is too short for the level
    """
    if bundle.longrange is None:
        raise ValidationError("bundle has no long-range bridges")
    count = _count(bundle, g.n, u_level, "ceil")
    trajs = list(bundle.segments[:count])
    trajs.extend(z for (i, _), z in bundle.longrange.items() if i < count)
    visited = _visited(g.n, trajs)
    return VacantConfig(bits=~visited, provenance=Provenance.SEGMENTS_BRIDGES, u_level=u_level)


def build_bundle(
    g: RegularGraph,
    prm: PimParams,
    rng: np.random.Generator,
    count: Optional[int] = None,
    longrange: bool = True,
) -> SegmentBundle:
    """
    Segments with consecutive and (optionally) long-range bridges.

    The default count M_{u_n} + J is what sprinkling needs.
    """
    if count is None:
        count = prm.count_for(prm.u_n, "ceil") + prm.J
    bundle = sample_segments(g, count, prm.L, rng, prm.ell)
    bundle = attach_bridges(g, bundle, prm.ell, rng)
    if longrange:
        bundle = attach_longrange(g, bundle, prm.ell, prm.J, rng)
    return bundle


def sprinkle(
    g: RegularGraph,
    bundle: SegmentBundle,
    u: float,
    prm: PimParams,
    rng: np.random.Generator,
    q: Optional[float] = None,
) -> SprinkleResult:
    """
    Sprinkled configuration at level u from a bundle built at level u_n.

    Each index k < M_{u_n} is dropped independently with probability q.
    With kept indices k_0 < k_1 < ... and the sentinel M_{u_n} appended,
    the good event asks for at least M_u kept indices and gaps of at most J
    between the first M_u + 1 of them. On the good event Y^{k_i} is joined
    to Y^{k_{i+1}} through Z^{k_i, k_{i+1} - k_i} for i < M_u, and the
    vacant set of the result on [0, u n] is returned.

    Args:
        q: Override for the drop probability (default prm.q_sprinkle)

    Raises:
        InsufficientSegmentsError: If the bundle lacks the segments or bridges needed
    """
    if u <= 0:
        raise ValidationError(f"level must be positive, got {u}")
    q = prm.q_sprinkle if q is None else q
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"drop probability {q} not in [0,1]")
    if bundle.longrange is None:
        raise ValidationError("bundle has no long-range bridges")

    total = prm.count_for(prm.u_n, "ceil")
    needed = prm.count_for(u, "ceil")
    if bundle.count < total + prm.J:
        raise InsufficientSegmentsError(
            f"sprinkling needs {total + prm.J} segments, bundle has {bundle.count}"
        )

    dropped = rng.random(total) < q
    kept = np.flatnonzero(~dropped).tolist()
    extended = kept + [total]
    good = len(kept) >= needed and all(
        extended[i + 1] - extended[i] <= prm.J for i in range(needed)
    )
    if not good:
        logger.debug("sprinkling off the good event: kept %d of %d, need %d", len(kept), total, needed)
        return SprinkleResult(config=None, good_event=False, kept_count=len(kept), kept_indices=kept)

    pieces: List[Trajectory] = []
    for i in range(needed):
        k, gap = extended[i], extended[i + 1] - extended[i]
        pieces.append(bundle.segments[k])
        pieces.append(bundle.longrange[(k, gap)])
    traj = _concatenate_pieces(pieces)
    visited = range_of(traj, 0.0, min(u * g.n, traj.horizon))
    config = VacantConfig(bits=~visited.bits, provenance=Provenance.SPRINKLED, u_level=u)
    return SprinkleResult(
        config=config, good_event=True, kept_count=len(kept), kept_indices=kept, trajectory=traj
    )


def radon_nikodym_check(
    g: RegularGraph,
    u: float,
    replicas: int,
    rng: np.random.Generator,
    gamma: float = 0.5,
    ell: Optional[float] = None,
    z: float = 3.0,
) -> RadonNikodymReport:
    """
    Compare per-vertex vacancy frequencies of the walk and the concatenation.

    Each replica draws one walk on [0, u n] and one concatenation of
    ceil(u n/(L+ell)) + 1 segments cut to [0, u n]. A vertex is flagged
    when the two frequencies differ by more than z pooled standard errors
    sqrt(2 p (1-p) / replicas).
    """
    if replicas < 0:
        raise ValidationError(f"replica count must be nonnegative, got {replicas}")
    if replicas == 0:
        empty = np.zeros(0)
        return RadonNikodymReport(0, empty, empty, 0.0, [], z)
    horizon = u * g.n
    L = g.n**gamma
    ell = math.log(g.n) ** 2 if ell is None else ell
    count = int(math.ceil(horizon / (L + ell))) + 1

    walk_counts = np.zeros(g.n)
    concat_counts = np.zeros(g.n)
    for _ in range(replicas):
        walk = sample_walk(g, None, horizon, rng)
        walk_counts += vacant_set(g, walk, u).bits
        bundle = attach_bridges(g, sample_segments(g, count, L, rng, ell), ell, rng)
        joined = concatenate(bundle)
        concat_counts += ~range_of(joined, 0.0, horizon).bits

    p_walk = walk_counts / replicas
    p_concat = concat_counts / replicas
    diff = np.abs(p_walk - p_concat)
    pooled = (p_walk + p_concat) / 2
    se = np.sqrt(2 * pooled * (1 - pooled) / replicas)
    flagged = np.flatnonzero(diff > z * se).tolist()
    if flagged:
        logger.info("radon-nikodym check flagged %d of %d vertices", len(flagged), g.n)
    return RadonNikodymReport(
        replicas=replicas,
        walk_frequencies=p_walk,
        concat_frequencies=p_concat,
        max_difference=float(diff.max()),
        flagged_vertices=flagged,
        z=z,
    )
