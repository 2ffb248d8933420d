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
Random regular graph generation and fixture constructions.
"""

import itertools
import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..constants import RESTART_FACTOR
from ..exceptions import GraphGenerationError, ValidationError
from ..models import RegularGraph
from ..utils import SeedLike, make_rng

logger = logging.getLogger(__name__)


def restart_budget(d: int) -> int:
    """Attempts allowed before giving up: 10 * ceil(exp((d^2 - 1) / 4))."""
    return RESTART_FACTOR * math.ceil(math.exp((d * d - 1) / 4.0))


def _pairing_attempt(n: int, d: int, rng: np.random.Generator) -> Optional[np.ndarray]:
    """One configuration-model pairing; None on a loop or a multi-edge."""
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    pairs = stubs[rng.permutation(n * d)].reshape(-1, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    if np.any(lo == hi):
        return None
    keys = lo * n + hi
    if np.unique(keys).size != keys.size:
        return None
    return np.stack([lo, hi], axis=1)


def generate_random_regular(
    n: int, d: int, seed: SeedLike, max_restarts: Optional[int] = None
) -> RegularGraph:
    """
    Sample a simple d-regular graph from the pairing model.

    Any pairing with a loop or multi-edge is discarded and the whole pairing
    is redrawn, so the result is uniform over simple d-regular graphs.

    Args:
        n: Vertex count
        d: Degree, at least 3
        seed: Seed of the generator's stream
        max_restarts: Override of the restart budget

    Returns:
        RegularGraph with the number of restarts recorded

    Raises:
        ValidationError: If n*d is odd, d < 3 or n <= d
        GraphGenerationError: If the restart budget is exhausted
    """
    if d < 3:
        raise ValidationError(f"degree must be at least 3, got {d}")
    if n <= d:
        raise ValidationError(f"need n > d, got n={n}, d={d}")
    if (n * d) % 2:
        raise ValidationError(f"n*d must be even, got n={n}, d={d}")

    rng = make_rng(seed)
    budget = restart_budget(d) if max_restarts is None else max_restarts
    for attempt in range(budget + 1):
        edges = _pairing_attempt(n, d, rng)
        if edges is not None:
            logger.debug("pairing accepted after %d restarts (n=%d, d=%d)", attempt, n, d)
            return RegularGraph.from_edges(n, d, edges, restarts=attempt)
    raise GraphGenerationError(f"no simple pairing for n={n}, d={d} after {budget} restarts")


def complete_graph(k: int) -> RegularGraph:
    """K_k as a (k-1)-regular graph."""
    return RegularGraph.from_edges(k, k - 1, itertools.combinations(range(k), 2))


def join_with_bottleneck(
    g1: RegularGraph, g2: RegularGraph, e1: Tuple[int, int], e2: Tuple[int, int]
) -> RegularGraph:
    """
    Join two graphs through a two-edge bottleneck.

    Removes e1 = {x, y} from g1 and e2 = {x', y'} from g2, then adds {x, x'}
    and {y, y'}. Vertices of g2 are shifted by g1.n.

    Raises:
        ValidationError: If the degrees differ or e1, e2 are not edges
    """
    if g1.d != g2.d:
        raise ValidationError(f"degrees differ: {g1.d} and {g2.d}")
    x, y = e1
    x2, y2 = e2
    if not g1.has_edge(x, y):
        raise ValidationError(f"{e1} is not an edge of the first graph")
    if not g2.has_edge(x2, y2):
        raise ValidationError(f"{e2} is not an edge of the second graph")

    def keep(edges: np.ndarray, drop: Tuple[int, int]) -> np.ndarray:
        lo, hi = min(drop), max(drop)
        mask = ~((edges[:, 0] == lo) & (edges[:, 1] == hi))
        return edges[mask]

    shift = g1.n
    edges = np.concatenate(
        [
            keep(g1.edges(), e1),
            keep(g2.edges(), e2) + shift,
            np.array([[x, x2 + shift], [y, y2 + shift]], dtype=np.int64),
        ]
    )
    return RegularGraph.from_edges(g1.n + g2.n, g1.d, edges)
