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
Utility functions for lacuna: logarithms, random streams and replica runs.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar, Union

import numpy as np
from scipy import stats

from .constants import POISSON_SIGMAS, POISSON_TAIL
from .exceptions import ValidationError

logger = logging.getLogger(__name__)

SeedLike = Union[int, Sequence[int], np.random.SeedSequence]
T = TypeVar("T")


def ld(x: float, d: int) -> float:
    """Logarithm in base d-1."""
    if d < 3:
        raise ValidationError(f"degree must be at least 3, got {d}")
    return math.log(x) / math.log(d - 1)


def make_rng(seed: SeedLike) -> np.random.Generator:
    """
    Create a counter-based random stream.

    Args:
        seed: Integer seed, a list of integers addressing a sub-stream, or a SeedSequence

    Returns:
        Philox-backed Generator
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def spawn_rngs(seed: SeedLike, count: int) -> List[np.random.Generator]:
    """Split one seed into `count` independent streams."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in seed.spawn(count)]


def poisson_cutoff(mean: float, tail: float = POISSON_TAIL) -> int:
    """
    Largest jump count kept when truncating a Poisson(mean) law.

    The cutoff is at least mean + 12 sqrt(mean) and at least the point
    where the upper tail drops below `tail`.
    """
    if mean < 0:
        raise ValidationError(f"Poisson mean must be nonnegative, got {mean}")
    if mean == 0:
        return 0
    sigma_cut = math.ceil(mean + POISSON_SIGMAS * math.sqrt(mean))
    tail_cut = int(stats.poisson.isf(tail, mean)) + 1
    return max(sigma_cut, tail_cut)


def run_replicas(fn: Callable[[int], T], seeds: Iterable[int], threads: int = 1) -> List[T]:
    """
    Run `fn(seed)` for each seed and return results in ascending seed order.

    Results do not depend on the thread count: each replica draws from its
    own stream and the reduction order is fixed by the seed.
    """
    ordered = sorted(set(seeds))
    if threads <= 1 or len(ordered) <= 1:
        return [fn(seed) for seed in ordered]
    logger.debug("running %d replicas on %d threads", len(ordered), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, ordered))


def tv_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Total variation distance of two laws on 0..k, padding the shorter with zeros."""
    a = np.asarray(p, dtype=float)
    b = np.asarray(q, dtype=float)
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    return 0.5 * float(np.abs(a - b).sum())
