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
Bounds command for lacuna.

Checks the exact potential-theory inequalities on random connected sets:
the Dirichlet-form bounds on 1/E[H_A], the variational identity, the
quasi-stationary sandwiches and the boundary hitting probability.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import click
import numpy as np

from ..exceptions import BoundViolation, ValidationError
from ..graph import ball_tree_excess, distances_from_set, sample_connected_set, spectral_gap
from ..models import ExperimentConfig, RegularGraph, VerificationRecord, VertexSet
from ..options import (
    emit,
    experiment_options,
    format_option,
    graph_option,
    guarded,
    load_command_config,
    obtain_graph,
)
from ..potential import (
    eratio_profile,
    eratio_slope,
    variational_identity_check,
    verify_boundary_hitting,
    verify_EH_bounds,
    verify_quasi_stationary,
)
from ..reporter import VerificationReporter
from ..utils import ld, make_rng

logger = logging.getLogger(__name__)


def _far_set(g: RegularGraph, A: VertexSet) -> Optional[VertexSet]:
    """Vertices at distance >= 2 from A, or >= 1 when that is empty."""
    dist = distances_from_set(g, A)
    for cut in (2, 1):
        far = dist >= cut
        if far.any():
            return VertexSet(far)
    return None


def _boundary_records(g: RegularGraph, r: int = 1, s: int = 2) -> List[VerificationRecord]:
    for wanted in (0, 1):
        for x in range(g.n):
            if ball_tree_excess(g, x, r + s) == wanted:
                return [verify_boundary_hitting(g, x, r, s).record]
    logger.info("no ball of radius %d with tree excess at most 1", r + s)
    return []


def fixture_records(
    g: RegularGraph, rng: np.random.Generator, gap: float, max_size: int
) -> List[VerificationRecord]:
    """All exact bounds for one random connected set A."""
    A = sample_connected_set(g, int(rng.integers(1, max_size + 1)), rng)
    C = _far_set(g, A)
    if C is None:
        return []
    records = verify_EH_bounds(g, A, C)
    records.append(variational_identity_check(g, A))
    try:
        records.extend(verify_quasi_stationary(g, A, gap=gap))
    except ValidationError as e:
        logger.info("skipping quasi-stationary checks for |A|=%d: %s", len(A), e)
    return records


def run_bounds(
    config: ExperimentConfig, graph_path: Optional[str] = None
) -> Tuple[List[VerificationRecord], Dict[str, Any]]:
    """
    Records over --replicas sets on the graph of every seed.

    Returns:
        (records, data) where data holds the fixture count and the
        decay slope of sup |E_y H_A / E H_A - 1| on the first fixture
    """
    records: List[VerificationRecord] = []
    slopes = []
    seeds = [config.seed] if graph_path else config.seeds
    for seed in seeds:
        g = obtain_graph(config, graph_path, seed)
        gap = spectral_gap(g)
        max_size = max(1, int(math.ceil(ld(g.n, g.d))))
        for k in range(config.replicas):
            records.extend(fixture_records(g, make_rng([seed, 7, k]), gap, max_size))
        records.extend(_boundary_records(g))
        A = sample_connected_set(g, max_size, make_rng([seed, 8]))
        try:
            slopes.append(eratio_slope(eratio_profile(g, A, 6)))
        except ValidationError:
            logger.info("seed %d: eratio profile too short for a slope", seed)
    data = {
        "graphs": len(seeds),
        "fixtures": len(seeds) * config.replicas,
        "eratio_slopes": slopes,
    }
    return records, data


@click.command()
@experiment_options
@graph_option
@format_option
@guarded
def bounds(graph_path: Optional[str], output_format: str, **flags):
    """
    Check exact hitting-time and quasi-stationary bounds.

    For every seed a graph is generated (or --graph is read) and --replicas
    random connected sets A of size up to ld n are drawn. Every inequality
    must hold exactly up to float slack.

    Examples:

        lacuna bounds --n 512 --d 3 --seeds 5 --replicas 10

        lacuna bounds --graph g.txt --replicas 50 --format text
    """
    config = load_command_config("bounds", **flags)
    records, data = run_bounds(config, graph_path)
    reporter = VerificationReporter()
    emit(reporter.generate_report(records, output_format, "Potential Bounds", data), config.out)
    if reporter.status(records) == "fail":
        raise BoundViolation("an exact bound failed")


if __name__ == "__main__":
    bounds()  # pylint: disable=no-value-for-parameter
