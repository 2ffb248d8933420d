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
Bridge-test command for lacuna.

Checks the bridge endpoints, the jump counts of a segment bundle and the
per-vertex vacancy frequencies of the walk against the concatenation of
segments and bridges.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import click

from ..constants import DESK_GAMMA, JUMP_FLAG_RATE_MAX, JUMP_MIN_SEGMENT_LENGTH
from ..exceptions import BoundViolation
from ..models import ExperimentConfig, RegularGraph, VerificationRecord
from ..options import (
    emit,
    experiment_options,
    format_option,
    graph_option,
    guarded,
    load_command_config,
    obtain_graph,
    single_level,
)
from ..pim import attach_bridges, radon_nikodym_check, sample_segments
from ..reporter import VerificationReporter
from ..utils import make_rng
from ..walk import jump_stats

logger = logging.getLogger(__name__)


def run_bridge_test(
    g: RegularGraph, config: ExperimentConfig, z: float = 3.0
) -> Tuple[List[VerificationRecord], Dict[str, Any]]:
    """
    Bridge, jump-count and vacancy-frequency records at level u.

    Bridge endpoints are exact and always asserted. The segment flag rate
    is asserted only for L >= JUMP_MIN_SEGMENT_LENGTH. The vacancy
    frequency comparison is reported as a measurement.
    """
    u = single_level(config)
    gamma = DESK_GAMMA if config.gamma is None else config.gamma
    L = g.n**gamma
    ell = math.log(g.n) ** 2 if config.ell is None else config.ell
    count = int(math.ceil(u * g.n / (L + ell))) + 1
    rng = make_rng([config.seed, 5])

    bundle = attach_bridges(g, sample_segments(g, count, L, rng, ell), ell, rng)
    endpoint_misses = sum(
        bridge.end != right.start or bridge.start != left.end
        for bridge, left, right in zip(bundle.bridges, bundle.segments, bundle.segments[1:])
    )
    stats = jump_stats(bundle.segments, bundle.bridges)
    inputs = {"n": g.n, "d": g.d, "u": u, "L": L, "ell": ell, "segments": count}
    records = [
        VerificationRecord("bridge_endpoints", inputs, endpoint_misses, 0, endpoint_misses == 0),
        VerificationRecord(
            "segment_flag_rate", inputs, stats.segment_flag_rate, JUMP_FLAG_RATE_MAX,
            stats.segment_flag_rate <= JUMP_FLAG_RATE_MAX if L >= JUMP_MIN_SEGMENT_LENGTH else None,
            "" if L >= JUMP_MIN_SEGMENT_LENGTH else "segments too short; measured only",
        ),
        VerificationRecord(
            "bridge_jump_total", inputs, stats.total_bridge_jumps, stats.total_bridge_bound,
            None, f"{len(stats.flagged_bridges)} bridges above ln^3 n jumps",
        ),
    ]

    radon = radon_nikodym_check(g, u, config.replicas, make_rng([config.seed, 6]),
                                gamma=gamma, ell=ell, z=z)
    records.append(
        VerificationRecord(
            "vacancy_frequencies", {**inputs, "replicas": radon.replicas, "z": z},
            radon.max_difference, float(len(radon.flagged_vertices)), None,
            f"{len(radon.flagged_vertices)} vertices beyond {z} standard errors",
        )
    )
    data = {
        "segment_jumps_min": min(stats.segment_counts, default=0),
        "segment_jumps_max": max(stats.segment_counts, default=0),
        "bridge_jumps_max": max(stats.bridge_counts, default=0),
        "flagged_vertices": radon.flagged_vertices[:20],
    }
    return records, data


@click.command("bridge-test")
@experiment_options
@graph_option
@click.option("--ell", type=float, help="Bridge length (default (ln n)^2)")
@click.option("--z", type=float, default=3.0, show_default=True,
              help="Standard errors before a vertex is flagged")
@format_option
@guarded
def bridge_test(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    graph_path: Optional[str],
    ell: Optional[float],
    z: float,
    output_format: str,
    **flags,
):
    """
    Test bridges and the concatenated walk.

    Samples ceil(u n/(L+ell)) + 1 segments of length L = n^gamma with
    bridges between them, checks endpoints and jump counts, then compares
    per-vertex vacancy frequencies of --replicas walks and concatenations.

    Examples:

        lacuna bridge-test --n 1024 --u 1 --gamma 0.5 --replicas 10000

        lacuna bridge-test --n 4096 --u 1 --gamma 0.45 --format text
    """
    config = load_command_config("bridge-test", ell=ell, **flags)
    g = obtain_graph(config, graph_path)
    records, data = run_bridge_test(g, config, z)
    reporter = VerificationReporter()
    emit(reporter.generate_report(records, output_format, "Bridge Test", data), config.out)
    if reporter.status(records) == "fail":
        raise BoundViolation("bridge checks failed")


if __name__ == "__main__":
    bridge_test()  # pylint: disable=no-value-for-parameter
