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
Explore command for lacuna.

Runs the instrumented breadth-first exploration of vacant clusters in the
configuration of a segment bundle and reports the queue drift.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import click

from ..constants import DESK_GAMMA, NEAR_CRITICAL_WINDOW, drift_min_frequency
from ..exceptions import BoundViolation
from ..interlace import u_star
from ..models import ExperimentConfig, ExplorationTrace, RegularGraph, VerificationRecord
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
from ..pim import sample_segments
from ..reporter import VerificationReporter, format_trace_csv
from ..utils import make_rng
from ..vacancy import bfs_explore_instrumented, capped_future_radius, drift_statistics

logger = logging.getLogger(__name__)


def run_explore(
    g: RegularGraph, config: ExperimentConfig
) -> Tuple[List[VerificationRecord], Dict[str, Any], List[ExplorationTrace]]:
    """
    Explorations from --replicas uniform start vertices.

    The bundle holds floor (or ceil, per variant) u n/(L+ell) segments of
    length L = n^gamma. Dropping the bridges leaves the segments covering
    time u_eff n with u_eff = count L / n. The down-step frequency is
    asserted against (d-2)/(d-1) only when u_eff clears u* by the
    near-critical window; a requested u above u* whose u_eff does not is
    logged as a warning. The future radius is config.r or
    capped_future_radius(n, d).
    """
    u = single_level(config)
    gamma = DESK_GAMMA if config.gamma is None else config.gamma
    L = g.n**gamma
    ell = math.log(g.n) ** 2 if config.ell is None else config.ell
    exact = u * g.n / (L + ell)
    count = int(math.floor(exact) if config.variant == "floor" else math.ceil(exact))
    rng = make_rng([config.seed, 9])
    bundle = sample_segments(g, count, L, rng, ell)
    starts = rng.integers(g.n, size=config.replicas).tolist()
    r = capped_future_radius(g.n, g.d, config.alpha1) if config.r is None else config.r
    traces = [bfs_explore_instrumented(g, bundle, x, config.K, r=r) for x in starts]
    stats = drift_statistics(traces)

    u_eff = count * L / g.n
    threshold = drift_min_frequency(g.d)
    critical = u_star(g.d) + NEAR_CRITICAL_WINDOW
    if stats["proper_steps"] == 0:
        note = "no proper steps; measured only"
    elif u_eff < critical:
        note = f"u_eff = {u_eff:.3f} not subcritical; measured only"
        if u >= critical:
            logger.warning(
                "explore at u=%g covers only u_eff=%.3f with gamma=%g; raise gamma to assert the drift",
                u, u_eff, gamma,
            )
    else:
        note = ""
    asserted = not note
    inputs = {"n": g.n, "d": g.d, "u": u, "u_eff": u_eff, "r": r, "segments": count}
    frequency = stats["down_frequency"]
    records = [
        VerificationRecord(
            "down_step_frequency", inputs, threshold, frequency,
            frequency >= threshold if asserted else None, note,
        )
    ]
    data = {**stats, "L": L, "ell": ell, "u": u, "u_eff": u_eff, "r": r}
    return records, data, traces


@click.command()
@experiment_options
@graph_option
@click.option("--ell", type=float, help="Bridge length used in the segment count (default (ln n)^2)")
@click.option("--K", "K", type=float, help="Stop after K ld n explored-vacant vertices (default 4)")
@click.option("--r", "r", type=int, help="Future-set radius (default max(7 ld ld n, 2) capped at floor(alpha1 ld n))")
@click.option("--trace-out", type=click.Path(dir_okay=False), help="Write the step trace CSV here")
@format_option
@guarded
def explore(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    graph_path: Optional[str],
    ell: Optional[float],
    K: Optional[float],
    r: Optional[int],
    trace_out: Optional[str],
    output_format: str,
    **flags,
):
    """
    Explore vacant clusters and measure the queue drift.

    Each step pops a vertex; an occupied vertex shrinks the queue by one and
    a vacant one adds its unexplored neighbours. Steps whose future is
    proper enter the down-step frequency.

    Examples:

        lacuna explore --n 16384 --d 3 --u 10 --replicas 1000

        lacuna explore --u 6 --gamma 0.6 --trace-out trace.csv --format text
    """
    config = load_command_config("explore", ell=ell, K=K, r=r, **flags)
    g = obtain_graph(config, graph_path)
    records, data, traces = run_explore(g, config)
    if trace_out:
        emit(format_trace_csv(traces), trace_out)
    reporter = VerificationReporter()
    emit(reporter.generate_report(records, output_format, "Exploration Drift", data), config.out)
    if reporter.status(records) == "fail":
        raise BoundViolation("down-step frequency below the subcritical drift")


if __name__ == "__main__":
    explore()  # pylint: disable=no-value-for-parameter
