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
Census command for lacuna.

Classifies every vertex of a vacant configuration as small, proper or bad
and counts the vertices in mesoscopic components.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import click

from ..constants import (
    BAD_FRACTION_MAX,
    CENSUS_C1,
    DESK_BETA,
    DESK_TREE_FACTOR,
    PROPER_H,
    pilot_threshold,
)
from ..exceptions import BoundViolation
from ..models import ExperimentConfig, RegularGraph, VerificationRecord, VertexClass
from ..options import (
    emit,
    experiment_options,
    format_option,
    graph_option,
    guarded,
    load_command_config,
    near_critical,
    obtain_graph,
    single_level,
)
from ..reporter import VerificationReporter
from ..utils import make_rng
from ..vacancy import (
    classification_census,
    classify_params,
    classify_vertex,
    components,
    mesoscopic_census,
    string_congestion,
)
from ..walk import sample_walk, vacant_set

logger = logging.getLogger(__name__)


def run_census(
    g: RegularGraph, config: ExperimentConfig, h: float = PROPER_H
) -> Tuple[List[VerificationRecord], Dict[str, Any]]:
    """
    Classification and mesoscopic census of the walk's vacant set at level u.

    The mesoscopic threshold is the proper threshold h n^(v_+ beta). Both
    fractions are asserted only at calibrated (d, u) points.

    Raises:
        ValidationError: If u(1+eps) is not below u*
    """
    u = single_level(config)
    beta = DESK_BETA if config.beta is None else config.beta
    prm = classify_params(g.n, g.d, u, beta=beta, h=h, tree_factor=DESK_TREE_FACTOR,
                          alpha1=config.alpha1)
    traj = sample_walk(g, None, u * g.n, make_rng([config.seed, 10]))
    xi = vacant_set(g, traj, u)
    counts = classification_census(g, xi, prm)
    summary = components(g, xi)
    threshold = prm.proper_threshold
    census = mesoscopic_census(g, xi, threshold, summary)

    proper = next((x for x in range(g.n) if classify_vertex(g, xi, x, prm) is VertexClass.PROPER), None)
    congestion = string_congestion(g, xi, proper, prm.l1) if proper is not None else 0

    inputs = {"n": g.n, "d": g.d, "u": u, "beta": beta, "epsilon": prm.epsilon}
    bad_fraction = counts[VertexClass.BAD] / g.n
    census_fraction = census / g.n
    records = []
    c1 = pilot_threshold(CENSUS_C1, g.d, u)
    bad_max = pilot_threshold(BAD_FRACTION_MAX, g.d, u)
    calibrated = not near_critical(g.d, u)
    records.append(
        VerificationRecord(
            "mesoscopic_fraction", {**inputs, "threshold": threshold},
            0.0 if c1 is None else c1, census_fraction,
            census_fraction >= c1 if c1 is not None and calibrated else None,
        )
    )
    records.append(
        VerificationRecord(
            "bad_fraction", inputs, bad_fraction,
            1.0 if bad_max is None else bad_max,
            bad_fraction <= bad_max if bad_max is not None and calibrated else None,
        )
    )
    data = {
        "small": counts[VertexClass.SMALL],
        "proper": counts[VertexClass.PROPER],
        "bad": counts[VertexClass.BAD],
        "l0": prm.l0,
        "l1": prm.l1,
        "tree_radius": prm.tree_radius,
        "proper_threshold": threshold,
        "mesoscopic_census": census,
        "c_max": summary.c_max_size,
        "string_congestion": congestion,
    }
    logger.info("census at u=%g: %s", u, data)
    return records, data


@click.command()
@experiment_options
@graph_option
@click.option("--beta", type=float, help="Scale factor of l1 (default 0.25 at desk scale)")
@click.option("--h", "h", type=float, default=PROPER_H, show_default=True,
              help="Proper-vertex constant")
@format_option
@guarded
def census(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    graph_path: Optional[str],
    beta: Optional[float],
    h: float,
    output_format: str,
    **flags,
):
    """
    Classify vertices and count mesoscopic vacant components.

    A vertex is small when its cluster fits in a ball of radius l1 with at
    most (ld n)^2 vertices, proper when its cluster reaches distance l1
    with enough vertices and stays tame at smaller scales, and bad
    otherwise.

    Examples:

        lacuna census --n 16384 --d 3 --u 2

        lacuna census --graph g.txt --u 1 --beta 0.3 --format text
    """
    config = load_command_config("census", beta=beta, **flags)
    g = obtain_graph(config, graph_path)
    records, data = run_census(g, config, h)
    reporter = VerificationReporter()
    emit(reporter.generate_report(records, output_format, "Vertex Census", data), config.out)
    if reporter.status(records) == "fail":
        raise BoundViolation("census outside calibrated thresholds")


if __name__ == "__main__":
    census()  # pylint: disable=no-value-for-parameter
