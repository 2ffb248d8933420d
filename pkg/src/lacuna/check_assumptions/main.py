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
Check-assumptions command for lacuna.

Verifies regularity, the tree-like condition on balls of radius
floor(alpha1 ld n) and the spectral gap of a graph.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import click

from ..exceptions import BoundViolation
from ..graph import check_assumptions, cheeger_check, isoperimetric_profile
from ..models import ExperimentConfig, RegularGraph, VerificationRecord
from ..options import (
    emit,
    experiment_options,
    format_option,
    graph_option,
    guarded,
    load_command_config,
    obtain_graph,
)
from ..reporter import VerificationReporter
from ..utils import make_rng

logger = logging.getLogger(__name__)


def run_check_assumptions(
    g: RegularGraph, config: ExperimentConfig, profile_samples: int = 0
) -> Tuple[List[VerificationRecord], Dict[str, Any]]:
    """
    Assumption records for `g`.

    A2 is asserted only when alpha2 is configured; otherwise the gap is
    reported as a measurement.

    Returns:
        (records, data) for the reporter
    """
    report = check_assumptions(g, config.alpha1, config.alpha2)
    inputs = {"n": g.n, "d": g.d}
    records = [
        VerificationRecord("A0_regular", inputs, g.d, g.d, report.a0_ok),
        VerificationRecord(
            "A1_treelike",
            {**inputs, "radius": report.a1_radius, "alpha1": config.alpha1},
            len(report.a1_violations),
            0,
            report.a1_ok,
            "balls with tree excess above 1" if report.a1_violations else "",
        ),
    ]
    if config.alpha2 is not None:
        records.append(
            VerificationRecord("A2_gap", inputs, config.alpha2, report.spectral_gap,
                               report.a2_ok())
        )
    else:
        records.append(
            VerificationRecord("A2_gap", inputs, 0.0, report.spectral_gap, None,
                               "no alpha2 given")
        )
    if profile_samples > 0:
        profile = isoperimetric_profile(g, profile_samples, make_rng([config.seed, 1]))
        records.append(cheeger_check(g, profile))

    data = {
        "n": g.n,
        "d": g.d,
        "restarts": g.restarts,
        "girth": report.girth,
        "a1_radius": report.a1_radius,
        "a1_violations": report.a1_violations[:20],
        "spectral_gap": report.spectral_gap,
    }
    return records, data


@click.command("check-assumptions")
@experiment_options
@graph_option
@click.option("--alpha1", type=float, help="Tree-like radius factor (default 0.2)")
@click.option("--alpha2", type=float, help="Spectral-gap threshold to assert")
@click.option("--profile-samples", type=int, default=0, show_default=True,
              help="Random connected sets for the Cheeger diagnostic")
@format_option
@guarded
def check_assumptions_command(  # pylint: disable=too-many-arguments,too-many-positional-arguments
    graph_path: Optional[str],
    alpha1: Optional[float],
    alpha2: Optional[float],
    profile_samples: int,
    output_format: str,
    **flags,
):
    """
    Check the regularity, tree-like and spectral-gap assumptions.

    Every ball of radius floor(alpha1 ld n) must contain at most one cycle.
    The spectral gap is 1 - lambda_2 of the transition operator.

    Examples:

        lacuna check-assumptions --n 10000 --d 3 --seed 1

        lacuna check-assumptions --graph g.txt --alpha2 0.01 --format text
    """
    config = load_command_config("check-assumptions", alpha1=alpha1, alpha2=alpha2, **flags)
    g = obtain_graph(config, graph_path)
    records, data = run_check_assumptions(g, config, profile_samples)
    reporter = VerificationReporter()
    emit(reporter.generate_report(records, output_format, "Assumption Check", data), config.out)
    if reporter.status(records) == "fail":
        raise BoundViolation("graph assumptions do not hold")


if __name__ == "__main__":
    check_assumptions_command()  # pylint: disable=no-value-for-parameter
