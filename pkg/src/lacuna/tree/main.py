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
Tree command for lacuna.

Tabulates the interlacement parameters of the d-regular tree over a
u-grid.
"""

from typing import Dict, List

import click

from ..interlace import extinction_probability, generation_survival, params
from ..models import ExperimentConfig
from ..options import emit, experiment_options, guarded, load_command_config
from ..reporter import format_tree_csv


def run_tree(config: ExperimentConfig, depth: int) -> List[Dict[str, float]]:
    """One row per u: p_u, m_u, v_u, the extinction probability and P[Z_depth > 0]."""
    rows = []
    for u in config.u_grid:
        prm = params(config.d, u)
        rows.append(
            {
                "u": u,
                "p_u": prm.p_u,
                "m_u": prm.m_u,
                "v_u": prm.v_u,
                "q_ext": extinction_probability(config.d, u),
                "survival_r": generation_survival(config.d, u, depth),
            }
        )
    return rows


@click.command()
@experiment_options
@click.option("--depth", "-r", type=int, default=10, show_default=True,
              help="Generation for the survival column")
@guarded
def tree(depth: int, **flags):
    """
    Tabulate branching parameters of the vacant cluster on the tree.

    Columns: u, p_u = exp(-u f_other), m_u = (d-1) p_u, v_u, the extinction
    probability and the probability that generation r is nonempty.

    Examples:

        lacuna tree --d 3 --u 0:8:0.5

        lacuna tree --d 4 --u 1,3.29,5 --depth 20 --out tree.csv
    """
    config = load_command_config("tree", **flags)
    emit(format_tree_csv(run_tree(config, depth)), config.out)


if __name__ == "__main__":
    tree()  # pylint: disable=no-value-for-parameter
