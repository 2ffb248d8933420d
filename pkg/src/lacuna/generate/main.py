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
Generate command for lacuna.

Samples a simple d-regular graph from the pairing model and writes it in
the graph text format.
"""

import logging
from typing import Optional

import click

from ..graph import format_graph, generate_random_regular
from ..models import ExperimentConfig, RegularGraph
from ..options import emit, experiment_options, guarded, load_command_config

logger = logging.getLogger(__name__)


def run_generate(config: ExperimentConfig, max_restarts: Optional[int] = None) -> RegularGraph:
    """Generate the graph described by `config`."""
    g = generate_random_regular(config.n, config.d, config.seed, max_restarts=max_restarts)
    logger.info("generated n=%d d=%d seed=%d after %d restarts", g.n, g.d, config.seed, g.restarts)
    return g


@click.command()
@experiment_options
@click.option("--max-restarts", type=int, help="Override the pairing restart budget")
@guarded
def generate(max_restarts: Optional[int], **flags):
    """
    Generate a random d-regular graph.

    Pairs n*d half-edges uniformly and restarts on any loop or multi-edge,
    so the result is uniform over simple d-regular graphs. The number of
    restarts is reported on stderr.

    Examples:

        lacuna generate --n 1024 --d 3 --seed 7 --out g.txt

        lacuna generate --n 4 --d 3
    """
    config = load_command_config("generate", **flags)
    g = run_generate(config, max_restarts)
    emit(format_graph(g), config.out)
    click.echo(f"✓ n={g.n} d={g.d} seed={config.seed} restarts={g.restarts}", err=True)


if __name__ == "__main__":
    generate()  # pylint: disable=no-value-for-parameter
