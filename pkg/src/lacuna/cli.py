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
Command-line interface for lacuna.
"""

import logging

import click
from .generate.main import generate
from .check_assumptions.main import check_assumptions_command
from .sweep.main import sweep
from .compare_local.main import compare_local
from .rates.main import rates
from .uniqueness.main import uniqueness
from .tree.main import tree
from .bridge_test.main import bridge_test
from .bounds.main import bounds
from .explore.main import explore
from .census.main import census
from .options import EXIT_ERROR


class LacunaGroup(click.Group):
    """Command group whose usage errors exit with status 1."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise


@click.group(cls=LacunaGroup)
@click.version_option(version="0.1.0", prog_name="lacuna")
@click.option("--debug", is_flag=True, help="Enable debug mode")
@click.pass_context
def main(ctx, debug):
    """lacuna: vacant sets of random walks on random regular graphs."""
    ctx.ensure_object(dict)
    ctx.obj["debug"] = debug
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


# Add subcommands
main.add_command(generate)
main.add_command(check_assumptions_command)
main.add_command(sweep)
main.add_command(compare_local)
main.add_command(rates)
main.add_command(uniqueness)
main.add_command(tree)
main.add_command(bridge_test)
main.add_command(bounds)
main.add_command(explore)
main.add_command(census)


if __name__ == "__main__":
    main()
