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
Shared command-line options and helpers for experiment subcommands.
"""

import functools
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Callable, Optional

import click

from .config import load_experiment_config, parse_seeds, parse_u_grid
from .constants import NEAR_CRITICAL_WINDOW
from .exceptions import BoundViolation, ConfigError, LacunaError, ValidationError
from .graph import generate_random_regular, read_graph
from .interlace import u_star
from .models import ExperimentConfig

logger = logging.getLogger(__name__)

# exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ASSERTION = 2
EXIT_CANCELLED = 130

_EXPERIMENT_OPTIONS = [
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                 help="Experiment config file (key = value lines)"),
    click.option("--n", "n", type=int, help="Number of vertices"),
    click.option("--d", "d", type=int, help="Degree"),
    click.option("--u", "u", help="Level grid: comma list or start:stop:step"),
    click.option("--seeds", help="Seeds: a count, a list or ranges (e.g. 0-19,25)"),
    click.option("--replicas", type=int, help="Replicas per configuration"),
    click.option("--gamma", type=float, help="Segment exponent override (L = n^gamma)"),
    click.option("--delta", type=float, help="Sprinkling exponent override"),
    click.option("--out", type=click.Path(dir_okay=False), help="Output file (default stdout)"),
    click.option("--threads", type=int, help="Worker threads for replicas"),
    click.option("--seed", type=int, help="Base seed"),
]


def experiment_options(func: Callable) -> Callable:
    """Attach the flags shared by every experiment subcommand."""
    for option in reversed(_EXPERIMENT_OPTIONS):
        func = option(func)
    return func


def load_command_config(
    command: str, config_path: Optional[str] = None, **flags: Any
) -> ExperimentConfig:
    """
    Merge a config file with command-line flags.

    Args:
        command: Subcommand name stored in the config
        config_path: Optional config file
        **flags: Values of the shared flags; None means not given

    Raises:
        ConfigError: If the file or a flag value is invalid
    """
    overrides = {k: v for k, v in flags.items() if k not in ("u", "seeds")}
    try:
        if flags.get("u") is not None:
            overrides["u_grid"] = parse_u_grid(flags["u"])
        if flags.get("seeds") is not None:
            overrides["seeds"] = parse_seeds(flags["seeds"])
    except ValueError as e:
        raise ConfigError(f"malformed flag value: {e}") from e
    overrides["command"] = command
    config = load_experiment_config(config_path, overrides)
    logger.debug("config for %s: %s", command, config)
    return config


def single_level(config: ExperimentConfig) -> float:
    """The one u of a single-level command."""
    if len(config.u_grid) != 1:
        raise ValidationError(f"{config.command} takes exactly one u, got {config.u_grid}")
    return config.u_grid[0]


def near_critical(d: int, u: float) -> bool:
    """True when u lies within the excluded window around u*."""
    return abs(u - u_star(d)) < NEAR_CRITICAL_WINDOW


def emit(text: str, out: Optional[str] = None):
    """Write `text` to `out`, or to stdout when no path is given."""
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


def format_option(func: Callable) -> Callable:
    """--format for report-producing commands."""
    return click.option(
        "--format",
        "output_format",
        type=click.Choice(["text", "json", "yaml"]),
        default="json",
        help="Report format",
    )(func)


def debug_enabled() -> bool:
    """Whether the group was started with --debug."""
    ctx = click.get_current_context(silent=True)
    while ctx is not None:
        if isinstance(ctx.obj, dict) and ctx.obj.get("debug"):
            return True
        ctx = ctx.parent
    return False


def guarded(func: Callable) -> Callable:
    """Map lacuna errors raised by a command body onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except BoundViolation as e:
            click.echo(f"Assertion failed: {e}", err=True)
            sys.exit(EXIT_ASSERTION)
        except ConfigError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_ERROR)
        except LacunaError as e:
            click.echo(f"Error: {e}", err=True)
            if debug_enabled():
                traceback.print_exc()
            sys.exit(EXIT_ERROR)
        except KeyboardInterrupt:
            click.echo("\nOperation cancelled", err=True)
            sys.exit(EXIT_CANCELLED)
        except OSError as e:
            click.echo(f"Unexpected error: {e}", err=True)
            if debug_enabled():
                traceback.print_exc()
            sys.exit(EXIT_ERROR)

    return wrapper


def graph_option(func: Callable) -> Callable:
    """--graph for commands that can read a graph instead of generating one."""
    return click.option(
        "--graph",
        "graph_path",
        type=click.Path(exists=True, dir_okay=False),
        help="Graph file to use instead of generating one from --n, --d and --seed",
    )(func)


def obtain_graph(config: ExperimentConfig, graph_path: Optional[str] = None, seed: Optional[int] = None):
    """Read `graph_path`, or generate a graph from the config (seed defaults to config.seed)."""
    if graph_path:
        return read_graph(graph_path)
    return generate_random_regular(config.n, config.d, config.seed if seed is None else seed)
