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
Sweep command for lacuna.

For every seed a graph and one walk on [0, u_max n] are sampled; the
vacant set at each u of the grid is read off the same walk, so the rows of
one seed are monotone in u.
"""

import functools
import logging
import math
import time
from typing import List, Optional

import click

from ..constants import (
    GIANT_FRACTION_MIN,
    GOOD_EVENT_MIN_FREQUENCY,
    SECOND_FRACTION_MAX,
    SUBCRITICAL_LOG_FACTOR,
    pilot_threshold,
)
from ..exceptions import BoundViolation
from ..graph import generate_random_regular
from ..interlace import u_star
from ..models import ExperimentConfig, RegularGraph, SweepRecord, VerificationRecord
from ..options import emit, experiment_options, guarded, load_command_config, near_critical
from ..pim import build_bundle, derive_params, sprinkle
from ..reporter import VerificationReporter, format_sweep_csv
from ..utils import make_rng, run_replicas
from ..vacancy import components
from ..walk import sample_walk, vacant_set

logger = logging.getLogger(__name__)


def _good_event(g: RegularGraph, u: float, config: ExperimentConfig, seed: int) -> Optional[bool]:
    """Good event of a sprinkled bundle at level u, or None outside 0 < u < u*."""
    if not 0 < u < u_star(g.d):
        return None
    prm = derive_params(g.n, u, g.d, delta=config.delta, alpha1=config.alpha1, gamma=config.gamma)
    rng = make_rng([seed, 2, int(round(u * 1e6))])
    bundle = build_bundle(g, prm, rng)
    return sprinkle(g, bundle, u, prm, rng).good_event


def sweep_seed(
    config: ExperimentConfig, seed: int, timing: bool = True, good_event: bool = False
) -> List[SweepRecord]:
    """Rows for one seed, one per u of the grid."""
    if not config.u_grid:
        return []
    g = generate_random_regular(config.n, config.d, seed)
    traj = sample_walk(g, None, max(config.u_grid) * g.n, make_rng([seed, 1]))
    rows = []
    for u in config.u_grid:
        start = time.perf_counter()
        summary = components(g, vacant_set(g, traj, u))
        good = _good_event(g, u, config, seed) if good_event else None
        wall_ms = (time.perf_counter() - start) * 1000 if timing else 0.0
        record = SweepRecord(
            n=g.n,
            d=g.d,
            u=u,
            seed=seed,
            c_max=summary.c_max_size,
            c_sec=summary.c_sec_size,
            vacant_count=summary.vacant_count,
            good_event=good,
            wall_ms=wall_ms,
        )
        record.validate()
        rows.append(record)
    logger.debug("seed %d: %d rows", seed, len(rows))
    return rows


def run_sweep(
    config: ExperimentConfig, timing: bool = True, good_event: bool = False
) -> List[SweepRecord]:
    """All rows, ordered by seed and then by u."""
    per_seed = run_replicas(
        functools.partial(sweep_seed, config, timing=timing, good_event=good_event),
        config.seeds,
        config.threads,
    )
    return [row for rows in per_seed for row in rows]


def sweep_checks(records: List[SweepRecord], config: ExperimentConfig) -> List[VerificationRecord]:
    """
    Phase-transition checks at the calibrated (d, u) points.

    Points within the near-critical window are skipped.
    """
    checks = []
    for u in config.u_grid:
        rows = [r for r in records if r.u == u]
        if not rows:
            continue
        if near_critical(config.d, u):
            logger.info("u=%g lies in the near-critical window; not asserted", u)
            continue
        n = rows[0].n
        inputs = {"n": n, "d": config.d, "u": u, "seeds": len(rows)}

        giant = pilot_threshold(GIANT_FRACTION_MIN, config.d, u)
        if giant is not None:
            worst = min(r.c_max for r in rows) / n
            checks.append(VerificationRecord("giant_fraction", inputs, giant, worst, worst >= giant))

        second = pilot_threshold(SECOND_FRACTION_MAX, config.d, u)
        if second is not None:
            worst = max(r.c_sec for r in rows) / n
            checks.append(VerificationRecord("second_fraction", inputs, worst, second, worst <= second))

        factor = pilot_threshold(SUBCRITICAL_LOG_FACTOR, config.d, u)
        if factor is not None:
            worst = max(r.c_max for r in rows)
            bound = factor * math.log(n)
            checks.append(VerificationRecord("subcritical_size", inputs, worst, bound, worst <= bound))

        events = [r.good_event for r in rows if r.good_event is not None]
        if events:
            frequency = sum(events) / len(events)
            minimum = pilot_threshold(GOOD_EVENT_MIN_FREQUENCY, config.d, u)
            checks.append(
                VerificationRecord(
                    "good_event_frequency", inputs,
                    0.0 if minimum is None else minimum, frequency,
                    None if minimum is None else frequency >= minimum,
                )
            )
    return checks


@click.command()
@experiment_options
@click.option("--no-timing", is_flag=True, help="Write wall_ms as 0 for byte-identical output")
@click.option("--good-event", is_flag=True, help="Also sprinkle a segment bundle per row")
@guarded
def sweep(no_timing: bool, good_event: bool, **flags):
    """
    Sweep the vacant-set components over a u-grid.

    Writes one CSV row per (u, seed) with the largest and second largest
    component sizes. Checks at calibrated (d, u) points are summarised on
    stderr; a failed check exits with status 2.

    Examples:

        lacuna sweep --n 4096 --d 3 --u 0.5:8:0.5 --seeds 20 --out sweep.csv

        lacuna sweep --config sweep.conf --threads 4 --no-timing
    """
    config = load_command_config("sweep", **flags)
    records = run_sweep(config, timing=not no_timing, good_event=good_event)
    emit(format_sweep_csv(records), config.out)
    checks = sweep_checks(records, config)
    reporter = VerificationReporter()
    if checks:
        click.echo(reporter.generate_report(checks, "text", "Sweep Checks"), err=True)
    if reporter.status(checks) == "fail":
        raise BoundViolation("sweep thresholds violated")


if __name__ == "__main__":
    sweep()  # pylint: disable=no-value-for-parameter
