"""
Sweep command - Trace-error scaling over (d, n) grids.
"""

import click
import logging
from typing import Optional

from src.harness.sweep import run_sweep

from ..formatters import ConsoleFormatter
from ..utils import (
    build_config,
    experiment_options,
    get_output_handler,
    handle_errors,
)

logger = logging.getLogger(__name__)


@click.command()
@experiment_options
@click.option("--json", "-j", "json_output", is_flag=True, help="Print aggregates as JSON.")
@click.pass_context
def sweep(
    ctx,
    config_path: Optional[str],
    progress: bool,
    json_output: bool,
    **overrides,
):
    """
    Run a parallel trial sweep and summarize the trace-norm error.

    Flags override values from --config. Rows are written to the CSV in
    (d, n, trial) order while the sweep runs.

    \b
    Examples:
      pls-tomography sweep --scheme mub --dims 5,7,11,13 \\
          --n-grid 1000,3000,10000 --n-per-setting --csv mub.csv
      pls-tomography sweep -c experiments/mub.cfg --workers 8
      pls-tomography sweep --scheme pauli-basis --dims 2,4,8 --n-grid 500,5000 -j
    """
    output = get_output_handler(ctx, json_output)
    config = build_config(config_path, **overrides)

    total = len(config.dims) * len(config.n_grid) * config.trials
    output.progress(f"Sweep: {config.scheme}, dims={list(config.dims)}, {total} trials")

    with handle_errors("Sweep"):
        result = run_sweep(config, show_progress=progress and not output.quiet)

    aggregates = result.aggregates
    slopes = result.slopes
    violations = result.monotone_violations

    if json_output:
        output.output({
            "scheme": config.scheme,
            "trials": len(result),
            "csv": config.output,
            "aggregates": [vars(a) for a in aggregates],
            "slopes": {str(d): s for d, s in slopes.items()},
            "monotone_violations": len(violations),
        })
    else:
        ConsoleFormatter.aggregates(aggregates, slopes)

    for v in violations:
        output.warning(f"Median error rose at d={v.d} between n={v.n_low} and n={v.n_high}")
    if config.output:
        output.success(f"{len(result)} trials written to {config.output}")
    else:
        output.success(f"{len(result)} trials complete")
