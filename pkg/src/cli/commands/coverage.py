"""
Coverage command - Empirical failure rates against the tail bounds.
"""

import click
import logging
from typing import Optional

from src.harness.config import BOUNDS
from src.harness.coverage import run_coverage_study

from ..formatters import ConsoleFormatter
from ..utils import (
    CoverageViolation,
    build_config,
    experiment_options,
    get_output_handler,
    handle_errors,
    parse_list,
)

logger = logging.getLogger(__name__)


@click.command()
@experiment_options
@click.option("--bound", "-b", type=click.Choice(BOUNDS), default=None, help="Bound to check (default: config value).")
@click.option("--epsilons", "-e", default=None, help="Comma-separated accuracy grid.")
@click.option("--rank", "-r", "rank_parameter", type=int, default=None, help="Rank parameter r.")
@click.option("--delta", type=float, default=None, help="Failure probability for the radius check.")
@click.option("--report", type=click.Path(dir_okay=False), help="Write the coverage report CSV.")
@click.option("--json", "-j", "json_output", is_flag=True, help="Print the report as JSON.")
@click.pass_context
def coverage(
    ctx,
    config_path: Optional[str],
    progress: bool,
    bound: Optional[str],
    epsilons: Optional[str],
    rank_parameter: Optional[int],
    delta: Optional[float],
    report: Optional[str],
    json_output: bool,
    **overrides,
):
    """
    Check empirical failure frequencies against a tail bound.

    Exits with code 4 if any grid point exceeds its bound by more than
    the binomial slack. Needs at least 100 trials per point.

    \b
    Examples:
      pls-tomography coverage --dims 5 --n-grid 5000 -e 0.3,0.5,1.0 -t 500
      pls-tomography coverage --scheme uniform --dims 4 --n-grid 2000 -b thm2 -e 0.5,1.0
      pls-tomography coverage -c study.cfg --bound radius --report coverage.csv
    """
    output = get_output_handler(ctx, json_output)
    config = build_config(
        config_path,
        bound=bound,
        epsilons=parse_list(epsilons, float),
        rank_parameter=rank_parameter,
        delta=delta,
        **overrides,
    )

    output.progress(f"Coverage ({config.bound}): {config.scheme}, dims={list(config.dims)}, {config.trials} trials per point")
    with handle_errors("Coverage study"):
        result = run_coverage_study(config, show_progress=progress and not output.quiet)
        if report:
            result.write_csv(report)
            output.info(f"Report written to {report}")

    if json_output:
        output.output({
            "bound": result.bound_name,
            "passed": result.passed,
            "points": [
                {
                    "d": p.d,
                    "n": p.n,
                    "epsilon": p.epsilon,
                    "bound_value": p.check.bound,
                    "empirical_failure": p.check.empirical_failure,
                    "slack": p.slack,
                    "status": p.status,
                }
                for p in result.points
            ],
        })
    else:
        ConsoleFormatter.coverage(result)

    if not result.passed:
        raise CoverageViolation(f"{len(result.violations)} of {len(result.points)} points violate {result.bound_name}")
    output.success(f"All {len(result.points)} points within {result.bound_name}")
