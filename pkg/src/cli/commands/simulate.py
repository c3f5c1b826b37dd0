"""
Simulate command - One PLS tomography run with a full error summary.
"""

import click
import logging
from typing import Optional

from src.harness.results import write_counts_csv
from src.harness.states import parse_state_spec, prepare_state
from src.tomography.estimate import record_trial, run_pipeline
from src.tomography.simulate import allocate_shots, born_probabilities, sample_counts

from ..formatters import ConsoleFormatter
from ..utils import (
    UsageError,
    common_options,
    get_output_handler,
    handle_errors,
    resolve_scheme,
    scheme_options,
    state_option,
)

logger = logging.getLogger(__name__)


@click.command()
@scheme_options
@state_option
@click.option("--n", "n", type=int, default=1000, show_default=True, help="Total number of samples.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for state and sampling.")
@click.option("--exact", is_flag=True, help="Use exact Born probabilities instead of sampled counts.")
@click.option(
    "--counts-csv", type=click.Path(dir_okay=False),
    help="Also write the raw outcome counts (setting,outcome,count,shots)."
)
@common_options
@click.pass_context
def simulate(
    ctx,
    scheme: str,
    d: Optional[int],
    k: Optional[int],
    state: str,
    n: int,
    seed: int,
    exact: bool,
    counts_csv: Optional[str],
    json_output: bool,
    output_file: Optional[str],
):
    """
    Run one simulated PLS tomography experiment.

    Prints trace, operator and Frobenius errors, the projection threshold
    x0, the estimated rank and the 95% confidence radius.

    \b
    Examples:
      pls-tomography simulate --scheme mub --d 5 --n 10000
      pls-tomography simulate --scheme pauli-basis --k 2 --state random-rank:2
      pls-tomography simulate --d 3 --counts-csv counts.csv --json
    """
    output = get_output_handler(ctx, json_output, output_file)
    if n < 1:
        raise UsageError("--n must be positive")

    measurement = resolve_scheme(scheme, d, k)
    if counts_csv and (exact or measurement.is_continuous):
        raise UsageError("--counts-csv needs sampled counts from a discrete scheme")

    output.progress(f"Simulating {measurement.name} (d={measurement.d}, n={n})...")
    with handle_errors("Simulation"):
        rho = prepare_state(parse_state_spec(state), measurement.d, seed)
        run = run_pipeline(rho, measurement, None if exact else n, seed)
        record = record_trial(run, n, seed)

        if counts_csv:
            counts = sample_counts(
                born_probabilities(rho, measurement),
                allocate_shots(n, measurement.settings),
                seed,
            )
            write_counts_csv(counts, counts_csv)
            output.info(f"Counts written to {counts_csv}")

    result = {
        "scheme": record.scheme,
        "d": record.d,
        "n": record.n,
        "seed": record.seed,
        "exact": exact,
        "trace_error": record.trace_error,
        "op_error_L": record.op_error_L,
        "op_error_rho": record.op_error_rho,
        "frobenius_error": record.frobenius_error,
        "x0": record.x0,
        "rank_estimate": record.rank_estimate,
        "radius_delta05": record.radius_delta05,
        "runtime_ms": record.runtime_ms,
    }

    if json_output or output_file:
        output.output(result)
    else:
        ConsoleFormatter.section(f"PLS run: {record.scheme}, d={record.d}, n={record.n}", result)
    output.success("Simulation complete")
