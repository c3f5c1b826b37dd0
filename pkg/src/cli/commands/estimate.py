"""
Estimate command - Dump the PLS estimator as a matrix text file.
"""

import click
import logging
from pathlib import Path
from typing import Optional

from src.harness.states import parse_state_spec, prepare_state
from src.tomography.estimate import run_pipeline
from src.tomography.linalg import numerical_rank, operator_norm, trace_norm_distance
from src.tomography.matrix_io import format_matrix

from ..utils import (
    UsageError,
    handle_errors,
    json_line,
    resolve_scheme,
    scheme_options,
    state_option,
)

logger = logging.getLogger(__name__)


@click.command()
@scheme_options
@state_option
@click.option("--n", "n", type=int, required=True, help="Total number of samples.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for state and sampling.")
@click.option("--raw", is_flag=True, help="Write the linear-inversion estimate instead of the projected state.")
@click.option(
    "--output", "-o", "output_file", type=click.Path(dir_okay=False),
    help="Write the matrix to a file; the JSON summary still goes to stdout."
)
@click.pass_context
def estimate(
    ctx,
    scheme: str,
    d: Optional[int],
    k: Optional[int],
    state: str,
    n: int,
    seed: int,
    raw: bool,
    output_file: Optional[str],
):
    """
    Estimate a state and write the estimator in matrix text format.

    The matrix is followed by a one-line JSON summary with trace_error,
    op_error, x0 and rank.

    \b
    Examples:
      pls-tomography estimate --scheme mub --d 5 --n 20000
      pls-tomography estimate --scheme pauli-obs --k 2 --n 5000 -o rho_hat.txt
      pls-tomography estimate --scheme uniform --d 4 --n 2000 --state caricature:0.1
    """
    if n < 1:
        raise UsageError("--n must be positive")
    measurement = resolve_scheme(scheme, d, k)

    with handle_errors("Estimation"):
        rho = prepare_state(parse_state_spec(state), measurement.d, seed)
        run = run_pipeline(rho, measurement, n, seed)

    rho_hat = run.pls.state.matrix
    matrix = run.estimate.matrix if raw else rho_hat
    summary = {
        "trace_error": trace_norm_distance(rho_hat, rho.matrix),
        "op_error": operator_norm(run.estimate.matrix - rho.matrix),
        "x0": run.pls.x0,
        "rank": numerical_rank(rho_hat),
    }

    text = format_matrix(matrix)
    if output_file:
        try:
            Path(output_file).write_text(text)
        except OSError as e:
            raise click.ClickException(f"Cannot write {output_file}: {e}")
        if not ctx.obj.get("quiet", False):
            click.echo(f"Matrix saved to: {output_file}", err=True)
    else:
        click.echo(text, nl=not text.endswith("\n"))
    click.echo(json_line(summary))
