"""
Verify-design command - Check the 2-design condition of a vector set.
"""

import click
import logging
from typing import Optional

from src.tomography.matrix_io import load_vector_set
from src.tomography.measurements import DESIGN_TOL, verify_2design

from ..utils import common_options, get_output_handler, handle_errors

logger = logging.getLogger(__name__)


@click.command("verify-design")
@click.option(
    "--file", "-f", "vector_file", type=click.Path(exists=True, dir_okay=False), required=True,
    help="Vector-set file (header 'd m settings', then m lines of re/im pairs)."
)
@click.option("--tol", type=float, default=DESIGN_TOL, show_default=True, help="Maximum allowed deviation.")
@common_options
@click.pass_context
def verify_design(
    ctx,
    vector_file: str,
    tol: float,
    json_output: bool,
    output_file: Optional[str],
):
    """
    Check whether a vector set is a complex projective 2-design.

    Prints the largest deviation of the normalized second-moment operator
    from the symmetric-subspace projector. Exits with code 1 on failure.

    \b
    Examples:
      pls-tomography verify-design --file mub5.txt
      pls-tomography verify-design -f sic.txt --tol 1e-6 --json
    """
    output = get_output_handler(ctx, json_output, output_file)

    with handle_errors("Design check"):
        vectors, settings = load_vector_set(vector_file)
        check = verify_2design(vectors, tol)

    d = vectors.shape[1]
    result = {
        "file": vector_file,
        "d": d,
        "vectors": len(vectors),
        "settings": settings,
        "max_deviation": check.max_deviation,
        "passed": check.passed,
    }
    output.output(result, title="2-design check")

    if check.passed:
        output.success(f"{len(vectors)} vectors form a 2-design in d={d}")
    else:
        output.error(f"Deviation {check.max_deviation:.3e} exceeds {tol:g}")
        ctx.exit(1)
