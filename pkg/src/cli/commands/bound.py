"""
Bound command - Evaluate a tail bound, confidence radius or sample complexity.
"""

import click
import logging
from typing import Optional

from src.tomography.analyze import (
    BoundParams,
    confidence_radius,
    essential_opnorm_tail,
    sample_complexity,
    thm1_tail,
    thm2_tail,
    uniform_confidence_radius,
    uniform_opnorm_tail,
)
from src.tomography.measurements import SchemeKind, dimension_factor

from ..utils import SCHEME_CHOICES, UsageError, handle_errors

logger = logging.getLogger(__name__)

WHICH = ["thm1", "thm2", "essential", "radius", "samples", "uniform-opnorm"]

SCHEME_KINDS = {
    "mub": SchemeKind.STRUCTURED,
    "pauli-obs": SchemeKind.PAULI_OBSERVABLES,
    "pauli-basis": SchemeKind.PAULI_BASIS,
    "uniform": SchemeKind.UNIFORM,
}


def evaluate_bound(
    which: str,
    d: int,
    n: Optional[float],
    r: int = 1,
    eps: float = 0.0,
    delta: float = 0.05,
    scheme: str = "mub",
    rank_estimate: Optional[int] = None,
) -> float:
    """Evaluate one bound; ``eps`` doubles as τ for the operator-norm tails."""
    kind = SCHEME_KINDS[scheme]
    if which in ("thm2", "uniform-opnorm") and kind is not SchemeKind.UNIFORM:
        raise UsageError(f"--which {which} applies to the uniform POVM only")
    if which in ("thm1", "essential", "samples") and kind is SchemeKind.UNIFORM:
        raise UsageError(f"--which {which} needs a discrete scheme")
    if which != "samples" and n is None:
        raise UsageError(f"--which {which} needs --n")

    g = None if kind is SchemeKind.UNIFORM else dimension_factor(kind, d)
    samples = n if which != "samples" else 1.0

    if which == "thm1":
        return thm1_tail(BoundParams(d=d, n=samples, r=r, epsilon=eps, delta=delta, g_of_d=g))
    if which == "thm2":
        return thm2_tail(BoundParams(d=d, n=samples, r=r, epsilon=eps, delta=delta))
    if which == "essential":
        return essential_opnorm_tail(BoundParams(d=d, n=samples, tau=eps, delta=delta, g_of_d=g, kind=kind))
    if which == "uniform-opnorm":
        return uniform_opnorm_tail(BoundParams(d=d, n=samples, tau=eps, delta=delta))
    if which == "samples":
        return sample_complexity(BoundParams(d=d, n=samples, r=r, epsilon=eps, delta=delta, g_of_d=g))

    params = BoundParams(d=d, n=samples, delta=delta, g_of_d=g)
    rank = rank_estimate if rank_estimate is not None else r
    if kind is SchemeKind.UNIFORM:
        return uniform_confidence_radius(params, rank)
    return confidence_radius(params, rank)


@click.command()
@click.option("--which", "-w", type=click.Choice(WHICH), required=True, help="Quantity to evaluate.")
@click.option("--d", "d", type=int, required=True, help="Dimension.")
@click.option("--n", "n", type=float, default=None, help="Total number of samples.")
@click.option("--r", "r", type=int, default=1, show_default=True, help="Rank parameter.")
@click.option("--eps", type=float, default=0.0, show_default=True, help="Accuracy (epsilon, or tau for operator-norm tails).")
@click.option("--delta", type=float, default=0.05, show_default=True, help="Failure probability.")
@click.option("--scheme", "-s", type=click.Choice(SCHEME_CHOICES), default="mub", show_default=True,
              help="Scheme family, fixes g(d).")
@click.option("--rank-estimate", type=int, default=None, help="rank(rho_hat) for --which radius (default: --r).")
@click.pass_context
def bound(
    ctx,
    which: str,
    d: int,
    n: Optional[float],
    r: int,
    eps: float,
    delta: float,
    scheme: str,
    rank_estimate: Optional[int],
):
    """
    Print a single bound value.

    \b
    Quantities:
      thm1            Pr[trace error >= eps], discrete schemes
      thm2            Pr[trace error >= eps], uniform POVM
      essential       Pr[operator error of L >= eps], discrete schemes
      uniform-opnorm  Pr[operator error of L >= eps], uniform POVM
      radius          confidence radius at level delta
      samples         samples sufficient for accuracy eps

    \b
    Examples:
      pls-tomography bound --which thm1 --d 5 --n 10000 --eps 0.5
      pls-tomography bound --which samples --d 4 --eps 0.1 --scheme pauli-obs
      pls-tomography bound --which radius --d 4 --n 2000 --scheme uniform
    """
    with handle_errors("Bound evaluation"):
        value = evaluate_bound(which, d, n, r, eps, delta, scheme, rank_estimate)
    logger.debug(f"{which}(d={d}, n={n}, r={r}, eps={eps}, delta={delta}, scheme={scheme}) = {value}")

    if which == "samples":
        click.echo(str(int(value)))
    else:
        click.echo(f"{value:.12g}")
