"""
Main CLI entry point for pls-tomography.

Usage:
    pls-tomography <command> [options]

Commands:
    simulate       One simulated PLS run with an error summary
    estimate       Write the estimator in matrix text format
    sweep          Trace-error scaling over (d, n) grids
    coverage       Empirical failure rates against tail bounds
    verify-design  Check the 2-design condition of a vector set
    bound          Evaluate a tail bound, radius or sample complexity
"""

import logging

import click

from src import __version__ as VERSION

from .commands import bound, coverage, design, estimate, simulate, sweep


class AliasedGroup(click.Group):
    """Click group that supports command aliases."""

    def get_command(self, ctx, cmd_name):
        aliases = {
            "sim": "simulate",
            "est": "estimate",
            "cov": "coverage",
            "verify": "verify-design",
        }
        cmd_name = aliases.get(cmd_name, cmd_name)
        return super().get_command(ctx, cmd_name)


@click.group(cls=AliasedGroup, invoke_without_command=True)
@click.option("--version", "-V", is_flag=True, help="Show version and exit.")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output and debug logging.")
@click.option("--quiet", "-q", is_flag=True, help="Minimal output.")
@click.pass_context
def cli(ctx, version, verbose, quiet):
    """
    Projected least squares quantum state tomography.

    \b
    Quick Start:
      pls-tomography simulate --scheme mub --d 5 --n 10000
      pls-tomography sweep --dims 5,7 --n-grid 1000,10000 --csv out.csv
      pls-tomography bound --which thm1 --d 5 --n 10000 --eps 0.5

    \b
    For more help on a command:
      pls-tomography <command> --help
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if version:
        click.echo(f"pls-tomography version {VERSION}")
        ctx.exit(0)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


cli.add_command(simulate.simulate)
cli.add_command(estimate.estimate)
cli.add_command(sweep.sweep)
cli.add_command(coverage.coverage)
cli.add_command(design.verify_design)
cli.add_command(bound.bound)


def main():
    """Entry point for console script."""
    cli(obj={})


if __name__ == "__main__":
    main()
