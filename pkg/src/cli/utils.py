"""
CLI utilities for output handling, shared options and error mapping.
"""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Union

import click

from src.harness.config import ConfigError, ExperimentConfig
from src.tomography.exceptions import (
    CompletenessError,
    FormatError,
    NumericalFailureError,
    TomographyError,
)
from src.tomography.measurements import MeasurementScheme, build_scheme

from .formatters import JsonFormatter

logger = logging.getLogger(__name__)

SCHEME_CHOICES = ["mub", "pauli-obs", "pauli-basis", "uniform"]


class UsageError(click.ClickException):
    """Invalid configuration or arguments (exit code 2)."""
    exit_code = 2


class NumericalError(click.ClickException):
    """Numerical failure such as a non-converging eigensolver (exit code 3)."""
    exit_code = 3


class CoverageViolation(click.ClickException):
    """A coverage study found a bound violation (exit code 4)."""
    exit_code = 4


@contextmanager
def handle_errors(action: str) -> Iterator[None]:
    """Translate library exceptions into ClickExceptions with exit codes."""
    try:
        yield
    except (ConfigError, FormatError) as e:
        raise UsageError(str(e))
    except (NumericalFailureError, CompletenessError) as e:
        logger.debug(f"{action} failed", exc_info=True)
        raise NumericalError(f"{action} failed: {e}")
    except (TomographyError, ValueError) as e:
        logger.debug(f"{action} failed", exc_info=True)
        raise UsageError(f"{action} failed: {e}")
    except OSError as e:
        raise click.ClickException(f"{action} failed: {e}")


class OutputHandler:
    """
    Handles output formatting and destinations.

    Results go to stdout (or a file); progress and diagnostics go to stderr.
    """

    def __init__(
        self,
        json_output: bool = False,
        output_file: Optional[str] = None,
        quiet: bool = False,
        verbose: bool = False,
    ):
        self.json_output = json_output
        self.output_file = output_file
        self.quiet = quiet
        self.verbose = verbose

    def output(self, data: Union[Dict[str, Any], str], title: Optional[str] = None):
        """Output data in the appropriate format."""
        if self.json_output:
            self._emit(JsonFormatter.format(data if isinstance(data, dict) else {"result": data}))
        elif isinstance(data, dict):
            if title and not self.quiet and not self.output_file:
                click.echo(f"\n{'=' * 60}")
                click.echo(f"  {title}")
                click.echo(f"{'=' * 60}\n")
            self._emit("\n".join(self._format_dict(data)))
        else:
            self._emit(str(data))

    def _emit(self, text: str):
        if self.output_file:
            Path(self.output_file).write_text(text + "\n")
            if not self.quiet:
                click.echo(f"Output saved to: {self.output_file}", err=True)
        else:
            click.echo(text)

    def _format_dict(self, data: Dict[str, Any], indent: int = 0):
        prefix = "  " * indent
        for key, value in data.items():
            if isinstance(value, dict):
                yield f"{prefix}{key}:"
                yield from self._format_dict(value, indent + 1)
            elif isinstance(value, float):
                yield f"{prefix}{key}: {value:.6g}"
            else:
                yield f"{prefix}{key}: {value}"

    def success(self, message: str):
        """Print success message."""
        if not self.quiet:
            click.secho(f"[OK] {message}", fg="green", err=True)

    def error(self, message: str):
        """Print error message."""
        click.secho(f"[FAIL] {message}", fg="red", err=True)

    def warning(self, message: str):
        """Print warning message."""
        if not self.quiet:
            click.secho(f"! {message}", fg="yellow", err=True)

    def info(self, message: str):
        """Print info message."""
        if not self.quiet and self.verbose:
            click.echo(f"  {message}", err=True)

    def progress(self, message: str):
        """Print progress message."""
        if not self.quiet:
            click.echo(f"  {message}", err=True)


def common_options(func):
    """Decorator to add common options to commands."""
    func = click.option(
        "--json", "-j", "json_output", is_flag=True,
        help="Output as JSON."
    )(func)
    func = click.option(
        "--output", "-o", "output_file", type=click.Path(),
        help="Save output to file."
    )(func)
    return func


def scheme_options(func):
    """Decorator adding --scheme/--d/--k."""
    func = click.option(
        "--k", "k", type=int, default=None,
        help="Number of qubits (Pauli schemes)."
    )(func)
    func = click.option(
        "--d", "d", type=int, default=None,
        help="Hilbert-space dimension."
    )(func)
    func = click.option(
        "--scheme", "-s", default="mub", show_default=True,
        help="Measurement scheme: mub, pauli-obs, pauli-basis, uniform or file:<vector-set>."
    )(func)
    return func


def state_option(func):
    return click.option(
        "--state", default="random-pure", show_default=True,
        help="State: random-pure, random-rank:<r>, caricature:<p> or a matrix file."
    )(func)


def resolve_scheme(scheme: str, d: Optional[int], k: Optional[int]) -> MeasurementScheme:
    """Build the scheme named on the command line."""
    if not (scheme in SCHEME_CHOICES or scheme.startswith("file:")):
        raise UsageError(f"Unknown scheme '{scheme}' (choose from {', '.join(SCHEME_CHOICES)} or file:<path>)")
    with handle_errors("Building scheme"):
        return build_scheme(scheme, d=d, k=k)


def get_output_handler(ctx, json_output: bool = False, output_file: Optional[str] = None) -> OutputHandler:
    """Create an OutputHandler from context and options."""
    return OutputHandler(
        json_output=json_output,
        output_file=output_file,
        quiet=ctx.obj.get("quiet", False),
        verbose=ctx.obj.get("verbose", False),
    )


def parse_list(value: Optional[str], cast=int):
    """Parse a comma-separated CLI list; None passes through."""
    if value is None:
        return None
    try:
        return tuple(cast(item.strip()) for item in value.split(",") if item.strip())
    except ValueError:
        raise UsageError(f"Invalid list '{value}'")


def json_line(data: Dict[str, Any]) -> str:
    return JsonFormatter.format(data, pretty=False)


def experiment_options(func):
    """Decorator adding the ExperimentConfig override flags shared by sweep and coverage."""
    options = [
        click.option("--config", "-c", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="Experiment config file (key=value lines)."),
        click.option("--scheme", "-s", default=None, help="Measurement scheme."),
        click.option("--state", default=None, help="State spec."),
        click.option("--dims", default=None, help="Comma-separated dimensions, e.g. 5,7,11."),
        click.option("--n-grid", default=None, help="Comma-separated, strictly increasing sample sizes."),
        click.option("--n-per-setting/--n-total", default=None,
                     help="Interpret the n grid as samples per setting."),
        click.option("--trials", "-t", type=int, default=None, help="Trials per (d, n) point."),
        click.option("--seed", type=int, default=None, help="Master seed."),
        click.option("--workers", "-w", type=int, default=None, envvar="PLS_TOMO_WORKERS",
                     help="Worker processes (default: $PLS_TOMO_WORKERS or CPU count)."),
        click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
                     help="Trial CSV output path."),
        click.option("--no-timing", is_flag=True, help="Write runtime_ms as 0 for byte-identical reruns."),
        click.option("--progress/--no-progress", default=True, help="Show a progress bar."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(
    config_path: Optional[str],
    scheme: Optional[str] = None,
    state: Optional[str] = None,
    dims: Optional[str] = None,
    n_grid: Optional[str] = None,
    n_per_setting: Optional[bool] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    csv_path: Optional[str] = None,
    no_timing: bool = False,
    **extra: Any,
) -> ExperimentConfig:
    """Load the config file (if any) and apply CLI overrides."""
    overrides = dict(
        scheme=scheme,
        state=state,
        dims=parse_list(dims, int),
        n_grid=parse_list(n_grid, int),
        n_per_setting=n_per_setting,
        trials=trials,
        seed=seed,
        workers=workers,
        output=csv_path,
        record_timing=False if no_timing else None,
        **extra,
    )
    with handle_errors("Loading config"):
        if config_path:
            return ExperimentConfig.from_file(config_path, **overrides)
        return ExperimentConfig().with_overrides(**overrides)
