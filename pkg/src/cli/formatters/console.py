"""Console tables for sweep aggregates and coverage reports."""

import click
from typing import Any, Dict, Optional, Sequence


def _is_number(value: Any) -> bool:
    try:
        float(value)
    except (TypeError, ValueError):
        return False
    return True


class ConsoleFormatter:
    """Console rendering of tomography results."""

    @staticmethod
    def table(headers: Sequence[str], rows: Sequence[Sequence[Any]], title: Optional[str] = None):
        """Print a table; numeric cells are right-aligned."""
        if title:
            click.echo(f"\n{title}")
            click.echo("-" * len(title))

        text = [[str(cell) for cell in row] for row in rows]
        widths = [max([len(h)] + [len(row[i]) for row in text]) for i, h in enumerate(headers)]
        numeric = [bool(rows) and all(_is_number(row[i]) for row in rows) for i in range(len(headers))]

        def line(cells: Sequence[str]) -> str:
            return "  ".join(c.rjust(w) if num else c.ljust(w) for c, w, num in zip(cells, widths, numeric))

        click.echo(line(headers))
        click.echo("  ".join("-" * w for w in widths))
        for row in text:
            click.echo(line(row))

    @staticmethod
    def aggregates(points: Sequence, slopes: Dict[int, Optional[float]]):
        """Print per-(d, n) trace-error statistics and fitted slopes."""
        rows = [
            [p.d, p.n, p.trials, f"{p.mean:.4g}", f"{p.median:.4g}", f"{p.q10:.4g}", f"{p.q90:.4g}"]
            for p in points
        ]
        ConsoleFormatter.table(
            ["d", "n", "trials", "mean", "median", "q10", "q90"],
            rows,
            title="Trace-norm error",
        )
        click.echo()
        for d, slope in slopes.items():
            text = "n/a" if slope is None else f"{slope:.3f}"
            click.echo(f"  slope log(err)/log(n) at d={d}: {text}")

    @staticmethod
    def coverage(report):
        """Print a coverage report, coloring violations red."""
        headers = ["d", "n", "epsilon", "bound", "failure", "status"]
        widths = [6, 10, 9, 11, 9, 12]
        click.echo(f"\nCoverage: {report.bound_name}")
        click.echo(" ".join(h.ljust(w) for h, w in zip(headers, widths)))
        click.echo("-" * (sum(widths) + len(widths) - 1))
        for p in report.points:
            eps = "-" if p.epsilon is None else f"{p.epsilon:g}"
            cells = [str(p.d), str(p.n), eps, f"{p.check.bound:.4g}", f"{p.check.empirical_failure:.4f}"]
            click.echo(" ".join(c.ljust(w) for c, w in zip(cells, widths)) + " ", nl=False)
            click.secho(p.status, fg="red" if p.status == "violation" else "green")

    @staticmethod
    def section(title: str, content: Dict[str, Any]):
        """Print a titled section with key-value pairs."""
        click.echo(f"\n{title}")
        click.echo("-" * len(title))
        for key, value in content.items():
            if isinstance(value, float):
                formatted = f"{value:.6g}"
            else:
                formatted = str(value)
            click.echo(f"  {key}: {formatted}")
