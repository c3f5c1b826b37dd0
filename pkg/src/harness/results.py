"""
CSV output for sweeps, coverage studies and raw counts.

Trial CSV columns (fixed order):
    scheme,d,r_true,n,trial,seed,trace_error,op_error_L,x0,rank_estimate,
    sigma_1,radius_delta05,runtime_ms

Floats are written with 12 significant digits. Lines starting with ``#`` are
comments; the sweep writer uses them for its timestamp and for the
``# INCOMPLETE`` marker of interrupted runs.
"""

import csv
import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import IO, Dict, Iterable, List, Optional, Sequence, Union

from src.tomography.analyze import TrialRecord
from src.tomography.simulate import OutcomeCounts

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TRIAL_COLUMNS = (
    "scheme", "d", "r_true", "n", "trial", "seed", "trace_error", "op_error_L",
    "x0", "rank_estimate", "sigma_1", "radius_delta05", "runtime_ms",
)
COUNTS_COLUMNS = ("setting", "outcome", "count", "shots")
INCOMPLETE_MARKER = "# INCOMPLETE"

_INT_COLUMNS = {"d", "r_true", "n", "trial", "rank_estimate"}


def format_float(value: float) -> str:
    return f"{value:.12g}"


def csv_value(value: float) -> float:
    """A float as it reads back from the CSV."""
    return float(format_float(value))


def sort_key(record: TrialRecord):
    return (record.d, record.n, record.trial)


def record_row(record: TrialRecord) -> List[str]:
    """CSV cells of one trial."""
    return [
        record.scheme,
        str(record.d),
        str(record.r_true),
        str(record.n),
        str(record.trial),
        "" if record.seed is None else str(record.seed),
        format_float(record.trace_error),
        format_float(record.op_error_L),
        format_float(record.x0),
        str(record.rank_estimate),
        format_float(record.sigma_r_rho[0]),
        format_float(record.radius_delta05),
        format_float(record.runtime_ms),
    ]


def _open_for_write(path: PathLike) -> IO[str]:
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write results to {path}: {e}") from e


def emit_csv(result, path: PathLike) -> None:
    """
    Write trial records sorted by (d, n, trial).

    Args:
        result: A SweepResult or any iterable of TrialRecords
        path: Output path; an empty result gives a header-only file
    """
    records = getattr(result, "records", result)
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRIAL_COLUMNS)
        for record in sorted(records, key=sort_key):
            writer.writerow(record_row(record))


class TrialCsvWriter:
    """
    Incremental trial CSV with a timestamp comment; rows are flushed as written.

    Usage:
        with TrialCsvWriter(path, "sweep") as writer:
            writer.write(record)
    """

    def __init__(self, path: PathLike, title: str = "sweep"):
        self.path = Path(path)
        self.title = title
        self._handle: Optional[IO[str]] = None
        self._writer = None
        self.rows_written = 0

    def __enter__(self) -> "TrialCsvWriter":
        self._handle = _open_for_write(self.path)
        self._handle.write(f"# pls-tomography {self.title} {datetime.now().isoformat(timespec='seconds')}\n")
        self._writer = csv.writer(self._handle, lineterminator="\n")
        self._writer.writerow(TRIAL_COLUMNS)
        self._handle.flush()
        return self

    def write(self, record: TrialRecord) -> None:
        self._writer.writerow(record_row(record))
        self._handle.flush()
        self.rows_written += 1

    def mark_incomplete(self) -> None:
        self._handle.write(f"{INCOMPLETE_MARKER} after {self.rows_written} rows\n")
        self._handle.flush()
        logger.warning(f"Partial results ({self.rows_written} rows) flushed to {self.path}")

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is not None:
            self.mark_incomplete()
        self._handle.close()


@dataclass(frozen=True)
class TrialRow:
    """One parsed row of a trial CSV."""
    scheme: str
    d: int
    r_true: int
    n: int
    trial: int
    seed: Optional[int]
    trace_error: float
    op_error_L: float
    x0: float
    rank_estimate: int
    sigma_1: float
    radius_delta05: float
    runtime_ms: float


def read_csv(path: PathLike) -> List[TrialRow]:
    """
    Parse a trial CSV, skipping comment lines.

    Raises:
        ValueError: If the header does not match the trial columns
    """
    with open(path, newline="", encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != TRIAL_COLUMNS:
        raise ValueError(f"{path}: unexpected header {reader.fieldnames}")

    rows = []
    for raw in reader:
        values: Dict[str, object] = {}
        for column in TRIAL_COLUMNS:
            cell = raw[column]
            if column == "scheme":
                values[column] = cell
            elif column == "seed":
                values[column] = int(cell) if cell else None
            elif column in _INT_COLUMNS:
                values[column] = int(cell)
            else:
                values[column] = float(cell)
        rows.append(TrialRow(**values))
    return rows


def is_incomplete(path: PathLike) -> bool:
    with open(path, encoding="utf-8") as handle:
        return any(line.startswith(INCOMPLETE_MARKER) for line in handle)


def write_counts_csv(counts: OutcomeCounts, path: PathLike) -> None:
    """Write raw counts as ``setting,outcome,count,shots`` rows."""
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COUNTS_COLUMNS)
        for setting, (setting_counts, shots) in enumerate(zip(counts.counts, counts.shots)):
            for outcome, count in enumerate(setting_counts):
                writer.writerow([setting, outcome, int(count), int(shots)])


def write_rows(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    """Write a generic CSV table (used for aggregates and coverage reports)."""
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
