"""
Tests for trial CSV output and parsing.
"""

import numpy as np
import pytest

from src.harness.results import (
    COUNTS_COLUMNS,
    TRIAL_COLUMNS,
    TrialCsvWriter,
    emit_csv,
    is_incomplete,
    read_csv,
    record_row,
    write_counts_csv,
    write_rows,
)
from src.harness.sweep import SweepResult, aggregate_points
from src.tomography.analyze import TrialRecord
from src.tomography.measurements import SchemeKind
from src.tomography.simulate import OutcomeCounts


def make_record(d=5, n=1000, trial=0, trace_error=0.1, seed=7):
    return TrialRecord(
        scheme="structured", d=d, r_true=1, n=n, trial=trial, seed=seed,
        trace_error=trace_error, op_error_L=trace_error / 2, op_error_rho=0.0,
        frobenius_error=0.0, x0=0.01, rank_estimate=2,
        sigma_r_rho=(0.0,) * d, sigma_r_est=(0.0,) * d,
        radius_delta05=0.5, runtime_ms=1.25,
    )


@pytest.fixture
def records():
    rng = np.random.default_rng(0)
    return [
        make_record(d=d, n=n, trial=t, trace_error=float(rng.random()) / 3)
        for d in (7, 5)
        for n in (2000, 1000)
        for t in (2, 0, 1)
    ]


class TestEmitCsv:
    """Tests for whole-result CSV output"""

    def test_empty_result_is_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv(SweepResult(), path)
        assert path.read_text() == ",".join(TRIAL_COLUMNS) + "\n"

    def test_single_record(self, tmp_path):
        path = tmp_path / "one.csv"
        emit_csv([make_record()], path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].split(",") == list(TRIAL_COLUMNS)
        assert lines[1] == "structured,5,1,1000,0,7,0.1,0.05,0.01,2,0,0.5,1.25"

    def test_rows_sorted(self, tmp_path, records):
        path = tmp_path / "sorted.csv"
        emit_csv(records, path)
        rows = read_csv(path)
        keys = [(r.d, r.n, r.trial) for r in rows]
        assert keys == sorted(keys)
        assert len(rows) == len(records)

    def test_twelve_significant_digits(self):
        row = record_row(make_record(trace_error=1 / 3))
        assert row[TRIAL_COLUMNS.index("trace_error")] == "0.333333333333"

    def test_missing_seed_is_blank(self, tmp_path):
        path = tmp_path / "seedless.csv"
        emit_csv([make_record(seed=None)], path)
        assert read_csv(path)[0].seed is None

    def test_aggregates_recomputable_from_csv(self, tmp_path, records):
        path = tmp_path / "agg.csv"
        result = SweepResult(records=records)
        emit_csv(result, path)
        rows = read_csv(path)
        recomputed = aggregate_points((r.scheme, r.d, r.n, r.trace_error) for r in rows)
        assert recomputed == result.aggregates

    def test_read_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="unexpected header"):
            read_csv(path)

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError, match="Cannot write"):
            emit_csv([], tmp_path / "missing" / "out.csv")


class TestTrialCsvWriter:
    """Tests for the incremental writer"""

    def test_comment_and_rows(self, tmp_path):
        path = tmp_path / "sweep.csv"
        with TrialCsvWriter(path, "sweep") as writer:
            writer.write(make_record(trial=0))
            writer.write(make_record(trial=1))
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# pls-tomography sweep ")
        assert lines[1] == ",".join(TRIAL_COLUMNS)
        assert len(lines) == 4
        assert writer.rows_written == 2
        assert not is_incomplete(path)
        assert [r.trial for r in read_csv(path)] == [0, 1]

    def test_incomplete_marker_on_error(self, tmp_path):
        path = tmp_path / "partial.csv"
        with pytest.raises(KeyboardInterrupt):
            with TrialCsvWriter(path) as writer:
                writer.write(make_record())
                raise KeyboardInterrupt
        assert is_incomplete(path)
        assert path.read_text().splitlines()[-1] == "# INCOMPLETE after 1 rows"
        assert len(read_csv(path)) == 1


class TestOtherTables:
    """Tests for counts and generic tables"""

    def test_counts_csv(self, tmp_path):
        counts = OutcomeCounts(
            counts=(np.array([3, 1]), np.array([0, 2])),
            shots=np.array([4, 2]),
            kind=SchemeKind.PAULI_OBSERVABLES,
        )
        path = tmp_path / "counts.csv"
        write_counts_csv(counts, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(COUNTS_COLUMNS)
        assert lines[1:] == ["0,0,3,4", "0,1,1,4", "1,0,0,2", "1,1,2,2"]

    def test_write_rows_formats_floats(self, tmp_path):
        path = tmp_path / "table.csv"
        write_rows(path, ("name", "value"), [("a", 2 / 3), ("b", 4)])
        assert path.read_text().splitlines() == ["name,value", "a,0.666666666667", "b,4"]
