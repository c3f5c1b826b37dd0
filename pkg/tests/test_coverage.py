"""
Tests for coverage studies against the tail bounds.
"""

import pytest

from src.harness.config import ConfigError, ExperimentConfig
from src.harness.coverage import (
    COVERAGE_COLUMNS,
    bound_value,
    evaluate_coverage,
    run_coverage_study,
)
from src.tomography.analyze import TrialRecord


def make_record(trace_error, n=100_000, d=5, trial=0, op_error=0.0, rank_estimate=1, sigma=0.0):
    return TrialRecord(
        scheme="structured", d=d, r_true=1, n=n, trial=trial, seed=trial,
        trace_error=trace_error, op_error_L=op_error, op_error_rho=0.0, frobenius_error=0.0,
        x0=0.0, rank_estimate=rank_estimate,
        sigma_r_rho=(sigma,) * d, sigma_r_est=(sigma,) * d, radius_delta05=0.0,
    )


def mub_config(**overrides):
    values = dict(scheme="mub", dims=(5,), n_grid=(100_000,), trials=100, epsilons=(0.5,), record_timing=False)
    values.update(overrides)
    return ExperimentConfig(**values)


class TestValidation:
    """Tests for study preconditions"""

    def test_needs_hundred_trials(self):
        with pytest.raises(ConfigError) as excinfo:
            run_coverage_study(mub_config(trials=99))
        assert excinfo.value.field == "trials"

    @pytest.mark.parametrize("scheme,bound", [("mub", "thm2"), ("uniform", "thm1"), ("uniform", "essential")])
    def test_bound_must_fit_scheme(self, scheme, bound):
        config = mub_config(scheme=scheme, bound=bound)
        with pytest.raises(ConfigError) as excinfo:
            run_coverage_study(config)
        assert excinfo.value.field == "bound"

    def test_needs_epsilon_grid(self):
        with pytest.raises(ConfigError) as excinfo:
            run_coverage_study(mub_config(epsilons=()))
        assert excinfo.value.field == "epsilons"

    def test_epsilon_out_of_range(self):
        with pytest.raises(ConfigError) as excinfo:
            run_coverage_study(mub_config(bound="essential", epsilons=(2.5,)))
        assert excinfo.value.field == "epsilons"

    def test_radius_needs_no_grid(self):
        config = mub_config(bound="radius", epsilons=())
        records = [make_record(0.01, trial=t) for t in range(100)]
        report = evaluate_coverage(config, records)
        assert [p.epsilon for p in report.points] == [None]


class TestEvaluateCoverage:
    """Tests for comparing synthetic trials with a bound"""

    def test_small_errors_pass(self):
        config = mub_config()
        records = [make_record(0.1, trial=t) for t in range(100)]
        report = evaluate_coverage(config, records)
        assert report.passed
        assert report.points[0].status == "pass"
        assert report.points[0].check.empirical_failure == 0.0

    def test_failure_above_tiny_bound_is_violation(self):
        config = mub_config()
        records = [make_record(0.1, trial=t) for t in range(99)] + [make_record(0.6, trial=99)]
        report = evaluate_coverage(config, records)
        assert not report.passed
        point = report.violations[0]
        assert point.status == "violation"
        assert point.check.empirical_failure == pytest.approx(0.01)
        assert point.check.bound < 1e-20

    def test_vacuous_bound_passes(self):
        config = mub_config(n_grid=(10,))
        records = [make_record(1.0, n=10, trial=t) for t in range(100)]
        report = evaluate_coverage(config, records)
        assert report.passed
        assert report.points[0].status == "vacuous-pass"

    def test_points_per_grid_cell(self):
        config = mub_config(n_grid=(1000, 100_000), epsilons=(0.3, 0.5))
        records = [make_record(0.05, n=n, trial=t) for n in (1000, 100_000) for t in range(100)]
        report = evaluate_coverage(config, records)
        assert [(p.n, p.epsilon) for p in report.points] == [
            (1000, 0.3), (1000, 0.5), (100_000, 0.3), (100_000, 0.5),
        ]

    def test_effective_rank_discounts_residual(self):
        config = mub_config(bound="thm4")
        records = [make_record(0.6, trial=t, sigma=0.1) for t in range(100)]
        assert evaluate_coverage(config, records).passed
        records = [make_record(0.6, trial=t, sigma=0.0) for t in range(100)]
        assert not evaluate_coverage(config, records).passed

    def test_operator_norm_bound(self):
        config = mub_config(bound="essential", epsilons=(0.3,))
        records = [make_record(0.0, trial=t, op_error=0.01) for t in range(100)]
        report = evaluate_coverage(config, records)
        assert report.passed
        assert report.points[0].check.bound == pytest.approx(bound_value("essential", config, 5, 100_000, 0.3))

    def test_report_csv(self, tmp_path):
        config = mub_config(epsilons=(0.3, 0.5))
        report = evaluate_coverage(config, [make_record(0.1, trial=t) for t in range(100)])
        path = tmp_path / "coverage.csv"
        report.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(COVERAGE_COLUMNS)
        assert len(lines) == 3
        assert lines[1].startswith("thm1,5,100000,0.3,")
        assert lines[1].endswith(",100,pass")


@pytest.mark.slow
class TestCoverageStudies:
    """Full simulated studies; the bounds are conservative so no point may fail"""

    def test_mub_trace_norm(self):
        config = ExperimentConfig(
            scheme="mub", dims=(5,), n_grid=(5000,), trials=500, seed=1,
            epsilons=(0.2, 0.3, 0.5, 0.8, 1.0), bound="thm1", record_timing=False,
        )
        report = run_coverage_study(config)
        assert len(report.points) == 5
        assert report.violations == []

    def test_mub_radius(self):
        config = ExperimentConfig(
            scheme="mub", dims=(5,), n_grid=(5000,), trials=500, seed=2, bound="radius", record_timing=False,
        )
        assert run_coverage_study(config).passed

    def test_uniform_trace_norm(self):
        config = ExperimentConfig(
            scheme="uniform", dims=(4,), n_grid=(5000,), trials=500, seed=3,
            epsilons=(0.3, 0.5, 1.0), bound="thm2", record_timing=False,
        )
        assert run_coverage_study(config).passed
