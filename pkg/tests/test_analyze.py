"""
Tests for bound formulas, inequality checks and coverage statistics.
"""

import math

import numpy as np
import pytest

from src.tomography.analyze import (
    BoundParams,
    TrialRecord,
    binomial_slack,
    caricature_sample_savings,
    confidence_radius,
    coverage_check,
    design_second_moment_check,
    essential_opnorm_tail,
    lemma2_rank_comparison_check,
    opnorm_tau_range,
    pauli_basis_second_moment_check,
    prop1_conversion_check,
    sample_complexity,
    thm1_tail,
    thm2_tail,
    thm4_effective_rank_check,
    uniform_confidence_radius,
    uniform_opnorm_tail,
)
from src.tomography.estimate import pls_pipeline, run_pipeline
from src.tomography.exceptions import DomainError
from src.tomography.linalg import (
    DensityMatrix,
    caricature_state,
    random_pure_state,
    random_rank_r_state,
)
from src.tomography.measurements import (
    SchemeKind,
    build_mub_scheme,
    build_pauli_basis_scheme,
)


def make_record(trace_error, sigma_rho=(0.0, 0.0), sigma_est=(0.0, 0.0), n=1000, d=2):
    return TrialRecord(
        scheme="structured", d=d, r_true=1, n=n, trial=0, seed=0,
        trace_error=trace_error, op_error_L=0.0, op_error_rho=0.0, frobenius_error=0.0,
        x0=0.0, rank_estimate=1, sigma_r_rho=tuple(sigma_rho), sigma_r_est=tuple(sigma_est),
        radius_delta05=0.0,
    )


class TestBoundParams:
    """Tests for parameter validation"""

    @pytest.mark.parametrize("kwargs", [
        {"d": 0, "n": 10},
        {"d": 4, "n": 0},
        {"d": 4, "n": 10, "r": 5},
        {"d": 4, "n": 10, "epsilon": -0.1},
        {"d": 4, "n": 10, "delta": 1.0},
        {"d": 4, "n": 10, "delta": 0.0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            BoundParams(**kwargs)

    def test_for_scheme(self):
        p = BoundParams.for_scheme(build_mub_scheme(5), 100, r=2)
        assert p.g_of_d == 10
        assert p.kind is SchemeKind.STRUCTURED
        assert p.r == 2

    def test_missing_g(self):
        with pytest.raises(DomainError, match="g"):
            thm1_tail(BoundParams(d=4, n=10, epsilon=0.5))


class TestTraceNormTail:
    """Tests for the trace-norm tail bound"""

    def test_zero_epsilon(self):
        assert thm1_tail(BoundParams(d=5, n=1000, epsilon=0.0, g_of_d=10)) == 5

    def test_value_one_by_construction(self):
        n = 43 * 10 * math.log(5) / 0.25
        assert thm1_tail(BoundParams(d=5, n=n, epsilon=0.5, g_of_d=10)) == pytest.approx(1.0)

    def test_decreasing_in_n(self):
        values = [thm1_tail(BoundParams(d=5, n=n, epsilon=0.3, g_of_d=10)) for n in (1e3, 1e4, 1e5)]
        assert values[0] > values[1] > values[2]

    def test_epsilon_above_one(self):
        with pytest.raises(DomainError, match="epsilon"):
            thm1_tail(BoundParams(d=5, n=1000, epsilon=1.5, g_of_d=10))

    def test_pauli_basis_factor_close_to_quoted_power(self):
        for k in range(1, 11):
            d = 2 ** k
            assert d ** 1.58 <= 3 ** k <= d ** 1.585


class TestConfidenceRadius:
    """Tests for confidence radii"""

    def test_reference_value(self):
        radius = confidence_radius(BoundParams(d=5, n=1e5, delta=0.05, g_of_d=10), 1)
        assert radius == pytest.approx(math.sqrt(430 * math.log(100) / 1e5))
        assert radius == pytest.approx(0.1407, abs=1e-4)

    def test_scaling(self):
        a = confidence_radius(BoundParams(d=5, n=1000, g_of_d=10), 2)
        b = confidence_radius(BoundParams(d=5, n=4000, g_of_d=10), 2)
        assert b == pytest.approx(a / 2)

    def test_linear_in_rank(self):
        p = BoundParams(d=5, n=1000, g_of_d=10)
        assert confidence_radius(p, 3) == pytest.approx(3 * confidence_radius(p, 1))

    def test_uniform_radius_inverts_tail(self):
        p = BoundParams(d=4, n=1e6, delta=0.05)
        radius = uniform_confidence_radius(p, 1)
        assert thm2_tail(BoundParams(d=4, n=1e6, epsilon=radius)) == pytest.approx(0.05)


class TestSampleComplexity:
    """Tests for the sample-complexity formula"""

    def test_reference_value(self):
        p = BoundParams(d=5, n=1, epsilon=0.1, delta=0.05, g_of_d=10)
        assert sample_complexity(p) == math.ceil(43000 * math.log(100))

    def test_rank_squared(self):
        one = sample_complexity(BoundParams(d=5, n=1, r=1, epsilon=0.2, g_of_d=10))
        two = sample_complexity(BoundParams(d=5, n=1, r=2, epsilon=0.2, g_of_d=10))
        assert abs(two - 4 * one) <= 4

    def test_needs_positive_epsilon(self):
        with pytest.raises(DomainError):
            sample_complexity(BoundParams(d=5, n=1, g_of_d=10))

    def test_caricature_savings(self):
        savings = caricature_sample_savings(d=4, g=8, p=0.05, epsilon=0.2, delta=0.05)
        assert savings.guaranteed_error == pytest.approx(0.3)
        assert savings.effective_rank == math.ceil(43 * 8 / 0.04 * math.log(80))
        assert savings.full_rank >= 16 * savings.effective_rank - 16


class TestOperatorNormTails:
    """Tests for the operator-norm tails"""

    def test_zero_tau(self):
        p = BoundParams(d=5, n=100, tau=0.0, g_of_d=10, kind=SchemeKind.STRUCTURED)
        assert essential_opnorm_tail(p) == 5

    def test_structured_specialization(self):
        n = 5000
        p = BoundParams(d=4, n=n, tau=1.0, g_of_d=8, kind=SchemeKind.STRUCTURED)
        assert essential_opnorm_tail(p) == pytest.approx(4 * math.exp(-3 * n / (16 * 4)))

    def test_tau_ranges(self):
        assert opnorm_tau_range(SchemeKind.STRUCTURED, 5) == (0.0, 2.0)
        assert opnorm_tau_range(SchemeKind.PAULI_OBSERVABLES, 8) == (0.0, 4.0)
        assert opnorm_tau_range(SchemeKind.PAULI_BASIS, 8) == (0.0, 1.0)

    def test_tau_out_of_range(self):
        with pytest.raises(DomainError, match="tau"):
            essential_opnorm_tail(BoundParams(d=4, n=10, tau=1.5, g_of_d=27, kind=SchemeKind.PAULI_BASIS))

    def test_uniform_opnorm_tail(self):
        value = uniform_opnorm_tail(BoundParams(d=3, n=1e5, tau=0.5))
        assert value == pytest.approx(2 * math.exp(2 * math.log(3) * 3 - 1e5 * 0.25 / 480))


class TestUniformTail:
    """Tests for the uniform-POVM trace-norm tail"""

    def test_balanced_exponent(self):
        d, r, eps = 4, 1, 0.5
        n = 2.2 * d * 480 * r ** 2 / eps ** 2
        assert thm2_tail(BoundParams(d=d, n=n, r=r, epsilon=eps)) == pytest.approx(1.0)

    def test_reference_value(self):
        value = thm2_tail(BoundParams(d=4, n=1e5, epsilon=0.8))
        assert math.log(value) == pytest.approx(8.8 - 0.64e5 / 480)

    def test_shape(self):
        base = thm2_tail(BoundParams(d=4, n=1e4, epsilon=0.5))
        assert thm2_tail(BoundParams(d=4, n=2e4, epsilon=0.5)) < base
        assert thm2_tail(BoundParams(d=5, n=1e4, epsilon=0.5)) > base

    def test_needs_positive_epsilon(self):
        with pytest.raises(DomainError):
            thm2_tail(BoundParams(d=4, n=100))


class TestInequalityChecks:
    """Tests for the deterministic conversion inequalities"""

    def test_lemma2_equal_states(self):
        rho = random_pure_state(3, seed=0)
        check = lemma2_rank_comparison_check(rho, rho, 1)
        assert check.lhs == pytest.approx(0.0, abs=1e-12)
        assert check.holds

    def test_lemma2_orthogonal_pure_states(self):
        a = DensityMatrix.from_vector(np.array([1, 0]))
        b = DensityMatrix.from_vector(np.array([0, 1]))
        check = lemma2_rank_comparison_check(a, b, 1)
        assert check.lhs == pytest.approx(2.0)
        assert check.rhs == pytest.approx(2.0)
        assert check.holds

    def test_lemma2_random_pairs(self):
        rng = np.random.default_rng(0)
        for i in range(1000):
            d = int(rng.integers(2, 9))
            rho = random_rank_r_state(d, int(rng.integers(1, d + 1)), seed=rng.integers(2 ** 32))
            sigma = random_rank_r_state(d, int(rng.integers(1, d + 1)), seed=rng.integers(2 ** 32))
            for r in range(1, d + 1):
                assert lemma2_rank_comparison_check(rho, sigma, r).holds

    def test_prop1_identity(self):
        rho = random_pure_state(3, seed=1)
        check = prop1_conversion_check(0.0, rho, rho, 1)
        assert check.lhs == pytest.approx(0.0, abs=1e-12)
        assert check.holds

    def test_prop1_on_pipeline_runs(self):
        scheme = build_mub_scheme(3)
        for trial in range(50):
            rho = random_rank_r_state(3, 1 + trial % 3, seed=trial)
            run = run_pipeline(rho, scheme, 100, seed=trial)
            tau = float(np.max(np.abs(np.linalg.eigvalsh(run.estimate.matrix - rho.matrix))))
            for r in (1, 2, 3):
                assert prop1_conversion_check(tau, rho, run.pls.state, r).holds

    def test_rank_out_of_range(self):
        rho = random_pure_state(2, seed=0)
        with pytest.raises(DomainError):
            lemma2_rank_comparison_check(rho, rho, 3)


class TestCoverageStatistics:
    """Tests for failure frequencies against bounds"""

    def test_slack(self):
        assert binomial_slack(0.5, 100) == pytest.approx(0.15)
        assert binomial_slack(2.0, 100) == 0.0

    def test_within_slack(self):
        check = coverage_check(12, 100, 0.1)
        assert check.holds
        assert check.empirical_failure == pytest.approx(0.12)

    def test_violation(self):
        assert not coverage_check(30, 100, 0.1).holds

    def test_vacuous(self):
        check = coverage_check(100, 100, 3.0)
        assert check.holds
        assert check.vacuous

    def test_effective_rank_check_counts_failures(self):
        trials = [
            make_record(0.5, sigma_rho=(0.1, 0.0), sigma_est=(0.2, 0.0)),
            make_record(0.05, sigma_rho=(0.1, 0.0), sigma_est=(0.2, 0.0)),
        ]
        check = thm4_effective_rank_check(trials, r=1, epsilon=0.2)
        assert check.empirical_failure == pytest.approx(0.5)
        assert check.bound == pytest.approx(2 * math.exp(-1000 * 0.04 / (43 * 4)))

    def test_effective_rank_check_rejects_mixed_batches(self):
        with pytest.raises(ValueError, match="share"):
            thm4_effective_rank_check([make_record(0.1), make_record(0.1, n=2000)], 1, 0.5)

    def test_effective_rank_huge_n_never_fails(self):
        scheme = build_mub_scheme(3)
        rho = random_pure_state(3, seed=0)
        trials = [pls_pipeline(rho, scheme, 200_000, seed=s) for s in range(10)]
        check = thm4_effective_rank_check(trials, r=1, epsilon=1.0)
        assert check.empirical_failure == 0.0

    @pytest.mark.slow
    def test_caricature_effective_rank_coverage(self):
        scheme = build_pauli_basis_scheme(2)
        n = 20_000
        trials = []
        for t in range(500):
            rho = caricature_state(random_pure_state(4, seed=t), 0.2)
            trials.append(pls_pipeline(rho, scheme, n, seed=10_000 + t))
        for epsilon in (0.3, 0.6, 1.0):
            assert thm4_effective_rank_check(trials, r=1, epsilon=epsilon).holds

    @pytest.mark.slow
    def test_operator_norm_tail_coverage(self):
        scheme = build_mub_scheme(5)
        n, tau = 2000, 0.6
        failures = 0
        for t in range(2000):
            record = pls_pipeline(random_pure_state(5, seed=t), scheme, n, seed=50_000 + t)
            failures += record.op_error_L >= tau
        p = BoundParams.for_scheme(scheme, n, tau=tau)
        assert coverage_check(failures, 2000, essential_opnorm_tail(p)).holds


class TestSecondMoments:
    """Tests for exact second-moment identities"""

    def test_mub_d2_random_state(self):
        rho = random_rank_r_state(2, 2, seed=3)
        assert design_second_moment_check(build_mub_scheme(2), rho) < 1e-10

    def test_mub_d7_maximally_mixed(self):
        assert design_second_moment_check(build_mub_scheme(7), DensityMatrix.maximally_mixed(7)) < 1e-10

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_pauli_basis(self, k):
        rho = random_rank_r_state(2 ** k, 1, seed=k)
        assert pauli_basis_second_moment_check(build_pauli_basis_scheme(k), rho) < 1e-10
