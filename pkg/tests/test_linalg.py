"""
Tests for the Hermitian linear-algebra helpers and random states.
"""

import numpy as np
import pytest

from src.tomography.exceptions import DimensionMismatchError, InvalidStateError
from src.tomography.linalg import (
    DensityMatrix,
    best_rank_r_approximation,
    caricature_state,
    eigh,
    eigvalsh,
    frobenius_distance,
    hermitian,
    haar_random_vector,
    numerical_rank,
    operator_norm,
    random_pure_state,
    random_rank_r_state,
    rank_r_residual,
    rank_r_residuals,
    sampled_operator_norm,
    trace_norm_distance,
)


def random_hermitian(d, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


class TestHermitian:
    """Tests for symmetrization and eigendecomposition"""

    def test_symmetrizes_input(self):
        a = np.array([[1.0, 2.0], [0.0, 3.0]])
        h = hermitian(a)
        assert np.allclose(h, h.conj().T)
        assert h[0, 1] == pytest.approx(1.0)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            hermitian(np.zeros((2, 3)))

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="NaN"):
            hermitian(np.array([[np.nan, 0], [0, 1]]))

    def test_eigenvalues_sorted_non_increasing(self):
        values = eigvalsh(random_hermitian(6, 1))
        assert np.all(np.diff(values) <= 0)

    def test_eigh_reconstructs(self):
        a = random_hermitian(5, 2)
        decomposition = eigh(a)
        assert np.all(np.diff(decomposition.eigenvalues) <= 0)
        assert np.allclose(decomposition.reconstruct(), a, atol=1e-12)

    def test_one_by_one(self):
        decomposition = eigh(np.array([[0.7]]))
        assert decomposition.dim == 1
        assert decomposition.eigenvalues[0] == pytest.approx(0.7)


class TestNorms:
    """Tests for trace, operator and Frobenius distances"""

    def test_trace_distance_of_orthogonal_pure_states(self):
        a = DensityMatrix.from_vector(np.array([1, 0]))
        b = DensityMatrix.from_vector(np.array([0, 1]))
        assert trace_norm_distance(a, b) == pytest.approx(2.0)

    def test_trace_distance_to_self_is_zero(self):
        rho = random_pure_state(4, seed=3)
        assert trace_norm_distance(rho, rho) == pytest.approx(0.0, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            trace_norm_distance(np.eye(2), np.eye(3))

    def test_operator_norm_picks_largest_magnitude(self):
        assert operator_norm(np.diag([0.5, -2.0, 1.0])) == pytest.approx(2.0)

    def test_norm_ordering(self):
        a = random_hermitian(6, 4)
        op = operator_norm(a)
        fro = frobenius_distance(a, np.zeros_like(a))
        tr = trace_norm_distance(a, np.zeros_like(a))
        assert op <= fro + 1e-12
        assert fro <= tr + 1e-12

    def test_sampled_operator_norm_is_lower_bound(self):
        a = random_hermitian(4, 5)
        estimate = sampled_operator_norm(a, samples=2000, seed=0)
        assert estimate <= operator_norm(a) + 1e-12
        assert estimate > 0.5 * operator_norm(a)

    def test_numerical_rank(self):
        assert numerical_rank(np.diag([1.0, 1e-3, 1e-12])) == 2


class TestDensityMatrix:
    """Tests for state validation"""

    def test_rejects_wrong_trace(self):
        with pytest.raises(InvalidStateError, match="Trace"):
            DensityMatrix.from_array(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(InvalidStateError, match="positive semidefinite"):
            DensityMatrix.from_array(np.diag([1.2, -0.2]))

    def test_invalid_state_is_value_error(self):
        with pytest.raises(ValueError):
            DensityMatrix.from_array(np.diag([1.2, -0.2]))

    def test_stored_matrix_is_read_only(self):
        rho = DensityMatrix.maximally_mixed(3)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_maximally_mixed(self):
        rho = DensityMatrix.maximally_mixed(4)
        assert rho.purity() == pytest.approx(0.25)
        assert rho.rank() == 4


class TestRankTruncation:
    """Tests for best rank-r approximation and σ_r"""

    def test_residual_of_diagonal_state(self):
        rho = DensityMatrix.from_array(np.diag([0.5, 0.3, 0.2]))
        assert rank_r_residual(rho, 1) == pytest.approx(0.5)
        assert rank_r_residual(rho, 2) == pytest.approx(0.2)
        assert rank_r_residual(rho, 3) == pytest.approx(0.0)

    def test_residual_matches_truncation_trace(self):
        rho = random_rank_r_state(5, 3, seed=7)
        truncated = best_rank_r_approximation(rho, 2)
        assert np.trace(truncated).real == pytest.approx(1.0 - rank_r_residual(rho, 2))
        assert numerical_rank(truncated) == 2

    def test_residuals_vector(self):
        rho = DensityMatrix.from_array(np.diag([0.5, 0.3, 0.2]))
        assert np.allclose(rank_r_residuals(rho.matrix), [0.5, 0.2, 0.0])

    def test_residuals_non_increasing(self):
        residuals = rank_r_residuals(random_rank_r_state(6, 6, seed=1).matrix)
        assert np.all(np.diff(residuals) <= 1e-15)
        assert residuals[-1] == 0.0

    @pytest.mark.parametrize("r", [0, 4])
    def test_rank_parameter_out_of_range(self, r):
        with pytest.raises(ValueError, match="Rank parameter"):
            rank_r_residual(DensityMatrix.maximally_mixed(3), r)


class TestRandomStates:
    """Tests for seeded random states"""

    def test_haar_vector_is_unit(self):
        assert np.linalg.norm(haar_random_vector(7, seed=0)) == pytest.approx(1.0)

    def test_pure_state_is_reproducible(self):
        a = random_pure_state(5, seed=42)
        b = random_pure_state(5, seed=42)
        assert np.array_equal(a.matrix, b.matrix)
        assert a.rank() == 1

    @pytest.mark.parametrize("d", [2, 5])
    def test_pure_states_average_to_maximally_mixed(self, d):
        samples = 4000
        mean = sum(random_pure_state(d, seed=s).matrix for s in range(samples)) / samples
        # E‖mean − I/d‖₂² = (1 − 1/d) / samples for Haar-random pure states
        standard_error = np.sqrt((1 - 1 / d) / samples)
        assert frobenius_distance(mean, np.eye(d) / d) <= 3 * standard_error

    @pytest.mark.parametrize("d,r", [(2, 1), (4, 2), (6, 6)])
    def test_rank_r_state_has_rank_r(self, d, r):
        rho = random_rank_r_state(d, r, seed=d * 10 + r)
        assert rho.rank() == r
        assert np.trace(rho.matrix).real == pytest.approx(1.0)

    def test_caricature_state_spectrum(self):
        rho = caricature_state(random_pure_state(4, seed=3), 0.2)
        values = rho.eigenvalues()
        assert values[0] == pytest.approx(0.8 + 0.05)
        assert np.allclose(values[1:], 0.05)
        assert rank_r_residual(rho, 1) == pytest.approx(0.15)

    def test_caricature_requires_pure_target(self):
        with pytest.raises(InvalidStateError):
            caricature_state(DensityMatrix.maximally_mixed(2), 0.1)

    def test_caricature_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            caricature_state(random_pure_state(2, seed=0), 1.5)
