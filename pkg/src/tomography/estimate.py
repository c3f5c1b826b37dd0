"""
Projected least squares (PLS) estimation.

Two stages:
1. Linear inversion: the least-squares solution L̂ of the Born-rule equations.
   Closed forms exist for every supported scheme (``ls_structured``,
   ``ls_pauli_observables``, ``ls_pauli_basis``, ``ls_uniform``); ``ls_generic``
   solves the normal equations explicitly and is the reference for all of them.
2. Projection: the Frobenius-nearest density matrix to L̂, obtained by
   thresholding the spectrum, λ ↦ max(λ - x₀, 0), with x₀ chosen so the
   result has unit trace.

``pls_pipeline`` chains simulation, inversion and projection into one
``TrialRecord``.
"""

import logging
import time
from dataclasses import dataclass
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .analyze import BoundParams, TrialRecord, confidence_radius, uniform_confidence_radius
from .exceptions import CompletenessError, NormalizationError, TomographyError
from .linalg import (
    DEFAULT_TOL,
    DensityMatrix,
    as_array,
    eigh,
    frobenius_distance,
    hermitian,
    numerical_rank,
    operator_norm,
    rank_r_residuals,
    trace_norm_distance,
)
from .measurements import (
    BASIS_EIGENVECTORS,
    MeasurementScheme,
    SchemeKind,
    depolarizing_inverse_apply,
    hermitian_operator_basis,
    pauli_matrix,
)
from .simulate import (
    FrequencyTable,
    UniformPovmSample,
    sample_uniform_povm,
    simulate_frequencies,
)

logger = logging.getLogger(__name__)

# Largest dimension for which ls_generic builds the d²×d² normal matrix
GENERIC_MAX_DIM = 16

# Normal matrices with a larger condition number are treated as singular
MAX_CONDITION_NUMBER = 1e10

# Dichotomy tolerance for two-outcome Pauli frequencies
DICHOTOMY_TOL = 1e-12

# Trace precondition of the projection step
PROJECTION_TRACE_TOL = 1e-8

# Single-qubit factors 3|b⟩⟨b| - I of the Pauli-basis estimator, by (letter, bit)
_BASIS_FACTORS = {
    (letter, bit): 3 * np.outer(vec, vec.conj()) - np.eye(2)
    for letter, pair in BASIS_EIGENVECTORS.items()
    for bit, vec in enumerate(pair)
}


@dataclass(frozen=True)
class LinearInversionEstimate:
    """
    Least-squares estimate L̂; Hermitian with unit trace but generally indefinite.

    Attributes:
        matrix: The Hermitian matrix L̂
        kind: Scheme family the data came from
        n: Number of samples, or None for exact probabilities
    """
    matrix: np.ndarray
    kind: SchemeKind
    n: Optional[int] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class PlsEstimate:
    """
    Projected estimate ρ̂ together with its threshold and the input L̂.

    Attributes:
        state: The projected density matrix
        x0: Spectral threshold (0 when L̂ was already a state)
        estimate: The linear-inversion estimate that was projected
    """
    state: DensityMatrix
    x0: float
    estimate: LinearInversionEstimate


def generic_inputs(scheme: MeasurementScheme, table: FrequencyTable) -> Tuple[List[np.ndarray], np.ndarray]:
    """
    Flatten a scheme and its frequencies into ``ls_generic`` inputs.

    Pauli-observable data gets the identity word prepended as a setting with
    effects (I, 0) and frequencies (1, 0).
    """
    _check_table(scheme, table)
    effects: List[np.ndarray] = []
    frequencies: List[np.ndarray] = []
    if scheme.kind is SchemeKind.PAULI_OBSERVABLES:
        effects.extend([np.eye(scheme.d, dtype=complex), np.zeros((scheme.d, scheme.d), dtype=complex)])
        frequencies.append(np.array([1.0, 0.0]))
    for setting, setting_effects in scheme.iter_effects():
        effects.extend(setting_effects)
        frequencies.append(table.frequencies[setting])
    return effects, np.concatenate(frequencies)


def ls_generic(
    effects: Sequence[np.ndarray],
    frequencies: Sequence[float],
    kind: Optional[SchemeKind] = None,
    n: Optional[int] = None,
) -> LinearInversionEstimate:
    """
    Least-squares inversion by explicit solution of the normal equations.

    The effects are expanded in an orthonormal Hermitian operator basis, giving
    a real design matrix A; the estimate solves AᵀA x = Aᵀf.

    Raises:
        CompletenessError: If AᵀA is singular or its condition number exceeds 1e10
        TomographyError: If d exceeds 16
    """
    stacked = np.array([as_array(e) for e in effects])
    f = np.asarray(frequencies, dtype=float)
    if len(stacked) != len(f):
        raise ValueError(f"{len(stacked)} effects but {len(f)} frequencies")
    d = stacked.shape[1]
    if d > GENERIC_MAX_DIM:
        raise TomographyError(f"ls_generic supports d <= {GENERIC_MAX_DIM}, got d={d}")

    basis = np.array(hermitian_operator_basis(d))
    design = np.einsum("mij,aji->ma", stacked, basis).real
    normal = design.T @ design

    condition = float(np.linalg.cond(normal))
    if not np.isfinite(condition) or condition > MAX_CONDITION_NUMBER:
        raise CompletenessError(
            f"Measurement is not tomographically complete (condition number {condition:.3e})",
            condition_number=condition,
        )

    coefficients = scipy.linalg.solve(normal, design.T @ f, assume_a="sym")
    matrix = hermitian(np.tensordot(coefficients, basis, axes=1))
    logger.debug(f"ls_generic: d={d}, {len(f)} effects, condition number {condition:.3e}")
    return LinearInversionEstimate(matrix=matrix, kind=kind, n=n)


def ls_structured(scheme: MeasurementScheme, table: FrequencyTable) -> LinearInversionEstimate:
    """
    Closed-form estimator for 2-design POVMs: L̂ = (d+1) Σ_i f_i |v_i⟩⟨v_i| - I.

    f_i is the count of vector i divided by the total n, so Σ f_i = 1.

    Raises:
        NormalizationError: If the global frequencies do not sum to 1
    """
    _check_kind(scheme, SchemeKind.STRUCTURED)
    _check_table(scheme, table)
    f = table.global_frequencies()
    if abs(f.sum() - 1.0) > DEFAULT_TOL:
        raise NormalizationError(f"Global frequencies sum to {f.sum():.12f}, expected 1")

    v = scheme.vectors
    d = scheme.d
    matrix = (d + 1) * (v.T @ (f[:, None] * v.conj())) - np.eye(d)
    return LinearInversionEstimate(matrix=hermitian(matrix), kind=scheme.kind, n=table.n)


def ls_pauli_observables(scheme: MeasurementScheme, table: FrequencyTable) -> LinearInversionEstimate:
    """
    Closed-form estimator for Pauli observables: L̂ = (1/d) Σ_W (f_W⁺ - f_W⁻) W.

    The identity word enters with f⁺ = 1 and consumes no shots.

    Raises:
        NormalizationError: If some f⁺ + f⁻ differs from 1 by more than 1e-12
    """
    _check_kind(scheme, SchemeKind.PAULI_OBSERVABLES)
    _check_table(scheme, table)
    d = scheme.d
    matrix = np.eye(d, dtype=complex)
    for setting, f in enumerate(table.frequencies):
        if abs(f[0] + f[1] - 1.0) > DICHOTOMY_TOL:
            raise NormalizationError(
                f"Frequencies of word {scheme.setting_label(setting)} sum to {f[0] + f[1]:.15f}, expected 1"
            )
        expectation = f[0] - f[1]
        if expectation != 0.0:
            matrix += expectation * pauli_matrix(scheme.words[setting + 1])
    return LinearInversionEstimate(matrix=hermitian(matrix / d), kind=scheme.kind, n=table.n)


def ls_pauli_basis(scheme: MeasurementScheme, table: FrequencyTable) -> LinearInversionEstimate:
    """
    Closed-form estimator for Pauli basis measurements.

    L̂ = (1/3^k) Σ_{s,o} f_o^(s) ⊗_i (3|b_{o_i}^{(s_i)}⟩⟨b_{o_i}^{(s_i)}| - I),
    built outcome by outcome; outcomes with zero frequency are skipped.
    """
    _check_kind(scheme, SchemeKind.PAULI_BASIS)
    _check_table(scheme, table)
    k = scheme.num_qubits
    matrix = np.zeros((scheme.d, scheme.d), dtype=complex)
    for setting, f in enumerate(table.frequencies):
        _check_setting_sum(f, setting)
        label = scheme.labels[setting]
        for outcome in np.flatnonzero(f):
            bits = [(outcome >> (k - 1 - i)) & 1 for i in range(k)]
            factors = (_BASIS_FACTORS[(letter, bit)] for letter, bit in zip(label, bits))
            matrix += f[outcome] * reduce(np.kron, factors)
    return LinearInversionEstimate(matrix=hermitian(matrix / 3 ** k), kind=scheme.kind, n=table.n)


def ls_pauli_basis_depolarizing(scheme: MeasurementScheme, table: FrequencyTable) -> LinearInversionEstimate:
    """
    Pauli-basis estimator in inverse-channel form.

    L̂ = (1/3^k) (D_{1/3}^{⊗k})^{-1}(Σ_{s,o} f_o^(s) |b_o^(s)⟩⟨b_o^(s)|).
    """
    _check_kind(scheme, SchemeKind.PAULI_BASIS)
    _check_table(scheme, table)
    accumulated = np.zeros((scheme.d, scheme.d), dtype=complex)
    for setting, f in enumerate(table.frequencies):
        _check_setting_sum(f, setting)
        v = scheme.setting_vectors(setting)
        accumulated += v.T @ (f[:, None] * v.conj())
    matrix = depolarizing_inverse_apply(accumulated) / 3 ** scheme.num_qubits
    return LinearInversionEstimate(matrix=hermitian(matrix), kind=scheme.kind, n=table.n)


def ls_uniform(sample: UniformPovmSample) -> LinearInversionEstimate:
    """Empirical mean of (d+1)|v⟩⟨v| - I over uniform-POVM outcomes."""
    if sample.n < 1:
        raise ValueError("Uniform-POVM sample cannot be empty")
    v = sample.vectors
    d = sample.d
    matrix = (d + 1) * (v.T @ v.conj()) / sample.n - np.eye(d)
    return LinearInversionEstimate(matrix=hermitian(matrix), kind=SchemeKind.UNIFORM, n=sample.n)


def linear_inversion(
    scheme: MeasurementScheme,
    data: Union[FrequencyTable, UniformPovmSample],
) -> LinearInversionEstimate:
    """
    Dispatch to the closed-form estimator of the scheme's family.

    Structured vector sets that are not 2-designs go through ``ls_generic``.

    Raises:
        CompletenessError: If such a vector set is not tomographically complete
    """
    if scheme.kind is SchemeKind.UNIFORM:
        if not isinstance(data, UniformPovmSample):
            raise TypeError("Uniform-POVM estimation needs a UniformPovmSample")
        return ls_uniform(data)
    if not isinstance(data, FrequencyTable):
        raise TypeError(f"Scheme '{scheme.name}' needs a FrequencyTable")
    if scheme.kind is SchemeKind.STRUCTURED and not scheme.design:
        logger.debug("Vector set is not a 2-design; using generic least squares")
        effects, frequencies = generic_inputs(scheme, data)
        return ls_generic(effects, frequencies, kind=scheme.kind, n=data.n)

    estimators = {
        SchemeKind.STRUCTURED: ls_structured,
        SchemeKind.PAULI_OBSERVABLES: ls_pauli_observables,
        SchemeKind.PAULI_BASIS: ls_pauli_basis,
    }
    return estimators[scheme.kind](scheme, data)


def simplex_threshold(eigenvalues: Sequence[float]) -> float:
    """
    Threshold x₀ with Σ_i max(λ_i - x₀, 0) = 1, by sort-and-scan.

    With λ sorted non-increasing and c_j = Σ_{i≤j} λ_i, x₀ = (c_j - 1)/j for
    the largest j such that λ_j > (c_j - 1)/j.
    """
    values = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
    cumulative = np.cumsum(values) - 1.0
    ranks = np.arange(1, len(values) + 1)
    kept = np.flatnonzero(values > cumulative / ranks)
    j = kept[-1]
    return float(cumulative[j] / (j + 1))


def project_to_states(estimate: Union[LinearInversionEstimate, np.ndarray]) -> PlsEstimate:
    """
    Frobenius-nearest density matrix to a unit-trace Hermitian estimate.

    The eigenvalues are shifted by a common x₀ and clipped at zero. Degenerate
    eigenspaces need no tie-breaking since the map acts on eigenvalues only.

    Raises:
        NormalizationError: If |tr(L̂) - 1| exceeds 1e-8
    """
    if not isinstance(estimate, LinearInversionEstimate):
        estimate = LinearInversionEstimate(matrix=hermitian(estimate), kind=None)
    if abs(estimate.trace - 1.0) > PROJECTION_TRACE_TOL:
        raise NormalizationError(f"Projection needs a unit-trace input, got trace {estimate.trace:.12f}")

    decomposition = eigh(estimate.matrix)
    values = decomposition.eigenvalues
    if values[-1] >= -DEFAULT_TOL:
        x0 = 0.0
        spectrum = np.maximum(values, 0.0)
    else:
        x0 = simplex_threshold(values)
        spectrum = np.maximum(values - x0, 0.0)
    spectrum = spectrum / spectrum.sum()

    logger.debug(f"Projection: d={decomposition.dim}, x0={x0:.3e}, min eigenvalue {values[-1]:.3e}")
    state = DensityMatrix.from_array(decomposition.reconstruct(spectrum))
    return PlsEstimate(state=state, x0=x0, estimate=estimate)


@dataclass(frozen=True)
class PipelineRun:
    """Every intermediate of one PLS run."""
    rho: DensityMatrix
    scheme: MeasurementScheme
    data: Union[FrequencyTable, UniformPovmSample]
    estimate: LinearInversionEstimate
    pls: PlsEstimate
    runtime_ms: float
    projection_ms: float


def run_pipeline(
    rho: DensityMatrix,
    scheme: MeasurementScheme,
    n: Optional[int],
    seed: Optional[int] = None,
) -> PipelineRun:
    """
    Simulate data, invert and project.

    Args:
        rho: True state
        scheme: Measurement scheme
        n: Total number of samples, or None for exact probabilities
            (not available for the uniform POVM)
        seed: Sampling seed
    """
    if rho.dim != scheme.d:
        raise ValueError(f"State dimension {rho.dim} does not match scheme dimension {scheme.d}")
    if n is not None and n < scheme.settings:
        raise ValueError(
            f"n={n} is smaller than the {scheme.settings} settings of '{scheme.name}'; "
            f"every setting needs at least one shot"
        )
    start = time.perf_counter()
    if scheme.kind is SchemeKind.UNIFORM:
        if n is None:
            raise TomographyError("The uniform POVM has no exact-probability shortcut")
        data = sample_uniform_povm(rho, n, seed)
    else:
        data = simulate_frequencies(rho, scheme, n, seed)
    estimate = linear_inversion(scheme, data)

    projection_start = time.perf_counter()
    pls = project_to_states(estimate)
    end = time.perf_counter()

    return PipelineRun(
        rho=rho,
        scheme=scheme,
        data=data,
        estimate=estimate,
        pls=pls,
        runtime_ms=(end - start) * 1000.0,
        projection_ms=(end - projection_start) * 1000.0,
    )


def record_trial(run: PipelineRun, n: int, seed: Optional[int], trial: int = 0) -> TrialRecord:
    """Summarize a pipeline run as a TrialRecord."""
    rho = run.rho.matrix
    rho_hat = run.pls.state.matrix
    rank_estimate = numerical_rank(rho_hat)

    params = BoundParams.for_scheme(run.scheme, n, delta=0.05)
    if run.scheme.is_continuous:
        radius = uniform_confidence_radius(params, rank_estimate)
    else:
        radius = confidence_radius(params, rank_estimate)

    return TrialRecord(
        scheme=run.scheme.name,
        d=run.scheme.d,
        r_true=numerical_rank(rho),
        n=n,
        trial=trial,
        seed=seed,
        trace_error=trace_norm_distance(rho_hat, rho),
        op_error_L=operator_norm(run.estimate.matrix - rho),
        op_error_rho=operator_norm(rho_hat - rho),
        frobenius_error=frobenius_distance(rho_hat, rho),
        x0=run.pls.x0,
        rank_estimate=rank_estimate,
        sigma_r_rho=tuple(rank_r_residuals(rho)),
        sigma_r_est=tuple(rank_r_residuals(rho_hat)),
        radius_delta05=radius,
        runtime_ms=run.runtime_ms,
        projection_ms=run.projection_ms,
    )


def pls_pipeline(
    rho: DensityMatrix,
    scheme: MeasurementScheme,
    n: int,
    seed: Optional[int] = None,
    exact: bool = False,
    trial: int = 0,
) -> TrialRecord:
    """
    One simulated PLS tomography run.

    Args:
        rho: True state
        scheme: Measurement scheme
        n: Total number of samples (recorded even when ``exact`` is set)
        seed: Sampling seed; identical seeds give identical records
        exact: Use exact Born probabilities instead of sampled frequencies
        trial: Trial index stored in the record
    """
    run = run_pipeline(rho, scheme, None if exact else n, seed)
    return record_trial(run, n, seed, trial)


def _check_kind(scheme: MeasurementScheme, kind: SchemeKind) -> None:
    if scheme.kind is not kind:
        raise TomographyError(f"Estimator for '{kind.value}' called with scheme '{scheme.name}'")


def _check_table(scheme: MeasurementScheme, table: FrequencyTable) -> None:
    if table.settings != scheme.settings:
        raise ValueError(f"Frequency table has {table.settings} settings, scheme has {scheme.settings}")


def _check_setting_sum(f: np.ndarray, setting: int) -> None:
    if abs(f.sum() - 1.0) > DEFAULT_TOL:
        raise NormalizationError(f"Frequencies of setting {setting} sum to {f.sum():.12f}, expected 1")
