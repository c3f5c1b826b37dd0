"""
Error bounds for PLS tomography and checks against simulated trials.

Tail bounds (probability that the estimator misses by more than ε or τ):
- ``thm1_tail``: trace-norm error, d·exp(-nε² / (43 g(d) r²))
- ``essential_opnorm_tail``: operator-norm error of L̂, d·exp(-3nτ² / (8 g(d)))
- ``thm2_tail`` / ``uniform_opnorm_tail``: the uniform POVM

Derived quantities: confidence radii, sample complexities and the
caricature-state sample savings. Conversion checks evaluate both sides of the
deterministic inequalities that turn operator-norm closeness into trace-norm
closeness.

Bound values above 1 are returned as-is; callers treat them as vacuous.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .exceptions import DomainError
from .linalg import (
    MatrixLike,
    as_array,
    operator_norm,
    rank_r_residuals,
    trace_norm_distance,
)
from .measurements import (
    MeasurementScheme,
    SchemeKind,
    depolarizing_apply,
    depolarizing_inverse_apply,
    dimension_factor,
)

logger = logging.getLogger(__name__)

# Constant of the trace-norm tail bound and its sample complexity
TRACE_BOUND_CONSTANT = 43.0

# Uniform-POVM constants: exponent 2.2d in the trace bound, c1 = 2 log 3 and
# c2 = 1/480 in the operator-norm bound
UNIFORM_DIM_CONSTANT = 2.2
UNIFORM_C1 = 2.0 * math.log(3.0)
UNIFORM_SAMPLE_CONSTANT = 480.0

# Slack for "lhs ≤ rhs" comparisons of deterministic inequalities
CHECK_TOL = 1e-9


@dataclass(frozen=True)
class BoundParams:
    """
    Parameters of a bound evaluation.

    Attributes:
        d: Dimension
        n: Total number of samples (real-valued to allow solving for n)
        r: Rank parameter in [1, d]
        epsilon: Trace-norm accuracy
        tau: Operator-norm accuracy
        delta: Failure probability in (0, 1)
        g_of_d: Scheme dimension factor (None for the uniform POVM)
        kind: Scheme family, used to pick the operator-norm τ range
    """
    d: int
    n: float
    r: int = 1
    epsilon: float = 0.0
    tau: float = 0.0
    delta: float = 0.05
    g_of_d: Optional[float] = None
    kind: Optional[SchemeKind] = None

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"Dimension must be positive, got {self.d}")
        if self.n <= 0:
            raise DomainError(f"Number of samples must be positive, got {self.n}")
        if not 1 <= self.r <= self.d:
            raise DomainError(f"Rank parameter r={self.r} must lie in [1, {self.d}]")
        if self.epsilon < 0 or self.tau < 0:
            raise DomainError("Accuracies epsilon and tau must be non-negative")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"Failure probability delta={self.delta} must lie in (0, 1)")

    @classmethod
    def for_scheme(cls, scheme: MeasurementScheme, n: float, **kwargs) -> "BoundParams":
        """Params with g(d) and kind filled in from a scheme."""
        g = None if scheme.is_continuous else scheme.g_of_d
        return cls(d=scheme.d, n=n, g_of_d=g, kind=scheme.kind, **kwargs)

    def require_g(self) -> float:
        if self.g_of_d is None:
            raise DomainError("This bound needs the scheme dimension factor g(d)")
        return self.g_of_d


@dataclass(frozen=True)
class TrialRecord:
    """
    One simulated tomography run.

    Attributes:
        scheme: Scheme family name
        d: Dimension
        r_true: Numerical rank of the true state
        n: Total samples
        trial: Trial index within its (d, n) grid point
        seed: Sampling seed
        trace_error: ‖ρ̂ - ρ‖₁
        op_error_L: ‖L̂ - ρ‖∞
        op_error_rho: ‖ρ̂ - ρ‖∞
        frobenius_error: ‖ρ̂ - ρ‖₂
        x0: Projection threshold
        rank_estimate: Numerical rank of ρ̂
        sigma_r_rho: σ_r(ρ) for r = 1..d
        sigma_r_est: σ_r(ρ̂) for r = 1..d
        radius_delta05: Confidence radius at δ = 0.05
        runtime_ms: Wall time of the whole pipeline
        projection_ms: Wall time of the projection step
    """
    scheme: str
    d: int
    r_true: int
    n: int
    trial: int
    seed: Optional[int]
    trace_error: float
    op_error_L: float
    op_error_rho: float
    frobenius_error: float
    x0: float
    rank_estimate: int
    sigma_r_rho: Tuple[float, ...]
    sigma_r_est: Tuple[float, ...]
    radius_delta05: float
    runtime_ms: float = 0.0
    projection_ms: float = 0.0

    def min_residual(self, r: int) -> float:
        """min{σ_r(ρ), σ_r(ρ̂)}."""
        return min(self.sigma_r_rho[r - 1], self.sigma_r_est[r - 1])


@dataclass(frozen=True)
class InequalityCheck:
    """Both sides of a deterministic inequality lhs ≤ rhs."""
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class CoverageCheck:
    """Empirical failure frequency of a batch of trials against a tail bound."""
    empirical_failure: float
    bound: float
    holds: bool
    trials: int

    @property
    def vacuous(self) -> bool:
        return self.bound >= 1.0


def thm1_tail(p: BoundParams) -> float:
    """
    Trace-norm tail bound Pr[‖ρ̂ - ρ‖₁ ≥ ε] ≤ d·exp(-nε² / (43 g(d) r²)).

    Raises:
        DomainError: If ε lies outside [0, 1]
    """
    if p.epsilon > 1.0:
        raise DomainError(f"Trace-norm bound is stated for epsilon in [0, 1], got {p.epsilon}")
    g = p.require_g()
    return p.d * math.exp(-p.n * p.epsilon ** 2 / (TRACE_BOUND_CONSTANT * g * p.r ** 2))


def confidence_radius(p: BoundParams, rank_estimate: int) -> float:
    """Radius rank(ρ̂)·sqrt(43 g(d) log(d/δ) / n) of the trace-norm confidence ball."""
    g = p.require_g()
    return rank_estimate * math.sqrt(TRACE_BOUND_CONSTANT * g * math.log(p.d / p.delta) / p.n)


def uniform_confidence_radius(p: BoundParams, rank_estimate: int) -> float:
    """Confidence radius for the uniform POVM, from inverting ``thm2_tail`` = δ."""
    return rank_estimate * math.sqrt(
        UNIFORM_SAMPLE_CONSTANT * (UNIFORM_DIM_CONSTANT * p.d + math.log(1.0 / p.delta)) / p.n
    )


def sample_complexity(p: BoundParams) -> int:
    """
    Samples sufficient for ‖ρ̂ - ρ‖₁ ≤ ε with probability 1 - δ.

    Returns:
        ceil(43 g(d) r² log(d/δ) / ε²)
    """
    if p.epsilon <= 0:
        raise DomainError("Sample complexity needs epsilon > 0")
    g = p.require_g()
    return math.ceil(TRACE_BOUND_CONSTANT * g * p.r ** 2 / p.epsilon ** 2 * math.log(p.d / p.delta))


def opnorm_tau_range(kind: Optional[SchemeKind], d: int) -> Tuple[float, float]:
    """Subgaussian τ range of the operator-norm bound for a scheme family."""
    if kind is SchemeKind.STRUCTURED:
        return 0.0, 2.0
    if kind is SchemeKind.PAULI_OBSERVABLES:
        return 0.0, d / 2.0
    return 0.0, 1.0


def essential_opnorm_tail(p: BoundParams) -> float:
    """
    Operator-norm tail Pr[‖L̂ - ρ‖∞ ≥ τ] ≤ d·exp(-3nτ² / (8 g(d))).

    Raises:
        DomainError: If τ lies outside the scheme's subgaussian range
    """
    low, high = opnorm_tau_range(p.kind, p.d)
    if not low <= p.tau <= high:
        raise DomainError(f"Operator-norm bound is stated for tau in [{low}, {high}], got {p.tau}")
    g = p.require_g()
    return p.d * math.exp(-3.0 * p.n * p.tau ** 2 / (8.0 * g))


def thm2_tail(p: BoundParams) -> float:
    """Uniform-POVM trace-norm tail exp(2.2d - ε²n / (480 r²))."""
    if p.epsilon <= 0:
        raise DomainError("Uniform-POVM bound needs epsilon > 0")
    return math.exp(UNIFORM_DIM_CONSTANT * p.d - p.epsilon ** 2 * p.n / (UNIFORM_SAMPLE_CONSTANT * p.r ** 2))


def uniform_opnorm_tail(p: BoundParams) -> float:
    """Uniform-POVM operator-norm tail 2·exp(2 log(3) d - nτ²/480)."""
    return 2.0 * math.exp(UNIFORM_C1 * p.d - p.n * p.tau ** 2 / UNIFORM_SAMPLE_CONSTANT)


@dataclass(frozen=True)
class SampleSavings:
    """Sample requirements for a nearly pure state, full-rank vs effective rank 1."""
    full_rank: int
    effective_rank: int
    guaranteed_error: float


def caricature_sample_savings(d: int, g: float, p: float, epsilon: float, delta: float) -> SampleSavings:
    """
    Compare sample requirements for the faulty-preparation state (1-p)|ψ⟩⟨ψ| + (p/d)I.

    Treating the state as full rank costs 43 g d² log(d/δ)/ε² samples;
    treating it as effectively rank one costs 43 g log(d/δ)/ε² and
    guarantees error ε + 2p.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Failure probability p={p} must lie in [0, 1]")
    full = sample_complexity(BoundParams(d=d, n=1, r=d, epsilon=epsilon, delta=delta, g_of_d=g))
    effective = sample_complexity(BoundParams(d=d, n=1, r=1, epsilon=epsilon, delta=delta, g_of_d=g))
    return SampleSavings(full_rank=full, effective_rank=effective, guaranteed_error=epsilon + 2.0 * p)


def _min_residual(a: np.ndarray, b: np.ndarray, r: int) -> float:
    if not 1 <= r <= a.shape[0]:
        raise DomainError(f"Rank parameter r={r} must lie in [1, {a.shape[0]}]")
    return float(min(rank_r_residuals(a)[r - 1], rank_r_residuals(b)[r - 1]))


def prop1_conversion_check(tau: float, rho: MatrixLike, rho_hat: MatrixLike, r: int) -> InequalityCheck:
    """
    Check ‖ρ̂ - ρ‖₁ ≤ 4rτ + 2 min{σ_r(ρ), σ_r(ρ̂)}.

    τ must dominate ‖L̂ - ρ‖∞ of the trial; the realized value is the tightest choice.
    """
    a, b = as_array(rho), as_array(rho_hat)
    lhs = trace_norm_distance(b, a)
    rhs = 4.0 * r * tau + 2.0 * _min_residual(a, b, r)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + CHECK_TOL)


def lemma2_rank_comparison_check(rho: MatrixLike, sigma: MatrixLike, r: int) -> InequalityCheck:
    """Check ‖ρ - σ‖₁ ≤ 2r‖ρ - σ‖∞ + 2 min{σ_r(ρ), σ_r(σ)}."""
    a, b = as_array(rho), as_array(sigma)
    lhs = trace_norm_distance(a, b)
    rhs = 2.0 * r * operator_norm(a - b) + 2.0 * _min_residual(a, b, r)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + CHECK_TOL)


def binomial_slack(bound: float, trials: int) -> float:
    """One-sided slack 3·sqrt(b(1-b)/N) for comparing a frequency with a bound."""
    b = min(max(bound, 0.0), 1.0)
    return 3.0 * math.sqrt(b * (1.0 - b) / trials)


def coverage_check(failures: int, trials: int, bound: float) -> CoverageCheck:
    """Compare a failure count with a tail bound; bounds ≥ 1 pass vacuously."""
    if trials < 1:
        raise ValueError("Coverage check needs at least one trial")
    frequency = failures / trials
    holds = bound >= 1.0 or frequency <= bound + binomial_slack(bound, trials)
    return CoverageCheck(empirical_failure=frequency, bound=bound, holds=holds, trials=trials)


def thm4_effective_rank_check(trials: Sequence[TrialRecord], r: int, epsilon: float) -> CoverageCheck:
    """
    Effective-rank coverage for a batch of trials sharing scheme, state and n.

    A trial fails when ‖ρ̂ - ρ‖₁ ≥ ε + 2 min{σ_r(ρ), σ_r(ρ̂)}; the failure
    frequency is compared with d·exp(-nε² / (43 g(d) r²)).
    """
    if not trials:
        raise ValueError("Effective-rank check needs at least one trial")
    first = trials[0]
    if any((t.scheme, t.d, t.n) != (first.scheme, first.d, first.n) for t in trials):
        raise ValueError("Trials in a batch must share scheme, dimension and n")

    kind = SchemeKind(first.scheme)
    params = BoundParams(d=first.d, n=first.n, r=r, epsilon=epsilon, g_of_d=dimension_factor(kind, first.d))
    bound = thm1_tail(params)
    failures = sum(t.trace_error >= epsilon + 2.0 * t.min_residual(r) for t in trials)
    return coverage_check(failures, len(trials), bound)


def design_second_moment_check(scheme: MeasurementScheme, rho: MatrixLike) -> float:
    """
    Deviation of E[X²] from (d-1)(ρ + I) + I for a 2-design POVM.

    X = (d+1)|v⟩⟨v| - I is drawn with probability (d/m)⟨v|ρ|v⟩; the
    expectation is summed exactly.
    """
    r = as_array(rho)
    v = scheme.vectors
    m, d = v.shape
    probabilities = d / m * np.einsum("mi,ij,mj->m", v.conj(), r, v).real
    identity = np.eye(d)
    second_moment = np.zeros((d, d), dtype=complex)
    for p, vec in zip(probabilities, v):
        x = (d + 1) * np.outer(vec, vec.conj()) - identity
        second_moment += p * (x @ x)
    expected = (d - 1) * (r + identity) + identity
    return operator_norm(second_moment - expected)


def pauli_basis_second_moment_check(scheme: MeasurementScheme, rho: MatrixLike) -> float:
    """
    Deviation of the setting-averaged E[(X^(s))²] from 5^k D_{1/5}^{⊗k}(ρ).

    X^(s) = ⊗_i (3|b_{o_i}⟩⟨b_{o_i}| - I) with outcome probabilities ⟨b_o|ρ|b_o⟩.
    """
    r = as_array(rho)
    k = scheme.num_qubits
    averaged = np.zeros((scheme.d, scheme.d), dtype=complex)
    for setting in range(scheme.settings):
        vectors = scheme.setting_vectors(setting)
        probabilities = np.einsum("oi,ij,oj->o", vectors.conj(), r, vectors).real
        for p, vec in zip(probabilities, vectors):
            projector = np.outer(vec, vec.conj())
            x = depolarizing_inverse_apply(projector)
            averaged += p * (x @ x)
    averaged /= scheme.settings
    expected = 5 ** k * depolarizing_apply(r, 0.2)
    return operator_norm(averaged - expected)