"""
Dense complex / Hermitian linear algebra for tomography.

Every other module builds on the helpers here:
- Hermitian symmetrization and validation
- Sorted eigendecomposition (non-increasing eigenvalues)
- Trace-norm, operator-norm and Frobenius distances
- Best rank-r truncation and its residual
- Seeded random states (Haar pure states, Ginibre rank-r states)

Matrices are plain ``numpy.ndarray`` objects of dtype complex128. Density
matrices are wrapped in the immutable ``DensityMatrix`` dataclass so that the
state-space invariants are checked once, on construction.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatchError,
    InvalidStateError,
    NumericalFailureError,
)

logger = logging.getLogger(__name__)

# Absolute tolerance for equality checks (two orders above eigensolver noise at d=128)
DEFAULT_TOL = 1e-10

# Symmetrization tolerance for the HermitianMatrix invariant
HERMITIAN_TOL = 1e-12

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]
MatrixLike = Union[np.ndarray, "DensityMatrix"]


def as_array(matrix: MatrixLike) -> np.ndarray:
    """Return the underlying complex array of a matrix or DensityMatrix."""
    if isinstance(matrix, DensityMatrix):
        return matrix.matrix
    return np.asarray(matrix, dtype=complex)


def hermitian(matrix: MatrixLike) -> np.ndarray:
    """
    Build a HermitianMatrix from a square complex array.

    The input is symmetrized as (A + A†)/2 rather than rejected, which absorbs
    accumulated floating-point asymmetry.

    Raises:
        DimensionMismatchError: If the input is not square
        ValueError: If any entry is NaN or infinite
    """
    a = as_array(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("Matrix contains NaN or infinite entries")
    return (a + a.conj().T) / 2


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Dimension mismatch: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class EigenDecomposition:
    """
    Eigendecomposition A = U diag(λ) U† of a Hermitian matrix.

    Attributes:
        eigenvalues: Real eigenvalues sorted non-increasing
        eigenvectors: Unitary matrix whose column i pairs with eigenvalue i
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self, eigenvalues: Optional[np.ndarray] = None) -> np.ndarray:
        """Return U diag(λ) U†, optionally with a replacement spectrum."""
        values = self.eigenvalues if eigenvalues is None else np.asarray(eigenvalues)
        u = self.eigenvectors
        return (u * values) @ u.conj().T


def eigh(matrix: MatrixLike) -> EigenDecomposition:
    """
    Eigendecompose a Hermitian matrix with eigenvalues sorted non-increasing.

    Uses LAPACK's divide-and-conquer driver (``heevd``) through
    ``scipy.linalg.eigh``; convergence limits are LAPACK's own.

    Raises:
        NumericalFailureError: If LAPACK reports non-convergence
    """
    a = hermitian(matrix)
    dim = a.shape[0]
    try:
        values, vectors = scipy.linalg.eigh(a, driver="evd")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalFailureError(
            f"Eigendecomposition failed to converge for d={dim}: {e}", dim=dim
        ) from e
    order = np.argsort(values)[::-1]
    return EigenDecomposition(eigenvalues=values[order], eigenvectors=vectors[:, order])


def eigvalsh(matrix: MatrixLike) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted non-increasing."""
    a = hermitian(matrix)
    try:
        values = scipy.linalg.eigvalsh(a)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalFailureError(
            f"Eigenvalue computation failed for d={a.shape[0]}: {e}", dim=a.shape[0]
        ) from e
    return values[::-1]


def trace_norm_distance(a: MatrixLike, b: MatrixLike) -> float:
    """Trace-norm distance ‖A − B‖₁ = Σ|λ_i(A − B)|."""
    a, b = as_array(a), as_array(b)
    _check_same_dim(a, b)
    return float(np.sum(np.abs(eigvalsh(a - b))))


def operator_norm(matrix: MatrixLike) -> float:
    """Operator norm ‖A‖∞ = max |λ_i(A)| of a Hermitian matrix."""
    values = eigvalsh(matrix)
    return float(max(abs(values[0]), abs(values[-1])))


def frobenius_distance(a: MatrixLike, b: MatrixLike) -> float:
    """Frobenius distance ‖A − B‖₂."""
    a, b = as_array(a), as_array(b)
    _check_same_dim(a, b)
    return float(np.linalg.norm(a - b, "fro"))


def numerical_rank(matrix: MatrixLike, tol: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues with magnitude above ``tol``."""
    return int(np.sum(np.abs(eigvalsh(matrix)) > tol))


def sampled_operator_norm(matrix: MatrixLike, samples: int = 10_000, seed: SeedLike = None) -> float:
    """
    Variational lower bound max_z |⟨z|A|z⟩| over Haar-random unit vectors z.

    Never exceeds ``operator_norm(A)``.
    """
    a = hermitian(matrix)
    rng = np.random.default_rng(seed)
    z = complex_gaussian((samples, a.shape[0]), rng)
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    quad = np.einsum("si,ij,sj->s", z.conj(), a, z).real
    return float(np.max(np.abs(quad)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    A quantum state: Hermitian, positive semidefinite, unit trace.

    Construct with ``DensityMatrix.from_array`` to get validation; the stored
    array is read-only.
    """
    matrix: np.ndarray

    @classmethod
    def from_array(cls, matrix: MatrixLike, tol: float = DEFAULT_TOL) -> "DensityMatrix":
        """
        Validate and wrap a matrix as a density matrix.

        Raises:
            InvalidStateError: If the trace or minimum eigenvalue is out of tolerance
        """
        a = hermitian(matrix)
        trace = float(np.trace(a).real)
        if abs(trace - 1.0) > tol:
            raise InvalidStateError(f"Trace must be 1, got {trace:.3e}")
        min_eig = float(eigvalsh(a)[-1])
        if min_eig < -tol:
            raise InvalidStateError(f"Matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
        a.setflags(write=False)
        return cls(matrix=a)

    @classmethod
    def from_vector(cls, psi: np.ndarray) -> "DensityMatrix":
        """Pure state |ψ⟩⟨ψ| from a (not necessarily normalized) vector."""
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls.from_array(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls.from_array(np.eye(d, dtype=complex) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh(self.matrix)

    def rank(self, tol: float = DEFAULT_TOL) -> int:
        return numerical_rank(self.matrix, tol)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def best_rank_r_approximation(rho: DensityMatrix, r: int) -> np.ndarray:
    """
    Best rank-r approximation in trace norm: keep the r largest eigenpairs.

    The result is not renormalized; its trace is 1 − σ_r(ρ).
    """
    _check_rank_parameter(r, rho.dim)
    decomposition = eigh(rho)
    values = decomposition.eigenvalues.copy()
    values[r:] = 0.0
    return decomposition.reconstruct(values)


def rank_r_residual(rho: DensityMatrix, r: int) -> float:
    """
    Residual σ_r(ρ) = Σ_{i>r} λ_i of the best rank-r approximation.

    Raises:
        ValueError: If r is outside [1, d]
    """
    _check_rank_parameter(r, rho.dim)
    values = rho.eigenvalues()
    return float(max(np.sum(values[r:]), 0.0))


def rank_r_residuals(rho: MatrixLike) -> np.ndarray:
    """σ_r for r = 1..d in one eigendecomposition (non-increasing, last entry 0)."""
    values = eigvalsh(rho)
    tails = np.cumsum(values[::-1])[::-1]
    residuals = np.append(tails[1:], 0.0)
    return np.maximum(residuals, 0.0)


def _check_rank_parameter(r: int, d: int) -> None:
    if not 1 <= r <= d:
        raise ValueError(f"Rank parameter r={r} must lie in [1, {d}]")


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian entries (Ginibre convention, E|z|² = 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_random_vector(d: int, seed: SeedLike = None) -> np.ndarray:
    """Unit vector drawn uniformly from the complex sphere in C^d."""
    rng = np.random.default_rng(seed)
    psi = complex_gaussian(d, rng)
    return psi / np.linalg.norm(psi)


def random_pure_state(d: int, seed: SeedLike = None) -> DensityMatrix:
    """Haar-random pure state |ψ⟩⟨ψ| in dimension d."""
    if d < 1:
        raise ValueError(f"Dimension must be positive, got {d}")
    return DensityMatrix.from_vector(haar_random_vector(d, seed))


def random_rank_r_state(d: int, r: int, seed: SeedLike = None) -> DensityMatrix:
    """
    Random state ρ = G G† / tr(G G†) with G a d×r complex Ginibre matrix.

    Has rank exactly r with probability one.
    """
    _check_rank_parameter(r, d)
    rng = np.random.default_rng(seed)
    g = complex_gaussian((d, r), rng)
    rho = g @ g.conj().T
    return DensityMatrix.from_array(rho / np.trace(rho).real)


def caricature_state(psi: DensityMatrix, p: float) -> DensityMatrix:
    """
    Faulty preparation ρ = (1 − p)|ψ⟩⟨ψ| + (p/d) I.

    Raises:
        InvalidStateError: If ``psi`` is not pure
        ValueError: If p is outside [0, 1]
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Failure probability p={p} must lie in [0, 1]")
    if psi.rank() != 1:
        raise InvalidStateError("Caricature state requires a pure target state")
    d = psi.dim
    return DensityMatrix.from_array((1.0 - p) * psi.matrix + (p / d) * np.eye(d))
