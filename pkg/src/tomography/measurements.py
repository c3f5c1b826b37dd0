"""
Measurement schemes for state tomography.

Four measurement families are supported:
- Structured POVMs: rank-one effects built from a 2-design vector set, here
  maximal sets of mutually unbiased bases (MUBs) in prime dimension or
  user-supplied vector sets
- Pauli observables: the d² - 1 non-trivial two-outcome POVMs ½(I ± W)
- Pauli basis measurements: the 3^k local x/y/z basis settings on k qubits
- The uniform (covariant) POVM: continuous, sampled directly in simulate

Setting orders are fixed so that seeds and CSV outputs are reproducible:
MUBs computational-first then a = 0..d-1, Pauli words lexicographic in
(I, X, Y, Z), Pauli-basis settings lexicographic in (x, y, z).

Usage:
    scheme = build_mub_scheme(5)
    for setting in range(scheme.settings):
        effects = scheme.effects(setting)
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from math import comb, log2
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    NormalizationError,
    TomographyError,
    UnsupportedDimensionError,
)
from .linalg import DEFAULT_TOL, MatrixLike, as_array, hermitian, operator_norm

logger = logging.getLogger(__name__)

# Unit-norm tolerance for stored vectors
UNIT_NORM_TOL = 1e-12

# Deviation threshold for the 2-design check
DESIGN_TOL = 1e-9

PAULI_LETTERS = "IXYZ"
BASIS_LETTERS = "xyz"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_S = 1 / np.sqrt(2)

# Single-qubit eigenvectors per basis letter, ordered (+1, -1)
BASIS_EIGENVECTORS = {
    "x": (np.array([_S, _S], dtype=complex), np.array([_S, -_S], dtype=complex)),
    "y": (np.array([_S, 1j * _S], dtype=complex), np.array([_S, -1j * _S], dtype=complex)),
    "z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
}


class SchemeKind(Enum):
    """Measurement family."""
    STRUCTURED = "structured"
    PAULI_OBSERVABLES = "pauli-obs"
    PAULI_BASIS = "pauli-basis"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class PauliWord:
    """A k-fold tensor product of elementary Pauli matrices, e.g. ``"XZ"``."""
    letters: str

    def __post_init__(self):
        if len(self.letters) < 1:
            raise ValueError("Pauli word must have at least one letter")
        invalid = set(self.letters) - set(PAULI_LETTERS)
        if invalid:
            raise ValueError(f"Invalid Pauli letters {sorted(invalid)} in '{self.letters}'")

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters


def pauli_matrix(word: Union[PauliWord, str]) -> np.ndarray:
    """Return the 2^k × 2^k matrix of a Pauli word."""
    if isinstance(word, str):
        word = PauliWord(word)
    return reduce(np.kron, (PAULI_MATRICES[letter] for letter in word.letters))


def pauli_words(k: int) -> List[PauliWord]:
    """All 4^k Pauli words on k qubits, lexicographic in (I, X, Y, Z)."""
    return [PauliWord("".join(w)) for w in itertools.product(PAULI_LETTERS, repeat=k)]


def num_qubits_for_dim(d: int) -> int:
    """
    Number of qubits k with d = 2^k.

    Raises:
        UnsupportedDimensionError: If d is not a power of two
    """
    if d < 2 or d & (d - 1):
        raise UnsupportedDimensionError(f"Dimension {d} is not a power of 2")
    return int(round(log2(d)))


def dimension_factor(kind: SchemeKind, d: int) -> float:
    """
    Dimension factor g(d) of the trace-norm tail bound.

    2d for structured POVMs, d² for Pauli observables and exactly 3^k for
    Pauli bases (often quoted as d^1.6).
    """
    if kind is SchemeKind.STRUCTURED:
        return 2.0 * d
    if kind is SchemeKind.PAULI_OBSERVABLES:
        return float(d ** 2)
    if kind is SchemeKind.PAULI_BASIS:
        return float(3 ** num_qubits_for_dim(d))
    raise TomographyError("The uniform POVM has no g(d) factor; use the uniform-POVM bounds")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % f for f in range(3, int(n ** 0.5) + 1, 2))


@dataclass(frozen=True, eq=False)
class MeasurementScheme:
    """
    Immutable description of one measurement family plus per-setting effects.

    Attributes:
        kind: Measurement family
        d: Hilbert-space dimension
        settings: Number of distinct experimental settings
        outcomes_per_setting: Number of outcomes per setting (0 for uniform)
        vectors: Structured POVM unit vectors, shape (m, d), grouped
            contiguously into settings
        words: Pauli words (all d² of them, identity first)
        labels: Pauli-basis setting labels over {x,y,z}^k
        design: Structured vectors form a 2-design, so the closed-form
            inversion applies
    """
    kind: SchemeKind
    d: int
    settings: int
    outcomes_per_setting: int
    vectors: Optional[np.ndarray] = None
    words: Tuple[PauliWord, ...] = ()
    labels: Tuple[str, ...] = ()
    design: bool = True

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def num_qubits(self) -> int:
        return num_qubits_for_dim(self.d)

    @property
    def is_continuous(self) -> bool:
        return self.kind is SchemeKind.UNIFORM

    @property
    def g_of_d(self) -> float:
        return dimension_factor(self.kind, self.d)

    def setting_label(self, setting: int) -> str:
        self._check_setting(setting)
        if self.kind is SchemeKind.PAULI_OBSERVABLES:
            return self.words[setting + 1].letters
        if self.kind is SchemeKind.PAULI_BASIS:
            return self.labels[setting]
        return str(setting)

    def setting_vectors(self, setting: int) -> np.ndarray:
        """
        Rank-one outcome vectors of a setting, shape (outcomes, d).

        Only defined for structured and Pauli-basis schemes.
        """
        self._check_setting(setting)
        if self.kind is SchemeKind.STRUCTURED:
            size = self.outcomes_per_setting
            return self.vectors[setting * size:(setting + 1) * size]
        if self.kind is SchemeKind.PAULI_BASIS:
            return pauli_basis_vectors(self.labels[setting])
        raise TomographyError(f"Scheme '{self.name}' has no rank-one outcome vectors")

    def effects(self, setting: int) -> List[np.ndarray]:
        """
        POVM effects of one setting; they sum to the identity.

        Pauli-basis effects are built on demand, so memory stays O(d²) per setting.
        """
        self._check_setting(setting)
        if self.kind is SchemeKind.PAULI_OBSERVABLES:
            w = pauli_matrix(self.words[setting + 1])
            identity = np.eye(self.d, dtype=complex)
            return [(identity + w) / 2, (identity - w) / 2]
        vectors = self.setting_vectors(setting)
        weight = self.d / len(vectors)
        return [weight * np.outer(v, v.conj()) for v in vectors]

    def iter_effects(self) -> Iterator[Tuple[int, List[np.ndarray]]]:
        for setting in range(self.settings):
            yield setting, self.effects(setting)

    def _check_setting(self, setting: int) -> None:
        if self.is_continuous:
            raise TomographyError("The uniform POVM has no discrete settings")
        if not 0 <= setting < self.settings:
            raise IndexError(f"Setting {setting} out of range [0, {self.settings})")


def _mub_vectors(d: int) -> np.ndarray:
    if d == 2:
        return np.array([v for s in "zxy" for v in BASIS_EIGENVECTORS[s]])

    omega = np.exp(2j * np.pi / d)
    k = np.arange(d)
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        exponents = (a * k[None, :] ** 2 + np.arange(d)[:, None] * k[None, :]) % d
        bases.append(omega ** exponents / np.sqrt(d))
    return np.concatenate(bases)


def build_mub_scheme(d: int, include_computational: bool = True) -> MeasurementScheme:
    """
    Maximal set of d + 1 mutually unbiased bases in prime dimension d.

    For odd primes, basis a has vectors with component k equal to
    ω^{a k² + b k} / √d; for d = 2 the bases are the σ_z, σ_x, σ_y eigenbases.
    The computational basis comes first.

    Args:
        d: Prime dimension
        include_computational: If False, drop the computational basis (the
            remaining d bases are not a 2-design)

    Raises:
        UnsupportedDimensionError: If d is not prime
    """
    if not is_prime(d):
        raise UnsupportedDimensionError(f"MUB construction requires a prime dimension, got d={d}")

    vectors = _mub_vectors(d)
    if not include_computational:
        vectors = vectors[d:]
    settings = len(vectors) // d
    logger.debug(f"Built MUB scheme d={d} with {settings} bases")
    return MeasurementScheme(
        kind=SchemeKind.STRUCTURED,
        d=d,
        settings=settings,
        outcomes_per_setting=d,
        vectors=vectors,
        design=include_computational,
    )


def build_structured_scheme(vectors: Sequence[np.ndarray], settings: int = 1) -> MeasurementScheme:
    """
    Structured POVM from a user-supplied vector set.

    The m vectors are split into ``settings`` contiguous groups of equal size;
    each group, with effects (d/group_size)|v⟩⟨v|, must itself be a POVM.
    Sets that fail ``verify_2design`` are estimated with ``ls_generic``.

    Raises:
        DimensionMismatchError: If vectors differ in length
        NormalizationError: If a vector is far from unit norm or a group is
            not a POVM
    """
    v = _stack_vectors(vectors)
    m, d = v.shape
    if settings < 1 or m % settings:
        raise ValueError(f"{m} vectors cannot be split evenly into {settings} settings")

    norms = np.linalg.norm(v, axis=1)
    if np.any(np.abs(norms - 1) > 1e-6):
        raise NormalizationError(f"Vectors must have unit norm (max deviation {np.max(np.abs(norms - 1)):.2e})")
    v = v / norms[:, None]

    scheme = MeasurementScheme(
        kind=SchemeKind.STRUCTURED,
        d=d,
        settings=settings,
        outcomes_per_setting=m // settings,
        vectors=v,
        design=verify_2design(v).passed,
    )
    identity = np.eye(d)
    for setting, effects in scheme.iter_effects():
        deviation = operator_norm(sum(effects) - identity)
        if deviation > DEFAULT_TOL:
            raise NormalizationError(
                f"Effects of setting {setting} do not sum to the identity (deviation {deviation:.2e})"
            )
    return scheme


def build_pauli_observable_scheme(k: int) -> MeasurementScheme:
    """
    Two-outcome POVMs ½(I ± W) for every non-identity Pauli word on k qubits.

    All d² words are stored (identity first); the identity consumes no shots,
    so the scheme has d² - 1 settings.
    """
    if k < 1:
        raise ValueError(f"Number of qubits must be positive, got {k}")
    words = tuple(pauli_words(k))
    d = 2 ** k
    return MeasurementScheme(
        kind=SchemeKind.PAULI_OBSERVABLES,
        d=d,
        settings=d * d - 1,
        outcomes_per_setting=2,
        words=words,
    )


def pauli_basis_vectors(label: str) -> np.ndarray:
    """
    Product eigenvectors of a Pauli-basis setting such as ``"xz"``.

    Outcome o has bits (o_1, …, o_k), most significant first, with bit 0
    meaning eigenvalue +1 on that qubit.
    """
    factors = [BASIS_EIGENVECTORS[s] for s in label]
    return np.array([reduce(np.kron, combo) for combo in itertools.product(*factors)])


def build_pauli_basis_scheme(k: int) -> MeasurementScheme:
    """The 3^k local Pauli basis settings on k qubits, 2^k outcomes each."""
    if k < 1:
        raise ValueError(f"Number of qubits must be positive, got {k}")
    labels = tuple("".join(s) for s in itertools.product(BASIS_LETTERS, repeat=k))
    return MeasurementScheme(
        kind=SchemeKind.PAULI_BASIS,
        d=2 ** k,
        settings=3 ** k,
        outcomes_per_setting=2 ** k,
        labels=labels,
    )


def build_uniform_scheme(d: int) -> MeasurementScheme:
    """The uniform POVM in dimension d (continuous outcomes)."""
    if d < 1:
        raise ValueError(f"Dimension must be positive, got {d}")
    return MeasurementScheme(kind=SchemeKind.UNIFORM, d=d, settings=0, outcomes_per_setting=0)


def build_scheme(name: str, d: Optional[int] = None, k: Optional[int] = None) -> MeasurementScheme:
    """
    Build a scheme from its CLI / config name.

    Args:
        name: One of ``mub``, ``pauli-obs``, ``pauli-basis``, ``uniform``, or
            ``file:<path>`` for a vector-set file
        d: Dimension (MUB, uniform; for Pauli schemes an alternative to k)
        k: Number of qubits (Pauli schemes)
    """
    if name.startswith("file:"):
        from .matrix_io import load_vector_set
        vectors, settings = load_vector_set(name[len("file:"):])
        return build_structured_scheme(vectors, settings)

    if name in ("pauli-obs", "pauli-basis"):
        if k is None:
            if d is None:
                raise ValueError(f"Scheme '{name}' needs --k or --d")
            k = num_qubits_for_dim(d)
        elif d is not None and d != 2 ** k:
            raise DimensionMismatchError(f"d={d} does not match k={k} qubits")
        builder = build_pauli_observable_scheme if name == "pauli-obs" else build_pauli_basis_scheme
        return builder(k)

    if d is None:
        raise ValueError(f"Scheme '{name}' needs --d")
    if name == "mub":
        return build_mub_scheme(d)
    if name == "uniform":
        return build_uniform_scheme(d)
    raise ValueError(f"Unknown scheme: {name}")


def _stack_vectors(vectors: Sequence[np.ndarray]) -> np.ndarray:
    if len(vectors) == 0:
        raise ValueError("Vector set cannot be empty")
    dims = {len(np.ravel(v)) for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Vectors have differing dimensions: {sorted(dims)}")
    return np.array([np.ravel(v) for v in vectors], dtype=complex)


def flip_operator(d: int) -> np.ndarray:
    """Swap operator F|x⟩⊗|y⟩ = |y⟩⊗|x⟩ on C^d ⊗ C^d."""
    f = np.zeros((d * d, d * d))
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    f[(i * d + j).ravel(), (j * d + i).ravel()] = 1.0
    return f


@dataclass(frozen=True)
class DesignCheck:
    """Result of a 2-design check."""
    max_deviation: float
    passed: bool


def verify_2design(vectors: Sequence[np.ndarray], tol: float = DESIGN_TOL) -> DesignCheck:
    """
    Check the 2-design condition (1/m) Σ (|v⟩⟨v|)^⊗2 = P_Sym / C(d+1, 2).

    Returns:
        DesignCheck with the operator-norm deviation and pass flag
    """
    v = _stack_vectors(vectors)
    m, d = v.shape
    w = np.einsum("mi,mj->mij", v, v).reshape(m, d * d)
    moment = w.T @ w.conj() / m
    sym_projector = (np.eye(d * d) + flip_operator(d)) / 2
    deviation = operator_norm(moment - sym_projector / comb(d + 1, 2))
    return DesignCheck(max_deviation=deviation, passed=deviation <= tol)


def gram_apply(effects: Sequence[np.ndarray], x: MatrixLike) -> np.ndarray:
    """Apply M†M: X ↦ Σ_i tr(M_i X) M_i for a list of effects."""
    a = as_array(x)
    return sum(np.trace(e @ a) * e for e in effects)


def depolarizing_apply(x: MatrixLike, p: float) -> np.ndarray:
    """
    Apply D_p^{⊗k} to a k-qubit operator.

    Per qubit D_p(Y) = p Y + (1 - p) tr(Y) I / 2, so that
    D_{1/3}(Y) = Y/3 + tr(Y) I / 3 and D_p ∘ D_q = D_{pq}.

    Raises:
        UnsupportedDimensionError: If the dimension is not a power of 2
    """
    a = as_array(x)
    k = num_qubits_for_dim(a.shape[0])
    tensor = a.reshape([2] * (2 * k))
    identity = np.eye(2)
    for j in range(k):
        moved = np.moveaxis(tensor, [j, k + j], [-2, -1])
        partial = np.trace(moved, axis1=-2, axis2=-1)
        moved = p * moved + (1 - p) / 2 * partial[..., None, None] * identity
        tensor = np.moveaxis(moved, [-2, -1], [j, k + j])
    return tensor.reshape(a.shape)


def depolarizing_inverse_apply(x: MatrixLike) -> np.ndarray:
    """
    Apply (D_{1/3}^{⊗k})^{-1} = D_3^{⊗k}.

    On a single-qubit basis projector this gives 3|b⟩⟨b| - I.
    """
    return depolarizing_apply(x, 3.0)


def mutual_overlaps(scheme: MeasurementScheme) -> np.ndarray:
    """|⟨u, v⟩|² between all pairs of outcome vectors of a rank-one scheme."""
    vectors = np.concatenate([scheme.setting_vectors(s) for s in range(scheme.settings)])
    return np.abs(vectors.conj() @ vectors.T) ** 2


def hermitian_operator_basis(d: int) -> List[np.ndarray]:
    """
    Orthonormal (Hilbert-Schmidt) basis of d×d Hermitian matrices.

    Diagonal units first, then symmetric and antisymmetric off-diagonal pairs.
    """
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[i, j] = sym[j, i] = _S
            anti = np.zeros((d, d), dtype=complex)
            anti[i, j] = -1j * _S
            anti[j, i] = 1j * _S
            basis.extend([sym, anti])
    return basis
