"""
Born-rule simulation of tomography experiments.

Turns a state and a measurement scheme into the data the estimators consume:

1. ``born_probabilities`` computes the exact outcome distribution per setting
2. ``sample_counts`` draws multinomial counts per setting
3. ``FrequencyTable`` normalizes counts per setting

The continuous uniform POVM is sampled directly by ``sample_uniform_povm``.

Randomness uses numpy's PCG64 generator. Every setting gets its own stream,
seeded from ``SeedSequence(seed, spawn_key=(setting,))``, so results do not
depend on evaluation order or on how trials are spread across processes.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import DimensionMismatchError, NormalizationError
from .linalg import MatrixLike, SeedLike, as_array, complex_gaussian, eigh
from .measurements import MeasurementScheme, SchemeKind

logger = logging.getLogger(__name__)

# Negative probabilities above this are treated as round-off and clamped
CLAMP_TOL = 1e-12

# Per-setting sums further than this from 1 indicate a broken scheme
PROBABILITY_SUM_TOL = 1e-8


def derive_seed(master: Optional[int], *keys: int) -> int:
    """
    Derive an independent 64-bit seed from a master seed and integer keys.

    Used by the harness to give every (d, n, trial) its own stream.
    """
    sequence = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, np.uint64)[0])


def _setting_rng(seed: Optional[int], setting: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(setting,)))


@dataclass(frozen=True)
class ProbabilityTable:
    """
    Exact outcome distribution for every setting of a discrete scheme.

    Attributes:
        probabilities: One probability vector per setting
        kind: Scheme family the table was computed for
    """
    probabilities: Tuple[np.ndarray, ...]
    kind: SchemeKind

    @property
    def settings(self) -> int:
        return len(self.probabilities)

    def outcome_count(self, setting: int) -> int:
        return len(self.probabilities[setting])


@dataclass(frozen=True)
class OutcomeCounts:
    """
    Integer outcome counts per setting.

    Attributes:
        counts: One count vector per setting
        shots: Shots spent on each setting (equal up to a remainder of one)
        kind: Scheme family
    """
    counts: Tuple[np.ndarray, ...]
    shots: np.ndarray
    kind: SchemeKind

    def __post_init__(self):
        for setting, (c, s) in enumerate(zip(self.counts, self.shots)):
            if int(c.sum()) != int(s):
                raise ValueError(f"Counts of setting {setting} sum to {int(c.sum())}, expected {int(s)}")

    @property
    def n(self) -> int:
        """Total number of measured copies."""
        return int(np.sum(self.shots))

    @property
    def settings(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class FrequencyTable:
    """
    Per-setting normalized frequencies plus the shots behind each setting.

    Within a setting the frequencies sum to 1. Estimators that need globally
    normalized frequencies reweight with ``weights``.

    Attributes:
        frequencies: One frequency vector per setting
        weights: Shots per setting (unit weights for exact probabilities)
        kind: Scheme family
        n: Total shots, or None for exact probabilities
    """
    frequencies: Tuple[np.ndarray, ...]
    weights: np.ndarray
    kind: SchemeKind
    n: Optional[int] = None

    @classmethod
    def from_counts(cls, counts: OutcomeCounts) -> "FrequencyTable":
        frequencies = tuple(c / s if s > 0 else np.zeros(len(c)) for c, s in zip(counts.counts, counts.shots))
        return cls(
            frequencies=frequencies,
            weights=np.asarray(counts.shots, dtype=float),
            kind=counts.kind,
            n=counts.n,
        )

    @classmethod
    def from_probabilities(cls, table: ProbabilityTable) -> "FrequencyTable":
        """Exact-probability limit: frequencies equal probabilities."""
        return cls(
            frequencies=tuple(np.array(p, dtype=float) for p in table.probabilities),
            weights=np.ones(table.settings),
            kind=table.kind,
        )

    @property
    def settings(self) -> int:
        return len(self.frequencies)

    @property
    def is_exact(self) -> bool:
        return self.n is None

    def global_frequencies(self) -> np.ndarray:
        """Frequencies of all outcomes normalized by the total shots (sum to 1)."""
        total = float(np.sum(self.weights))
        return np.concatenate([f * w / total for f, w in zip(self.frequencies, self.weights)])


@dataclass(frozen=True)
class UniformPovmSample:
    """Outcome vectors of n uniform-POVM measurements, shape (n, d)."""
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]


def _clamp_and_normalize(p: np.ndarray, setting: int) -> np.ndarray:
    if np.any(p < -CLAMP_TOL):
        logger.warning(f"Setting {setting}: negative probability {p.min():.3e} clamped to 0")
    p = np.maximum(p, 0.0)
    shift = abs(p.sum() - 1.0)
    if shift > PROBABILITY_SUM_TOL:
        raise NormalizationError(
            f"Probabilities of setting {setting} sum to {p.sum():.12f}; effects do not form a POVM"
        )
    if shift > CLAMP_TOL:
        p = p / p.sum()
    return p


def born_probabilities(rho: MatrixLike, scheme: MeasurementScheme) -> ProbabilityTable:
    """
    Outcome probabilities tr(M ρ) for every effect of every setting.

    Raises:
        DimensionMismatchError: If the state and scheme dimensions differ
        NormalizationError: If a setting's probabilities do not sum to 1
        TomographyError: For the continuous uniform POVM
    """
    r = as_array(rho)
    if r.shape != (scheme.d, scheme.d):
        raise DimensionMismatchError(f"State has shape {r.shape}, scheme dimension is {scheme.d}")

    rank_one = scheme.kind in (SchemeKind.STRUCTURED, SchemeKind.PAULI_BASIS)
    probabilities = []
    for setting in range(scheme.settings):
        if rank_one:
            vectors = scheme.setting_vectors(setting)
            weight = scheme.d / len(vectors)
            p = weight * np.einsum("oi,ij,oj->o", vectors.conj(), r, vectors).real
        else:
            p = np.array([np.sum(e * r.T).real for e in scheme.effects(setting)])
        probabilities.append(_clamp_and_normalize(p, setting))

    return ProbabilityTable(probabilities=tuple(probabilities), kind=scheme.kind)


def allocate_shots(n: int, settings: int) -> np.ndarray:
    """
    Split n shots equally over settings.

    The remainder goes one extra shot each to the lowest-indexed settings.

    Raises:
        ValueError: If n < settings; every setting needs at least one shot
    """
    if n < 1:
        raise ValueError(f"Number of shots must be positive, got {n}")
    if settings < 1:
        raise ValueError(f"Number of settings must be positive, got {settings}")
    if n < settings:
        raise ValueError(f"n={n} is smaller than the {settings} settings; every setting needs at least one shot")
    base, remainder = divmod(n, settings)
    shots = np.full(settings, base, dtype=np.int64)
    shots[:remainder] += 1
    return shots


def sample_counts(
    table: ProbabilityTable,
    shots_per_setting: Union[int, Sequence[int]],
    seed: Optional[int] = None,
) -> OutcomeCounts:
    """
    Draw independent multinomial counts for every setting.

    Args:
        table: Exact outcome distribution
        shots_per_setting: A common shot count, or one count per setting
        seed: Master seed; setting s uses the stream keyed (seed, s)

    Returns:
        OutcomeCounts, deterministic given the seed
    """
    shots = np.broadcast_to(np.asarray(shots_per_setting, dtype=np.int64), (table.settings,)).copy()
    if np.any(shots < 1):
        empty = int(np.argmin(shots))
        raise ValueError(f"Setting {empty} has {shots[empty]} shots; every setting needs at least one shot")

    counts = []
    for setting, p in enumerate(table.probabilities):
        rng = _setting_rng(seed, setting)
        counts.append(rng.multinomial(int(shots[setting]), p))

    logger.debug(f"Sampled {shots.sum()} shots over {table.settings} settings")
    return OutcomeCounts(counts=tuple(counts), shots=shots, kind=table.kind)


def simulate_frequencies(
    rho: MatrixLike,
    scheme: MeasurementScheme,
    n: Optional[int],
    seed: Optional[int] = None,
) -> FrequencyTable:
    """
    Born probabilities → counts → frequencies in one call.

    With ``n=None`` the exact probabilities are returned as frequencies.
    """
    table = born_probabilities(rho, scheme)
    if n is None:
        return FrequencyTable.from_probabilities(table)
    counts = sample_counts(table, allocate_shots(n, scheme.settings), seed)
    return FrequencyTable.from_counts(counts)


def sample_uniform_povm(rho: MatrixLike, n: int, seed: SeedLike = None) -> UniformPovmSample:
    """
    Draw n outcomes of the uniform POVM, each from the density d⟨v|ρ|v⟩ dv.

    Each draw picks an eigenvector x of ρ with probability equal to its
    eigenvalue, then draws the squared overlap t = |⟨x|v⟩|² from Beta(2, d-1)
    and completes v = √t e^{iφ} x + √(1-t) w with w Haar-random in the
    orthogonal complement of x.
    """
    if n < 1:
        raise ValueError(f"Number of samples must be positive, got {n}")
    decomposition = eigh(rho)
    d = decomposition.dim
    rng = np.random.default_rng(seed)

    weights = np.maximum(decomposition.eigenvalues, 0.0)
    picks = rng.choice(d, size=n, p=weights / weights.sum())
    x = decomposition.eigenvectors[:, picks].T
    phases = np.exp(2j * np.pi * rng.random(n))

    if d == 1:
        return UniformPovmSample(vectors=phases[:, None] * x)

    t = rng.beta(2.0, d - 1.0, size=n)
    w = complex_gaussian((n, d), rng)
    w -= np.sum(x.conj() * w, axis=1, keepdims=True) * x
    w /= np.linalg.norm(w, axis=1, keepdims=True)

    v = np.sqrt(t)[:, None] * phases[:, None] * x + np.sqrt(1.0 - t)[:, None] * w
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return UniformPovmSample(vectors=v)
