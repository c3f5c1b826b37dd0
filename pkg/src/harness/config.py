"""
Experiment configuration for sweeps and coverage studies.

Config files are flat ``key=value`` text:

    # Desk-scale MUB scaling experiment
    scheme = mub
    state = random-pure
    dims = 5, 7, 11, 13
    n_grid = 1000, 2000, 4000, 8000
    n_per_setting = true
    trials = 100
    seed = 2024

Blank lines and ``#`` comments are ignored; list values are comma separated.
CLI flags override file values (see ``ExperimentConfig.with_overrides``).
"""

import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from src.tomography.exceptions import TomographyError
from src.tomography.measurements import SchemeKind, build_scheme, is_prime, num_qubits_for_dim

from .states import parse_state_spec

logger = logging.getLogger(__name__)

SCHEMES = ("mub", "pauli-obs", "pauli-basis", "uniform")
BOUNDS = ("thm1", "essential", "thm2", "thm4", "uniform-opnorm", "radius")

_LIST_FIELDS = {"dims": int, "n_grid": int, "epsilons": float}
_INT_FIELDS = {"trials", "seed", "workers", "rank_parameter"}
_FLOAT_FIELDS = {"delta"}
_BOOL_FIELDS = {"n_per_setting", "record_timing"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class ConfigError(TomographyError, ValueError):
    """Invalid experiment configuration; names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Parameters of a sweep or coverage study.

    Attributes:
        scheme: ``mub``, ``pauli-obs``, ``pauli-basis``, ``uniform`` or ``file:<path>``
        state: State spec (``random-pure``, ``random-rank:r``, ``caricature:p``, a file)
        dims: Dimensions to sweep (powers of two for Pauli schemes)
        n_grid: Sample sizes, strictly increasing
        n_per_setting: Interpret n_grid as samples per setting
        trials: Trials per (d, n) point
        seed: Master seed
        output: CSV output path
        workers: Parallel worker processes (None = CPU count)
        epsilons: Accuracy grid for coverage studies
        rank_parameter: Rank parameter r of the bounds
        delta: Failure probability for confidence radii
        bound: Coverage bound selector
        record_timing: Record wall times (off gives byte-identical reruns)
    """
    scheme: str = "mub"
    state: str = "random-pure"
    dims: Tuple[int, ...] = (5,)
    n_grid: Tuple[int, ...] = (1000,)
    n_per_setting: bool = False
    trials: int = 100
    seed: int = 0
    output: Optional[str] = None
    workers: Optional[int] = None
    epsilons: Tuple[float, ...] = ()
    rank_parameter: int = 1
    delta: float = 0.05
    bound: str = "thm1"
    record_timing: bool = True

    def __post_init__(self):
        if not (self.scheme in SCHEMES or self.scheme.startswith("file:")):
            raise ConfigError("scheme", f"unknown scheme '{self.scheme}' (choose from {', '.join(SCHEMES)} or file:<path>)")
        try:
            state = parse_state_spec(self.state)
        except ValueError as e:
            raise ConfigError("state", str(e))

        if not self.dims:
            raise ConfigError("dims", "at least one dimension is required")
        for d in self.dims:
            self._check_dim(d)
        if state.rank is not None and any(state.rank > d for d in self.dims):
            raise ConfigError("state", f"rank {state.rank} exceeds the smallest dimension {min(self.dims)}")

        if not self.n_grid:
            raise ConfigError("n_grid", "at least one sample size is required")
        if any(n < 1 for n in self.n_grid):
            raise ConfigError("n_grid", "sample sizes must be positive")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid", "sample sizes must be strictly increasing")
        if not self.n_per_setting:
            for d in self.dims:
                settings = self.setting_count(d)
                if self.n_grid[0] < settings:
                    raise ConfigError(
                        "n_grid",
                        f"n={self.n_grid[0]} is smaller than the {settings} settings at d={d}; "
                        f"every setting needs at least one shot",
                    )

        if self.trials < 1:
            raise ConfigError("trials", f"must be at least 1, got {self.trials}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers", f"must be at least 1, got {self.workers}")
        if any(e < 0 for e in self.epsilons):
            raise ConfigError("epsilons", "accuracies must be non-negative")
        if self.rank_parameter < 1 or any(self.rank_parameter > d for d in self.dims):
            raise ConfigError("rank_parameter", f"r={self.rank_parameter} must lie in [1, d] for every d")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta", f"must lie in (0, 1), got {self.delta}")
        if self.bound not in BOUNDS:
            raise ConfigError("bound", f"unknown bound '{self.bound}' (choose from {', '.join(BOUNDS)})")

    def _check_dim(self, d: int) -> None:
        if d < 1:
            raise ConfigError("dims", f"dimension must be positive, got {d}")
        if self.scheme == "mub" and not is_prime(d):
            raise ConfigError("dims", f"MUB scheme needs prime dimensions, got {d}")
        if self.scheme in ("pauli-obs", "pauli-basis"):
            try:
                num_qubits_for_dim(d)
            except ValueError:
                raise ConfigError("dims", f"Pauli schemes need powers of 2, got {d}")

    def setting_count(self, d: int) -> int:
        """Number of measurement settings of the scheme in dimension d."""
        if self.scheme == "mub":
            return d + 1
        if self.scheme == "pauli-obs":
            return d * d - 1
        if self.scheme == "pauli-basis":
            return 3 ** num_qubits_for_dim(d)
        if self.scheme == "uniform":
            return 0
        try:
            return build_scheme(self.scheme, d=d).settings
        except (OSError, ValueError) as e:
            raise ConfigError("scheme", str(e))

    @property
    def kind(self) -> SchemeKind:
        if self.scheme == "uniform":
            return SchemeKind.UNIFORM
        if self.scheme == "pauli-obs":
            return SchemeKind.PAULI_OBSERVABLES
        if self.scheme == "pauli-basis":
            return SchemeKind.PAULI_BASIS
        return SchemeKind.STRUCTURED

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with every non-None override applied (CLI flags win over the file)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if not changes:
            return self
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        for key in _LIST_FIELDS:
            if key in changes:
                changes[key] = tuple(changes[key])
        return replace(self, **changes)

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides: Any) -> "ExperimentConfig":
        """Load a config file and apply overrides."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError("config", f"cannot read {path}: {e}")
        values = parse_config_text(text, str(path))
        config = cls(**values)
        logger.debug(f"Loaded config from {path}: {values}")
        return config.with_overrides(**overrides)


def _convert(key: str, raw: str) -> Any:
    try:
        if key in _LIST_FIELDS:
            return tuple(_LIST_FIELDS[key](item.strip()) for item in raw.split(",") if item.strip())
        if key in _INT_FIELDS:
            return int(raw)
        if key in _FLOAT_FIELDS:
            return float(raw)
    except ValueError:
        raise ConfigError(key, f"invalid value '{raw}'")
    if key in _BOOL_FIELDS:
        lowered = raw.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ConfigError(key, f"expected a boolean, got '{raw}'")
    return raw


def parse_config_text(text: str, source: str = "<string>") -> Dict[str, Any]:
    """
    Parse ``key=value`` config text into typed ExperimentConfig keyword arguments.

    Raises:
        ConfigError: For malformed lines, unknown keys or unparsable values
    """
    known = {f.name for f in fields(ExperimentConfig)}
    values: Dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"{source}:{lineno}: expected 'key = value', got '{line}'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(key, f"{source}:{lineno}: unknown configuration key")
        values[key] = _convert(key, raw)
    return values
