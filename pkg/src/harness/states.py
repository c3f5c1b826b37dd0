"""
State specs used by the CLI and experiment configs.

Accepted forms:
    random-pure       Haar-random pure state
    random-rank:<r>   Ginibre random state of rank r
    caricature:<p>    (1-p)|ψ⟩⟨ψ| + (p/d) I with Haar-random ψ
    file:<path>       Matrix file (a bare path also works)
"""

import logging
from dataclasses import dataclass
from typing import Optional

from src.tomography.exceptions import DimensionMismatchError
from src.tomography.linalg import (
    DensityMatrix,
    caricature_state,
    random_pure_state,
    random_rank_r_state,
)
from src.tomography.matrix_io import load_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateSpec:
    """Parsed state spec; ``param`` is the rank or failure probability."""
    kind: str
    param: Optional[float] = None
    path: Optional[str] = None

    @property
    def rank(self) -> Optional[int]:
        """Nominal rank used as default rank parameter."""
        if self.kind in ("random-pure", "caricature"):
            return 1
        if self.kind == "random-rank":
            return int(self.param)
        return None


def parse_state_spec(spec: str) -> StateSpec:
    """
    Parse a state spec string.

    Raises:
        ValueError: If the spec is malformed
    """
    spec = spec.strip()
    if spec == "random-pure":
        return StateSpec(kind="random-pure")

    if spec.startswith("random-rank:"):
        value = spec.split(":", 1)[1]
        try:
            r = int(value)
        except ValueError:
            raise ValueError(f"Invalid rank in state spec '{spec}'")
        if r < 1:
            raise ValueError(f"Rank must be positive in state spec '{spec}'")
        return StateSpec(kind="random-rank", param=r)

    if spec.startswith("caricature:"):
        value = spec.split(":", 1)[1]
        try:
            p = float(value)
        except ValueError:
            raise ValueError(f"Invalid failure probability in state spec '{spec}'")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Failure probability must lie in [0, 1] in state spec '{spec}'")
        return StateSpec(kind="caricature", param=p)

    path = spec[len("file:"):] if spec.startswith("file:") else spec
    if not path or path.startswith(("random", "caricature")):
        raise ValueError(f"Unknown state spec '{spec}'")
    return StateSpec(kind="file", path=path)


def prepare_state(spec: StateSpec, d: int, seed: Optional[int] = None) -> DensityMatrix:
    """
    Materialize a state of dimension d from a spec.

    Raises:
        DimensionMismatchError: If a file state has the wrong dimension
        ValueError: If a random-rank spec asks for r > d
    """
    if spec.kind == "random-pure":
        return random_pure_state(d, seed)
    if spec.kind == "random-rank":
        return random_rank_r_state(d, int(spec.param), seed)
    if spec.kind == "caricature":
        return caricature_state(random_pure_state(d, seed), spec.param)

    rho = DensityMatrix.from_array(load_matrix(spec.path))
    logger.debug(f"Loaded state from {spec.path}")
    if rho.dim != d:
        raise DimensionMismatchError(f"State file {spec.path} has dimension {rho.dim}, expected {d}")
    return rho
