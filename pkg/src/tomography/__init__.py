"""
Projected least squares (PLS) quantum state tomography.

Modules:
    linalg        Hermitian linear algebra, norms and random states
    measurements  MUB, Pauli-observable, Pauli-basis and uniform POVM schemes
    simulate      Born-rule probabilities and seeded sampling
    estimate      Linear inversion and projection onto density matrices
    analyze       Error bounds and theorem checks
    matrix_io     Matrix and vector-set text formats
"""

from .exceptions import TomographyError
from .linalg import DensityMatrix
from .measurements import MeasurementScheme, SchemeKind, build_scheme
from .estimate import pls_pipeline, project_to_states, linear_inversion

__all__ = [
    "TomographyError",
    "DensityMatrix",
    "MeasurementScheme",
    "SchemeKind",
    "build_scheme",
    "pls_pipeline",
    "project_to_states",
    "linear_inversion",
]
