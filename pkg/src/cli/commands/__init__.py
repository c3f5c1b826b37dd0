"""CLI command modules."""

from . import simulate
from . import estimate
from . import sweep
from . import coverage
from . import design
from . import bound

__all__ = ["simulate", "estimate", "sweep", "coverage", "design", "bound"]
