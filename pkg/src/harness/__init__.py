"""
Experiment harness: configuration, parallel sweeps, coverage studies and CSV output.
"""

from .config import ConfigError, ExperimentConfig
from .coverage import CoverageReport, run_coverage_study
from .results import emit_csv
from .sweep import SweepResult, run_sweep

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "CoverageReport",
    "run_coverage_study",
    "emit_csv",
    "SweepResult",
    "run_sweep",
]
