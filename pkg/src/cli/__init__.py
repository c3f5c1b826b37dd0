"""
CLI module for pls-tomography.

Provides commands for single tomography runs, trial sweeps, bound coverage
studies and bound evaluation.
"""

from .main import cli

__all__ = ["cli"]
