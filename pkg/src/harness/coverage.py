"""
Coverage studies: empirical failure frequencies against tail bounds.

For every (d, n) grid point the trials of a sweep are compared with the
selected bound at each accuracy in ``config.epsilons``:

    thm1            Pr[‖ρ̂ - ρ‖₁ ≥ ε]                      vs thm1_tail
    essential       Pr[‖L̂ - ρ‖∞ ≥ τ]                      vs essential_opnorm_tail
    thm2            Pr[‖ρ̂ - ρ‖₁ ≥ ε], uniform POVM        vs thm2_tail
    uniform-opnorm  Pr[‖L̂ - ρ‖∞ ≥ τ], uniform POVM        vs uniform_opnorm_tail
    thm4            Pr[‖ρ̂ - ρ‖₁ ≥ ε + 2 min σ_r]          vs thm1_tail
    radius          Pr[‖ρ̂ - ρ‖₁ > radius(δ)]              vs δ

A point is violated when the failure frequency exceeds the bound by more
than the binomial slack 3·sqrt(b(1-b)/N). Bounds ≥ 1 pass vacuously.
"""

import logging
from dataclasses import dataclass, replace
from itertools import groupby
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

from src.tomography.analyze import (
    BoundParams,
    CoverageCheck,
    TrialRecord,
    confidence_radius,
    coverage_check,
    binomial_slack,
    essential_opnorm_tail,
    thm1_tail,
    thm2_tail,
    thm4_effective_rank_check,
    uniform_confidence_radius,
    uniform_opnorm_tail,
)
from src.tomography.exceptions import DomainError
from src.tomography.measurements import SchemeKind, dimension_factor

from .config import ConfigError, ExperimentConfig
from .results import write_rows
from .sweep import run_sweep

logger = logging.getLogger(__name__)

MIN_COVERAGE_TRIALS = 100

UNIFORM_BOUNDS = {"thm2", "uniform-opnorm"}

COVERAGE_COLUMNS = ("bound", "d", "n", "epsilon", "bound_value", "empirical_failure", "slack", "trials", "status")


@dataclass(frozen=True)
class CoveragePoint:
    """Outcome of one (d, n, ε) comparison."""
    bound_name: str
    d: int
    n: int
    epsilon: Optional[float]
    check: CoverageCheck

    @property
    def status(self) -> str:
        if self.check.vacuous:
            return "vacuous-pass"
        return "pass" if self.check.holds else "violation"

    @property
    def slack(self) -> float:
        return binomial_slack(self.check.bound, self.check.trials)


@dataclass(frozen=True)
class CoverageReport:
    """All coverage points of a study."""
    bound_name: str
    points: List[CoveragePoint]

    @property
    def violations(self) -> List[CoveragePoint]:
        return [p for p in self.points if not p.check.holds]

    @property
    def passed(self) -> bool:
        return not self.violations

    def write_csv(self, path: Union[str, Path]) -> None:
        write_rows(path, COVERAGE_COLUMNS, (
            [
                p.bound_name, p.d, p.n,
                "" if p.epsilon is None else float(p.epsilon),
                float(p.check.bound), float(p.check.empirical_failure),
                float(p.slack), p.check.trials, p.status,
            ]
            for p in self.points
        ))


def _tail_check(
    batch: Sequence[TrialRecord],
    bound: float,
    failed: Callable[[TrialRecord], bool],
) -> CoverageCheck:
    failures = sum(1 for t in batch if failed(t))
    return coverage_check(failures, len(batch), bound)


def bound_value(selector: str, config: ExperimentConfig, d: int, n: float, epsilon: Optional[float]) -> float:
    """
    Value of the selected bound at one grid point.

    Raises:
        DomainError: If the accuracy lies outside the bound's stated range
    """
    kind = config.kind
    g = None if kind is SchemeKind.UNIFORM else dimension_factor(kind, d)
    r = config.rank_parameter

    if selector in ("thm1", "thm4"):
        return thm1_tail(BoundParams(d=d, n=n, r=r, epsilon=epsilon, g_of_d=g))
    if selector == "essential":
        return essential_opnorm_tail(BoundParams(d=d, n=n, tau=epsilon, g_of_d=g, kind=kind))
    if selector == "thm2":
        return thm2_tail(BoundParams(d=d, n=n, r=r, epsilon=epsilon))
    if selector == "uniform-opnorm":
        return uniform_opnorm_tail(BoundParams(d=d, n=n, tau=epsilon))
    return config.delta


def _evaluate_point(
    selector: str,
    config: ExperimentConfig,
    batch: Sequence[TrialRecord],
    epsilon: Optional[float],
) -> CoverageCheck:
    first = batch[0]
    d, n = first.d, first.n

    if selector == "thm4":
        return thm4_effective_rank_check(batch, config.rank_parameter, epsilon)

    bound = bound_value(selector, config, d, n, epsilon)
    if selector in ("thm1", "thm2"):
        return _tail_check(batch, bound, lambda t: t.trace_error >= epsilon)
    if selector in ("essential", "uniform-opnorm"):
        return _tail_check(batch, bound, lambda t: t.op_error_L >= epsilon)

    if config.kind is SchemeKind.UNIFORM:
        params = BoundParams(d=d, n=n, delta=config.delta)

        def radius(t: TrialRecord) -> float:
            return uniform_confidence_radius(params, t.rank_estimate)
    else:
        params = BoundParams(d=d, n=n, delta=config.delta, g_of_d=dimension_factor(config.kind, d))

        def radius(t: TrialRecord) -> float:
            return confidence_radius(params, t.rank_estimate)
    return _tail_check(batch, bound, lambda t: t.trace_error > radius(t))


def _epsilon_grid(config: ExperimentConfig, selector: str) -> List[Optional[float]]:
    if (selector in UNIFORM_BOUNDS) != (config.kind is SchemeKind.UNIFORM):
        raise ConfigError("bound", f"bound '{selector}' does not apply to scheme '{config.scheme}'")
    if selector == "radius":
        return [None]
    if not config.epsilons:
        raise ConfigError("epsilons", f"bound '{selector}' needs an accuracy grid")
    return list(config.epsilons)


def _validate_grid(config: ExperimentConfig, selector: str) -> None:
    for epsilon in _epsilon_grid(config, selector):
        for d in config.dims:
            try:
                bound_value(selector, config, d, 1, epsilon)
            except DomainError as e:
                raise ConfigError("epsilons", str(e))


def evaluate_coverage(
    config: ExperimentConfig,
    records: Sequence[TrialRecord],
    selector: Optional[str] = None,
) -> CoverageReport:
    """Compare a set of trial records with a bound at every (d, n, ε)."""
    selector = selector or config.bound
    epsilons = _epsilon_grid(config, selector)

    points = []
    ordered = sorted(records, key=lambda t: (t.d, t.n, t.trial))
    for (d, n), group in groupby(ordered, key=lambda t: (t.d, t.n)):
        batch = list(group)
        for epsilon in epsilons:
            try:
                check = _evaluate_point(selector, config, batch, epsilon)
            except DomainError as e:
                raise ConfigError("epsilons", str(e))
            point = CoveragePoint(bound_name=selector, d=d, n=n, epsilon=epsilon, check=check)
            if not check.holds:
                logger.warning(
                    f"Coverage violation ({selector}) at d={d}, n={n}, eps={epsilon}: "
                    f"failure {check.empirical_failure:.4f} > bound {check.bound:.4g}"
                )
            points.append(point)
    return CoverageReport(bound_name=selector, points=points)


def run_coverage_study(
    config: ExperimentConfig,
    selector: Optional[str] = None,
    show_progress: bool = False,
) -> CoverageReport:
    """
    Run the trials of a config and check them against a tail bound.

    Raises:
        ConfigError: If fewer than 100 trials are requested, the bound does
            not fit the scheme, or an accuracy is outside the bound's range
    """
    if config.trials < MIN_COVERAGE_TRIALS:
        raise ConfigError("trials", f"coverage studies need at least {MIN_COVERAGE_TRIALS} trials")
    selector = selector or config.bound
    _validate_grid(config, selector)
    result = run_sweep(replace(config, output=None), show_progress=show_progress)
    report = evaluate_coverage(config, result.records, selector)
    logger.info(f"Coverage study ({selector}): {len(report.points)} points, {len(report.violations)} violations")
    return report
