"""
Parallel trial sweeps over (dimension, sample size) grids.

Every trial gets seeds derived from (master seed, d index, n index, trial),
so results do not depend on the number of workers or on completion order.
Trials run in a process pool; results are written to the CSV in
(d, n, trial) order as soon as the ordered prefix is complete.

Usage:
    config = ExperimentConfig(scheme="mub", dims=(5, 7), n_grid=(1000, 4000), trials=100)
    result = run_sweep(config)
    for point in result.aggregates:
        print(point.d, point.n, point.mean)
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

try:
    from tqdm import tqdm
    TQDM_AVAILABLE = True
except ImportError:
    TQDM_AVAILABLE = False
    tqdm = None

from src.tomography.analyze import TrialRecord
from src.tomography.estimate import pls_pipeline
from src.tomography.measurements import MeasurementScheme, build_scheme
from src.tomography.simulate import derive_seed

from .config import ExperimentConfig
from .results import TrialCsvWriter, csv_value, sort_key
from .states import parse_state_spec, prepare_state

logger = logging.getLogger(__name__)

# Projection time above this share of the trial time triggers a warning
PROJECTION_SHARE_WARNING = 0.10

# Smallest n at which the projection-share check applies
PROJECTION_CHECK_MIN_N = 1000

# Stream keys appended to (d index, n index, trial) for the two seeds of a trial
SAMPLING_STREAM = 0
STATE_STREAM = 1


@dataclass(frozen=True)
class TrialTask:
    """Everything a worker process needs to run one trial."""
    scheme: str
    state: str
    d: int
    d_index: int
    n: int
    n_index: int
    trial: int
    master_seed: int
    record_timing: bool = True

    @property
    def sampling_seed(self) -> int:
        return derive_seed(self.master_seed, self.d_index, self.n_index, self.trial, SAMPLING_STREAM)

    @property
    def state_seed(self) -> int:
        return derive_seed(self.master_seed, self.d_index, self.n_index, self.trial, STATE_STREAM)


@lru_cache(maxsize=32)
def _cached_scheme(name: str, d: int) -> MeasurementScheme:
    return build_scheme(name, d=d)


def run_trial(task: TrialTask) -> TrialRecord:
    """
    Run a single trial.

    Module-level so that it can be pickled for ProcessPoolExecutor.
    """
    scheme = _cached_scheme(task.scheme, task.d)
    rho = prepare_state(parse_state_spec(task.state), task.d, task.state_seed)
    record = pls_pipeline(rho, scheme, task.n, task.sampling_seed, trial=task.trial)
    if not task.record_timing:
        record = _without_timing(record)
    return record


def _without_timing(record: TrialRecord) -> TrialRecord:
    return replace(record, runtime_ms=0.0, projection_ms=0.0)


def total_samples(config: ExperimentConfig, d: int, n_value: int) -> int:
    """Total n for a grid value, scaling by the setting count in per-setting mode."""
    if not config.n_per_setting:
        return n_value
    scheme = _cached_scheme(config.scheme, d)
    return n_value * max(scheme.settings, 1)


def build_tasks(config: ExperimentConfig) -> List[TrialTask]:
    """All trial tasks of a config, sorted by (d, n, trial)."""
    tasks = [
        TrialTask(
            scheme=config.scheme,
            state=config.state,
            d=d,
            d_index=di,
            n=total_samples(config, d, n_value),
            n_index=ni,
            trial=t,
            master_seed=config.seed,
            record_timing=config.record_timing,
        )
        for di, d in enumerate(config.dims)
        for ni, n_value in enumerate(config.n_grid)
        for t in range(config.trials)
    ]
    return sorted(tasks, key=lambda task: (task.d, task.n, task.trial))


def resolve_workers(config: ExperimentConfig) -> int:
    return config.workers or os.cpu_count() or 1


def iter_trials(
    config: ExperimentConfig,
    show_progress: bool = False,
) -> Iterator[TrialRecord]:
    """
    Yield trial records in (d, n, trial) order.

    With more than one worker, trials run in a process pool and out-of-order
    results are buffered until the ordered prefix is complete.
    """
    tasks = build_tasks(config)
    workers = resolve_workers(config)
    logger.info(f"Running {len(tasks)} trials ({config.scheme}, dims={list(config.dims)}) on {workers} worker(s)")

    pbar = None
    if show_progress and TQDM_AVAILABLE:
        pbar = tqdm(total=len(tasks), desc="  Trials", unit="trial", leave=False)

    try:
        if workers <= 1:
            for task in tasks:
                yield run_trial(task)
                if pbar:
                    pbar.update(1)
            return

        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(run_trial, task): i for i, task in enumerate(tasks)}
            buffered: Dict[int, TrialRecord] = {}
            next_index = 0
            try:
                for future in as_completed(futures):
                    buffered[futures[future]] = future.result()
                    if pbar:
                        pbar.update(1)
                    while next_index in buffered:
                        yield buffered.pop(next_index)
                        next_index += 1
            except BaseException:
                executor.shutdown(wait=False, cancel_futures=True)
                raise
    finally:
        if pbar:
            pbar.close()


@dataclass(frozen=True)
class PointAggregate:
    """Trace-error statistics of one (d, n) grid point."""
    scheme: str
    d: int
    n: int
    trials: int
    mean: float
    median: float
    q10: float
    q90: float


@dataclass(frozen=True)
class MonotoneViolation:
    """Adjacent grid points where the median trace error rose beyond noise."""
    d: int
    n_low: int
    n_high: int
    median_low: float
    median_high: float


@dataclass
class SweepResult:
    """
    All trial records of a sweep plus derived aggregates.

    Aggregates use CSV-rounded values so they can be recomputed exactly
    from the emitted file.
    """
    records: List[TrialRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def aggregates(self) -> List[PointAggregate]:
        return aggregate_points((r.scheme, r.d, r.n, r.trace_error) for r in self.records)

    @property
    def slopes(self) -> Dict[int, Optional[float]]:
        return fitted_slopes(self.aggregates)

    @property
    def monotone_violations(self) -> List[MonotoneViolation]:
        return monotone_median_violations(self.aggregates)


def aggregate_points(values) -> List[PointAggregate]:
    """
    Group (scheme, d, n, trace_error) tuples by (d, n) and summarize them.

    Errors are rounded to their CSV representation first.
    """
    groups: Dict[Tuple[str, int, int], List[float]] = {}
    for scheme, d, n, error in values:
        groups.setdefault((scheme, d, n), []).append(csv_value(error))

    aggregates = []
    for (scheme, d, n), errors in sorted(groups.items(), key=lambda item: (item[0][1], item[0][2])):
        e = np.array(errors)
        aggregates.append(PointAggregate(
            scheme=scheme,
            d=d,
            n=n,
            trials=len(e),
            mean=float(np.mean(e)),
            median=float(np.median(e)),
            q10=float(np.quantile(e, 0.1)),
            q90=float(np.quantile(e, 0.9)),
        ))
    return aggregates


def fitted_slopes(aggregates: List[PointAggregate]) -> Dict[int, Optional[float]]:
    """Least-squares slope of log(mean trace error) against log(n), per d."""
    slopes: Dict[int, Optional[float]] = {}
    for d in sorted({a.d for a in aggregates}):
        points = [a for a in aggregates if a.d == d and a.mean > 0]
        if len(points) < 2:
            slopes[d] = None
            continue
        log_n = np.log([a.n for a in points])
        log_err = np.log([a.mean for a in points])
        slopes[d] = float(np.polyfit(log_n, log_err, 1)[0])
    return slopes


def monotone_median_violations(aggregates: List[PointAggregate]) -> List[MonotoneViolation]:
    """
    Adjacent n points where the median trace error increases.

    Increases smaller than the sampling noise band (q90 - q10)/sqrt(trials)
    of the larger-n point are tolerated.
    """
    violations = []
    for d in sorted({a.d for a in aggregates}):
        points = sorted((a for a in aggregates if a.d == d), key=lambda a: a.n)
        for low, high in zip(points, points[1:]):
            band = (high.q90 - high.q10) / np.sqrt(high.trials)
            if high.median > low.median + band:
                violations.append(MonotoneViolation(d, low.n, high.n, low.median, high.median))
    return violations


def _check_projection_share(records: List[TrialRecord]) -> None:
    slow = [
        r for r in records
        if r.n >= PROJECTION_CHECK_MIN_N and r.runtime_ms > 0
        and r.projection_ms > PROJECTION_SHARE_WARNING * r.runtime_ms
    ]
    if slow:
        logger.warning(
            f"Projection took more than {PROJECTION_SHARE_WARNING:.0%} of trial time in "
            f"{len(slow)}/{len(records)} trials"
        )


def run_sweep(
    config: ExperimentConfig,
    show_progress: bool = False,
    on_record: Optional[Callable[[TrialRecord], None]] = None,
) -> SweepResult:
    """
    Execute every trial of a config and write the CSV incrementally.

    If ``config.output`` is set, rows are flushed in (d, n, trial) order as
    they become available; an interrupted run leaves a ``# INCOMPLETE``
    marker in the file and re-raises.

    Args:
        config: Experiment configuration
        show_progress: Show a tqdm progress bar when available
        on_record: Callback invoked with each record in output order
    """
    result = SweepResult()

    def consume(write: Optional[Callable[[TrialRecord], None]]) -> None:
        for record in iter_trials(config, show_progress):
            result.records.append(record)
            if write:
                write(record)
            if on_record:
                on_record(record)

    if config.output:
        with TrialCsvWriter(config.output, "sweep") as writer:
            consume(writer.write)
    else:
        consume(None)

    result.records.sort(key=sort_key)
    _check_projection_share(result.records)
    for violation in result.monotone_violations:
        logger.warning(
            f"Median trace error rose from {violation.median_low:.4g} (n={violation.n_low}) "
            f"to {violation.median_high:.4g} (n={violation.n_high}) at d={violation.d}"
        )
    logger.info(f"Sweep finished: {len(result)} trials")
    return result
