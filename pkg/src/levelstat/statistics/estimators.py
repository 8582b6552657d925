"""Seeded Monte Carlo estimators, each reported against its bound.

Every estimator is a pure function of its :class:`ExperimentSpec`: per-sample
values come back from :class:`SampleRunner` in sample-index order and are
reduced with exactly rounded sums, so the worker count never changes a report.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..errors import (
    DegenerateSpectrumError,
    DomainError,
    PointwiseBoundViolation,
    SiteError,
)
from ..operators.graph import GraphSpec, build_hopping
from ..operators.potentials import PotentialDistribution, density_bound
from ..spectral.determinants import check_site_sets, occupation_determinants_batch
from ..spectral.intervals import IntervalSet, check_distinct_sites, counts_batch
from .bounds import (
    CONJECTURED,
    PROVEN,
    joint_interval_bound,
    minami_bound,
    n_level_bound,
    profile_event_bound,
    spectral_averaging_bound,
    wegner_bound,
)
from .confidence import ConfidenceSummary, indicator_summary, mean_summary
from .events import indicator_event_alpha, single_occupancy_batch
from .sampling import DEFAULT_CHUNK_SIZE, SampleRunner, SpectralBatch

logger = logging.getLogger(__name__)

CONJECTURE_SIGMAS = 3.0


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything an estimator run depends on, the seed included."""

    graph: GraphSpec
    dist: PotentialDistribution
    intervals: IntervalSet
    n_samples: int
    seed: int
    sets: Optional[Tuple[Tuple[int, ...], ...]] = None
    alpha: Optional[float] = None
    sites: Optional[Tuple[int, ...]] = None
    confidence_level: float = 0.99

    def __post_init__(self) -> None:
        if not isinstance(self.intervals, IntervalSet):
            object.__setattr__(self, "intervals", IntervalSet(tuple(self.intervals)))
        if self.n_samples < 1:
            raise DomainError(f"n_samples must be at least 1, got {self.n_samples}")
        if not 0.0 < self.confidence_level < 1.0:
            raise DomainError(
                f"confidence_level must lie in (0, 1), got {self.confidence_level}"
            )
        n = len(self.intervals)
        if self.alpha is not None and self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.sets is not None:
            if len(self.sets) != n:
                raise SiteError(f"{n} intervals need {n} site sets, got {len(self.sets)}")
            object.__setattr__(
                self, "sets", check_site_sets(self.sets, self.graph.n_sites)
            )
        if self.sites is not None:
            if len(self.sites) != n:
                raise SiteError(f"{n} intervals need {n} sites, got {len(self.sites)}")
            object.__setattr__(
                self, "sites", check_distinct_sites(self.sites, self.graph.n_sites)
            )

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites

    @property
    def rho_inf(self) -> float:
        return density_bound(self.dist)

    def runner(self, threads: Optional[int], chunk_size: int) -> SampleRunner:
        return SampleRunner(
            self.dist,
            self.n_sites,
            self.seed,
            self.n_samples,
            hopping=build_hopping(self.graph),
            threads=threads,
            chunk_size=chunk_size,
        )


@dataclass(frozen=True)
class EstimatorReport:
    """A Monte Carlo estimate with its confidence interval and bound verdict.

    ``bound_satisfied`` compares the point estimate with the bound;
    ``violated`` is the statistically meaningful verdict: the whole confidence
    interval above a proven bound, or the estimate more than three standard
    errors above a conjectured one.
    """

    quantity: str
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    n_samples: int
    n_degenerate_flagged: int
    bound: float
    seed: int
    bound_kind: str = PROVEN
    bound_satisfied: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bound_satisfied", bool(self.estimate <= self.bound))

    @property
    def violated(self) -> bool:
        if self.bound_kind == CONJECTURED:
            return self.estimate - CONJECTURE_SIGMAS * self.std_error > self.bound
        return self.ci_low > self.bound


def _report(
    quantity: str,
    summary: ConfidenceSummary,
    spec: ExperimentSpec,
    bound: float,
    n_degenerate: int = 0,
    kind: str = PROVEN,
) -> EstimatorReport:
    report = EstimatorReport(
        quantity=quantity,
        estimate=summary.estimate,
        std_error=summary.std_error,
        ci_low=summary.low,
        ci_high=summary.high,
        n_samples=spec.n_samples,
        n_degenerate_flagged=n_degenerate,
        bound=bound,
        seed=spec.seed,
        bound_kind=kind,
    )
    logger.info(
        f"{quantity}: estimate={report.estimate:.6g} "
        f"CI=[{report.ci_low:.6g}, {report.ci_high:.6g}] bound={bound:.6g} ({kind})"
    )
    return report


def _require_intervals(spec: ExperimentSpec, count: Optional[int] = None) -> int:
    n = len(spec.intervals)
    if n < 1:
        raise DomainError("At least one interval is required")
    if count is not None and n != count:
        raise DomainError(f"This estimator takes {count} interval(s), got {n}")
    return n


def sample_counts(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> np.ndarray:
    """Tr P_{I_j} per sample and interval, shape (n_samples, n)."""
    intervals = spec.intervals

    def counts(batch: SpectralBatch) -> np.ndarray:
        return np.stack(
            [counts_batch(batch.eigenvalues, interval) for interval in intervals], axis=1
        )

    return spec.runner(threads, chunk_size).map(counts, vectors=False)


def _check_pointwise(
    indicator: np.ndarray, majorant: np.ndarray, inequality: str
) -> None:
    breaking = int(np.count_nonzero(indicator > majorant))
    if breaking:
        raise PointwiseBoundViolation(inequality, breaking, indicator.size)


def estimate_wegner(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[EstimatorReport, EstimatorReport]:
    """P{σ ∩ I ≠ ∅} and E[Tr P_I], both against ρ_∞ |I| |Λ|.

    Args:
        spec: Graph, distribution, one interval, sample count and seed
        threads: Worker threads; the reports do not depend on it
        chunk_size: Samples per work unit

    Returns:
        The occupancy-probability report and the mean-trace report

    Raises:
        PointwiseBoundViolation: Some sample had 1{Tr P_I >= 1} > Tr P_I
    """
    _require_intervals(spec, 1)
    counts = sample_counts(spec, threads, chunk_size)[:, 0]
    bound = wegner_bound(spec.rho_inf, spec.intervals[0].length, spec.n_sites)
    level = spec.confidence_level
    hits = counts >= 1
    _check_pointwise(hits, counts, "1{Tr P_I >= 1} <= Tr P_I")
    occupancy = _report(
        "occupancy_probability", indicator_summary(hits, level), spec, bound
    )
    trace = _report("mean_trace", mean_summary(counts, level), spec, bound)
    return occupancy, trace


def estimate_minami(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[EstimatorReport, EstimatorReport]:
    """E[Tr P_I (Tr P_I − 1)] and P{Tr P_I >= 2} against (π²/2)(ρ|I||Λ|)².

    Raises PointwiseBoundViolation naming the number of samples with
    1{Tr P_I >= 2} > Tr P_I (Tr P_I - 1).
    """
    _require_intervals(spec, 1)
    counts = sample_counts(spec, threads, chunk_size)[:, 0]
    bound = minami_bound(spec.rho_inf, spec.intervals[0].length, spec.n_sites)
    level = spec.confidence_level
    pairs = counts * (counts - 1)
    multiples = counts >= 2
    _check_pointwise(multiples, pairs, "1{Tr P_I >= 2} <= Tr P_I (Tr P_I - 1)")
    moment = mean_summary(pairs, level)
    multiple = indicator_summary(multiples, level)
    return (
        _report("factorial_moment", moment, spec, bound),
        _report("multiple_occupancy_probability", multiple, spec, bound),
    )


def estimate_n_level(
    spec: ExperimentSpec,
    n: int,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> EstimatorReport:
    """P{Tr P_I >= n} against (πⁿ/n!)(ρ|I||Λ|)ⁿ; zero whenever n > |Λ|."""
    _require_intervals(spec, 1)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    counts = sample_counts(spec, threads, chunk_size)[:, 0]
    bound = n_level_bound(spec.rho_inf, spec.intervals[0].length, spec.n_sites, n)
    return _report(
        f"level_{n}_probability",
        indicator_summary(counts >= n, spec.confidence_level),
        spec,
        bound,
    )


def estimate_joint_intervals(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    constant: float = 1.0,
) -> EstimatorReport:
    """P{σ ∩ I_j ≠ ∅ for all j} against the conjectured C_n ρⁿ ∏|I_j| |Λ|."""
    _require_intervals(spec)
    counts = sample_counts(spec, threads, chunk_size)
    hits = np.all(counts >= 1, axis=1)
    bound = joint_interval_bound(
        spec.rho_inf, spec.intervals.lengths.tolist(), spec.n_sites, constant
    )
    report = _report(
        "joint_occupancy_probability",
        indicator_summary(hits, spec.confidence_level),
        spec,
        bound,
        kind=CONJECTURED,
    )
    if report.violated:
        logger.info("Joint-interval estimate exceeds the conjectured bound")
    return report


def _eigenvector_statistic(
    spec: ExperimentSpec,
    per_batch,
    threads: Optional[int],
    chunk_size: int,
) -> Tuple[np.ndarray, int]:
    """Run ``per_batch`` and drop degenerate samples; returns (values, n_degenerate)."""

    def statistic(batch: SpectralBatch) -> np.ndarray:
        degenerate = batch.degenerate
        values = np.asarray(per_batch(batch, degenerate), dtype=float)
        return np.stack([values, degenerate.astype(float)], axis=1)

    table = spec.runner(threads, chunk_size).map(statistic, vectors=True)
    degenerate = table[:, 1] != 0.0
    n_degenerate = int(np.count_nonzero(degenerate))
    if n_degenerate:
        logger.warning(f"{n_degenerate} degenerate samples excluded")
    if n_degenerate == spec.n_samples:
        raise DegenerateSpectrumError("Every sample was flagged degenerate")
    return table[~degenerate, 0], n_degenerate


def _require_sites(spec: ExperimentSpec) -> Tuple[int, ...]:
    if spec.sites is None:
        raise SiteError("This estimator needs one site per interval")
    return spec.sites


def estimate_spectral_averaging(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> EstimatorReport:
    """E|det(⟨δ_{x_k}, P_{I_j} δ_{x_k}⟩)| against n! ρⁿ ∏|I_j|."""
    _require_intervals(spec)
    sites = _require_sites(spec)
    intervals = spec.intervals

    def determinants(batch: SpectralBatch, degenerate: np.ndarray) -> np.ndarray:
        return occupation_determinants_batch(
            batch.eigenvalues, batch.eigenvectors, intervals, sites
        )

    values, n_degenerate = _eigenvector_statistic(spec, determinants, threads, chunk_size)
    bound = spectral_averaging_bound(spec.rho_inf, intervals.lengths.tolist())
    return _report(
        "occupation_determinant_mean",
        mean_summary(values, spec.confidence_level),
        spec,
        bound,
        n_degenerate,
    )


def estimate_single_occupancy_determinant(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> EstimatorReport:
    """E[|D(E;Σ)| 1_J], D the |ψ_j(x_k)|² determinant of the lone eigenvalues."""
    _require_intervals(spec)
    sites = _require_sites(spec)
    intervals = spec.intervals

    def restricted(batch: SpectralBatch, degenerate: np.ndarray) -> np.ndarray:
        single = single_occupancy_batch(batch.eigenvalues, intervals)
        values = np.zeros(len(batch))
        if np.any(single):
            # under J each projector is rank one, so the determinant is D(E;Σ)
            values[single] = occupation_determinants_batch(
                batch.eigenvalues[single], batch.eigenvectors[single], intervals, sites
            )
        return values

    values, n_degenerate = _eigenvector_statistic(spec, restricted, threads, chunk_size)
    bound = spectral_averaging_bound(spec.rho_inf, intervals.lengths.tolist())
    return _report(
        "single_occupancy_determinant_mean",
        mean_summary(values, spec.confidence_level),
        spec,
        bound,
        n_degenerate,
    )


def estimate_profile_event(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> EstimatorReport:
    """P(E_α(I_1..I_n; B_1..B_n)) against (n!/αⁿ) ρⁿ ∏ |I_j| |B_j|."""
    _require_intervals(spec)
    if spec.sets is None or spec.alpha is None:
        raise DomainError("The profile event needs both site sets and alpha")
    intervals, sets, alpha = spec.intervals, spec.sets, spec.alpha

    def indicators(batch: SpectralBatch, degenerate: np.ndarray) -> np.ndarray:
        occupied = np.ones(len(batch), dtype=bool)
        for interval in intervals:
            occupied &= counts_batch(batch.eigenvalues, interval) >= 1
        flags = np.zeros(len(batch))
        for row in np.flatnonzero(occupied & ~degenerate):
            flags[row] = indicator_event_alpha(
                batch.spectral_data(row), intervals, sets, alpha
            )
        return flags

    values, n_degenerate = _eigenvector_statistic(spec, indicators, threads, chunk_size)
    bound = profile_event_bound(
        spec.rho_inf, intervals.lengths.tolist(), [len(b) for b in sets], alpha
    )
    return _report(
        "profile_event_probability",
        indicator_summary(values != 0.0, spec.confidence_level),
        spec,
        bound,
        n_degenerate,
    )

