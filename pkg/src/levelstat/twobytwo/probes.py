"""Gap-edge probes for the two-site model and the Monte Carlo cross-check."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..operators.potentials import PotentialDistribution, sample_potentials
from ..statistics.exploratory import fit_loglog_slope
from ..statistics.sampling import DEFAULT_CHUNK_SIZE, SampleRunner, SpectralBatch
from .model import TwoByTwoModel, eigenvalues_2x2
from .quadrature import corner_cdf, edge_window_mass, rectangle_mass

logger = logging.getLogger(__name__)

GAP_SLACK = 1e-12
MIN_MC_SAMPLES = 10_000


@dataclass(frozen=True)
class ScalingTable:
    """Mass of the window 2|c| < E_1 - E_2 < 2|c| + ε for each ε."""

    epsilons: Tuple[float, ...]
    masses: Tuple[float, ...]
    exponent: float


def singular_scaling_probe(
    model: TwoByTwoModel, dist: PotentialDistribution, epsilons: Sequence[float]
) -> ScalingTable:
    epsilons = tuple(sorted((float(e) for e in epsilons), reverse=True))
    if not epsilons or epsilons[-1] <= 0:
        raise ValueError("epsilons must be positive")
    masses = tuple(edge_window_mass(model, dist, e) for e in epsilons)
    exponent = fit_loglog_slope(epsilons, masses)
    logger.info(f"Gap-edge mass exponent {exponent:.4f} over {len(epsilons)} windows")
    return ScalingTable(epsilons, masses, exponent)


@dataclass(frozen=True)
class BoundRow:
    width: float
    probability: float
    ratio_area: float
    ratio_modified: float


def straddling_intervals(
    model: TwoByTwoModel, start: float, width: float, separation: Optional[float] = None
) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """I_1 = [start, start + w) and I_1 shifted down by separation + w.

    With the default separation 2|c| the pair straddles the gap edge.
    """
    separation = model.gap if separation is None else separation
    upper = start - separation
    return (start, start + width), (upper - width, upper)


def default_start(model: TwoByTwoModel, dist: PotentialDistribution) -> float:
    """E_1 at the gap edge when both potentials sit at the mean."""
    return dist.mean + 0.5 * (model.a + model.b) + model.coupling


def modified_bound_check(
    model: TwoByTwoModel,
    dist: PotentialDistribution,
    widths: Sequence[float],
    start: Optional[float] = None,
    separation: Optional[float] = None,
) -> Tuple[BoundRow, ...]:
    """P{E_1 ∈ I_1, E_2 ∈ I_2} against |I|² and max(|I|, √|I|)²."""
    start = default_start(model, dist) if start is None else start
    rows = []
    for width in sorted((float(w) for w in widths), reverse=True):
        if width <= 0:
            raise ValueError(f"Widths must be positive, got {width}")
        first, second = straddling_intervals(model, start, width, separation)
        probability = rectangle_mass(model, dist, first, second)
        scale = max(width, math.sqrt(width))
        rows.append(
            BoundRow(width, probability, probability / width**2, probability / scale**2)
        )
        logger.debug(f"w={width:g}: P={probability:.6g}")
    return tuple(rows)


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Analytic bin masses and Monte Carlo counts on a grid over (E_1, E_2).

    ``analytic_mass[i, j]`` and ``mc_counts[i, j]`` belong to the bin
    [e1_edges[i], e1_edges[i+1]) × [e2_edges[j], e2_edges[j+1]).
    """

    e1_edges: np.ndarray
    e2_edges: np.ndarray
    analytic_mass: np.ndarray
    mc_counts: np.ndarray
    n_samples: int
    seed: int
    gap_violations: int = 0
    trace_error: float = 0.0

    @property
    def total_mass(self) -> float:
        return math.fsum(self.analytic_mass.ravel())

    @property
    def l1_distance(self) -> float:
        frequencies = self.mc_counts / self.n_samples
        return math.fsum(np.abs(frequencies - self.analytic_mass).ravel())

    @property
    def l1_noise_floor(self) -> float:
        """Expected L1 distance of an exact sampler: Σ E|X_i/N - p_i|, X_i ~ Bin(N, p_i)."""
        n = self.n_samples
        p = np.clip(self.analytic_mass.ravel(), 0.0, 1.0)
        k = np.floor(n * p)
        deviation = 2.0 * (k + 1) * (1.0 - p) * stats.binom.pmf(k + 1, n, p)
        return math.fsum(deviation) / n

    def rows(self) -> Iterator[Tuple[float, float, float, float, float, int]]:
        for i in range(self.e1_edges.size - 1):
            for j in range(self.e2_edges.size - 1):
                yield (
                    float(self.e1_edges[i]),
                    float(self.e1_edges[i + 1]),
                    float(self.e2_edges[j]),
                    float(self.e2_edges[j + 1]),
                    float(self.analytic_mass[i, j]),
                    int(self.mc_counts[i, j]),
                )


def grid_edges(model: TwoByTwoModel, dist: PotentialDistribution, bins: int) -> np.ndarray:
    low, high = model.eigenvalue_range(dist)
    return np.linspace(low, high, bins + 1)


def analytic_grid(
    model: TwoByTwoModel, dist: PotentialDistribution, edges: np.ndarray
) -> np.ndarray:
    """Bin masses from the corner CDF on the edge lattice."""
    x, y = np.meshgrid(edges, edges, indexing="ij")
    cdf = corner_cdf(model, dist, x, y)
    mass = cdf[1:, 1:] - cdf[:-1, 1:] - cdf[1:, :-1] + cdf[:-1, :-1]
    return np.maximum(mass, 0.0)


def sample_pairs(
    model: TwoByTwoModel, dist: PotentialDistribution, seed: int, start: int, count: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Ordered eigenvalue pairs for samples ``start .. start+count-1``."""
    omega = sample_potentials(dist, seed, start, count, 2)
    return eigenvalues_2x2(model, omega[:, 0], omega[:, 1])


def mc_vs_analytic(
    model: TwoByTwoModel,
    dist: PotentialDistribution,
    bins: int,
    n_samples: int,
    seed: int,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE * 16,
) -> DensityGrid:
    """Histogram sampled eigenvalue pairs against the analytic bin masses.

    Args:
        model: The two-site operator; needs c != 0
        dist: Law of both potentials
        bins: Bins per axis over the reachable eigenvalue range
        n_samples: Monte Carlo samples, at least ten thousand
        seed: Sampling seed
        threads: Worker threads; counts do not depend on it
        chunk_size: Samples per work unit

    Returns:
        Grid with both masses, the L1 distance and its noise floor, and the
        count of samples closer than 2|c|
    """
    model.require_coupling()
    if n_samples < MIN_MC_SAMPLES:
        raise ValueError(f"Need at least {MIN_MC_SAMPLES} samples, got {n_samples}")
    if bins < 1:
        raise ValueError(f"bins must be positive, got {bins}")
    edges = grid_edges(model, dist, bins)
    runner = SampleRunner(dist, 2, seed, n_samples, threads=threads, chunk_size=chunk_size)

    def histogram(batch: SpectralBatch) -> np.ndarray:
        omega = batch.potentials
        e1, e2 = eigenvalues_2x2(model, omega[:, 0], omega[:, 1])
        counts, _, _ = np.histogram2d(e1, e2, bins=[edges, edges])
        violations = np.count_nonzero(e1 - e2 < model.gap - GAP_SLACK)
        trace = np.max(np.abs(e1 + e2 - (omega[:, 0] + omega[:, 1] + model.a + model.b)))
        return np.concatenate([counts.ravel(), [violations, trace]])[None, :]

    table = runner.map(histogram)
    counts = table[:, :-2].sum(axis=0).reshape(bins, bins).astype(np.int64)
    violations = int(table[:, -2].sum())
    if violations:
        logger.warning(f"{violations} samples closer than 2|c| = {model.gap}")
    mass = analytic_grid(model, dist, edges)
    grid = DensityGrid(
        edges, edges, mass, counts, n_samples, seed, violations, float(table[:, -1].max())
    )
    logger.info(
        f"Density grid {bins}x{bins}: L1={grid.l1_distance:.4g} "
        f"noise floor={grid.l1_noise_floor:.4g} total mass={grid.total_mass:.12g}"
    )
    return grid
