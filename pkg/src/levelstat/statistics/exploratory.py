"""Exploratory probe of level repulsion in n×n systems.

Estimates P{min_j (E_{j+1} - E_j) < ε} over a range of ε and fits the
log-log slope. Without hopping the slope is 1; level repulsion shows up as a
steeper slope. No bound is asserted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import DomainError
from ..operators.graph import GraphSpec, build_hopping
from ..operators.potentials import PotentialDistribution
from ..spectral.decomposition import min_gaps
from .confidence import indicator_summary
from .sampling import DEFAULT_CHUNK_SIZE, SampleRunner, SpectralBatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GapRoundingRow:
    epsilon: float
    probability: float
    std_error: float


@dataclass(frozen=True)
class GapRoundingTable:
    rows: Tuple[GapRoundingRow, ...]
    exponent: float
    n_samples: int
    seed: int


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x over the positive points."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    if np.count_nonzero(keep) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def gap_rounding_probe(
    graph: GraphSpec,
    dist: PotentialDistribution,
    epsilons: Sequence[float],
    n_samples: int,
    seed: int,
    threads: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> GapRoundingTable:
    if graph.n_sites < 2:
        raise DomainError("The spacing probe needs at least two sites")
    epsilons = sorted((float(e) for e in epsilons), reverse=True)
    if not epsilons or epsilons[-1] <= 0:
        raise DomainError("epsilons must be positive")

    runner = SampleRunner(
        dist,
        graph.n_sites,
        seed,
        n_samples,
        hopping=build_hopping(graph),
        threads=threads,
        chunk_size=chunk_size,
    )

    def spacing(batch: SpectralBatch) -> np.ndarray:
        return min_gaps(batch.eigenvalues)

    gaps = runner.map(spacing, vectors=False)
    rows = []
    for epsilon in epsilons:
        summary = indicator_summary(gaps < epsilon)
        rows.append(GapRoundingRow(epsilon, summary.estimate, summary.std_error))
    exponent = fit_loglog_slope(
        [r.epsilon for r in rows], [r.probability for r in rows]
    )
    logger.info(f"Min-spacing exponent on {graph.n_sites} sites: {exponent:.4g}")
    return GapRoundingTable(tuple(rows), exponent, n_samples, seed)
