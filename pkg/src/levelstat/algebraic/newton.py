"""Multi-start Newton search for real roots of P_{E_j}(V_Σ) = 0.

Starts are scrambled Halton points in a box; every start is iterated in a
vectorized batch with masks for rows that fail (singular Jacobian, NaN,
escape from the box). Converged rows pass a residual gate and an isolation
gate, then are merged at a relative tolerance.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import qmc

from ..errors import DomainError, MultiplicityBoundViolation
from ..operators.graph import build_hopping
from .multiplicity import (
    MultiplicityProblem,
    SolutionSet,
    char_poly_batch,
    char_poly_jacobian,
    residual_scale,
    sort_solutions,
)

logger = logging.getLogger(__name__)

STARTS_PER_PERMUTATION = 500
START_CHUNK = 512
ESCAPE_FACTOR = 10.0
SUPPORT_INFLATION = 0.5


@dataclass(frozen=True)
class NewtonSearch:
    """Search settings; ``n_starts=None`` means 500·n! and ``box=None`` a default."""

    n_starts: Optional[int] = None
    box: Optional[Tuple[float, float]] = None
    newton_tol: float = 1e-12
    dedup_tol: float = 1e-8
    residual_tol: float = 1e-9
    isolation_tol: float = 1e-10
    max_iterations: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_starts is not None and self.n_starts < 1:
            raise ValueError(f"n_starts must be positive, got {self.n_starts}")
        if self.box is not None and not self.box[0] < self.box[1]:
            raise ValueError(f"Empty search box {self.box}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be greater than 0")
        for name in ("newton_tol", "dedup_tol", "residual_tol", "isolation_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def starts_for(self, n: int) -> int:
        if self.n_starts is not None:
            return self.n_starts
        return STARTS_PER_PERMUTATION * math.factorial(n)


def default_box(
    problem: MultiplicityProblem, support: Optional[Tuple[float, float]] = None
) -> Tuple[float, float]:
    """Box around the targets wide enough for the hopping, on-site and frozen terms.

    With a potential support given, the box also covers that support inflated
    by 50% on each side.
    """
    hopping = float(np.linalg.norm(build_hopping(problem.graph), 2))
    reach = (
        2.0 * hopping
        + max(abs(v) for v in problem.onsite)
        + float(np.max(np.abs(problem.frozen_potential), initial=0.0))
        + 1.0
    )
    low, high = min(problem.targets) - reach, max(problem.targets) + reach
    if support is not None:
        width = support[1] - support[0]
        low = min(low, support[0] - SUPPORT_INFLATION * width)
        high = max(high, support[1] + SUPPORT_INFLATION * width)
    return low, high


def halton_starts(
    n: int, count: int, box: Tuple[float, float], seed: int
) -> np.ndarray:
    sampler = qmc.Halton(d=n, scramble=True, seed=seed)
    unit = sampler.random(count)
    return qmc.scale(unit, [box[0]] * n, [box[1]] * n)


def _newton_chunk(
    problem: MultiplicityProblem,
    starts: np.ndarray,
    search: NewtonSearch,
    box: Tuple[float, float],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Iterate every start; returns (final points, converged mask, still-running mask).

    Rows still running after max_iterations are left to the residual gate.
    """
    x = starts.copy()
    active = np.ones(x.shape[0], dtype=bool)
    converged = np.zeros(x.shape[0], dtype=bool)
    span = box[1] - box[0]
    fence = (box[0] - ESCAPE_FACTOR * span, box[1] + ESCAPE_FACTOR * span)

    for _ in range(search.max_iterations):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        values = char_poly_batch(problem, x[rows])
        jacobian = char_poly_jacobian(problem, x[rows])
        dets = np.linalg.det(jacobian)
        nonsingular = np.isfinite(dets) & (dets != 0.0)
        active[rows[~nonsingular]] = False
        rows = rows[nonsingular]
        values, jacobian = values[nonsingular], jacobian[nonsingular]
        if rows.size == 0:
            break
        step = np.linalg.solve(jacobian, values[..., None])[..., 0]
        x[rows] -= step

        finite = np.all(np.isfinite(x[rows]), axis=1)
        inside = np.all((x[rows] > fence[0]) & (x[rows] < fence[1]), axis=1)
        active[rows[~(finite & inside)]] = False

        size = np.max(np.abs(step), axis=1)
        scale = 1.0 + np.max(np.abs(x[rows]), axis=1)
        done = finite & inside & (size <= search.newton_tol * scale)
        converged[rows[done]] = True
        active[rows[done]] = False

    return x, converged, active


def isolation_ratio(jacobian: np.ndarray) -> np.ndarray:
    """|det J| / ∏ ||row of J||, in [0, 1]; zero rows give 0."""
    norms = np.prod(np.linalg.norm(jacobian, axis=-1), axis=-1)
    dets = np.abs(np.linalg.det(jacobian))
    return np.divide(dets, norms, out=np.zeros_like(dets), where=norms > 0)


def merge_solutions(points: np.ndarray, tolerance: float) -> Tuple[np.ndarray, int]:
    """Greedy merge over lexicographically sorted rows; returns (kept, merges)."""
    points = points[sort_solutions(points)]
    kept: List[np.ndarray] = []
    merges = 0
    for row in points:
        limit = tolerance * (1.0 + np.max(np.abs(row)))
        if any(np.max(np.abs(row - other)) <= limit for other in kept):
            merges += 1
            continue
        kept.append(row)
    if not kept:
        return np.zeros((0, points.shape[1])), merges
    return np.array(kept), merges


def solve_multilinear_system(
    problem: MultiplicityProblem,
    search: Optional[NewtonSearch] = None,
    support: Optional[Tuple[float, float]] = None,
    threads: Optional[int] = None,
) -> SolutionSet:
    """Distinct isolated real roots found from quasi-random starts.

    Args:
        problem: Free sites, targets and the frozen potential
        search: Start count, box and tolerances; defaults to 500·n! starts
        support: Potential support used to size the default search box
        threads: Workers for the start chunks; roots do not depend on it

    Returns:
        The merged roots in lexicographic order with Jacobian determinants,
        residuals and merge counts

    Raises:
        DegenerateSystemError: A target sits on the frozen-block spectrum
        MultiplicityBoundViolation: More than n! distinct isolated roots
            survived the merge
    """
    search = search or NewtonSearch()
    problem.check_targets()
    n = problem.n
    box = search.box or default_box(problem, support)
    if not box[0] < box[1]:
        raise DomainError(f"Empty search box {box}")
    count = search.starts_for(n)
    starts = halton_starts(n, count, box, search.seed)
    chunks = [starts[i : i + START_CHUNK] for i in range(0, count, START_CHUNK)]
    logger.info(
        f"Newton search: n={n}, {count} starts in [{box[0]:.4g}, {box[1]:.4g}]^{n}, "
        f"{len(chunks)} chunks"
    )

    def run(chunk: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _newton_chunk(problem, chunk, search, box)

    workers = threads or os.cpu_count() or 1
    if workers == 1 or len(chunks) == 1:
        results = [run(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))

    points = np.concatenate([r[0] for r in results])
    converged = np.concatenate([r[1] for r in results])
    running = np.concatenate([r[2] for r in results])
    failed = int(count - np.count_nonzero(converged))
    if failed:
        logger.warning(f"{failed} of {count} Newton starts did not converge")
    candidates = points[converged | running]

    if candidates.shape[0]:
        residuals = np.max(
            np.abs(char_poly_batch(problem, candidates))
            / np.maximum(residual_scale(problem, candidates), 1.0),
            axis=1,
        )
        candidates = candidates[residuals <= search.residual_tol]
    accepted = int(candidates.shape[0])
    rejected = 0
    if accepted:
        ratio = isolation_ratio(char_poly_jacobian(problem, candidates))
        isolated = ratio > search.isolation_tol
        rejected = int(np.count_nonzero(~isolated))
        candidates = candidates[isolated]

    solutions, merges = merge_solutions(candidates, search.dedup_tol)
    if solutions.shape[0]:
        jacobian_dets = np.linalg.det(char_poly_jacobian(problem, solutions))
        residuals = np.max(np.abs(char_poly_batch(problem, solutions)), axis=1)
    else:
        jacobian_dets = np.zeros(0)
        residuals = np.zeros(0)

    result = SolutionSet(
        solutions,
        jacobian_dets,
        residuals,
        starts_used=count,
        converged=accepted,
        merges=merges,
        rejected_singular=rejected,
    )
    bound = math.factorial(n)
    logger.info(
        f"Found {result.count} distinct roots (bound {bound}), {merges} merges, "
        f"{rejected} non-isolated"
    )
    if result.count > bound:
        raise MultiplicityBoundViolation(
            f"{result.count} isolated solutions exceed n! = {bound} for n = {n}"
        )
    return result
