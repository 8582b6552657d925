"""Occupation and profile determinants built from |ψ_j(x)|².

All determinants are of small n×n matrices (n <= 6) and go through LAPACK's
pivoted LU via ``numpy.linalg.det``. Configurations with two equal rows or
columns are returned as an exact zero instead of a rounded one.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product
from typing import Sequence, Tuple

import numpy as np

from ..errors import SiteError
from .decomposition import SpectralData
from .intervals import (
    IntervalSet,
    check_distinct_sites,
    check_site,
    projector_entries_batch,
)


def _check_eigenindices(spec: SpectralData, eigenindices: Sequence[int]) -> tuple:
    indices = tuple(int(j) for j in eigenindices)
    for j in indices:
        if not 0 <= j < spec.n_sites:
            raise SiteError(f"Eigen-index {j} out of range 0..{spec.n_sites - 1}")
    if len(set(indices)) != len(indices):
        raise SiteError(f"Eigen-indices must be distinct, got {indices}")
    return indices


def check_site_sets(sets: Sequence[Sequence[int]], n_sites: int) -> tuple:
    """Normalize B_1..B_n to sorted tuples of valid sites."""
    checked = []
    for block in sets:
        block = tuple(sorted({check_site(x, n_sites) for x in block}))
        if not block:
            raise SiteError("Site sets must be nonempty")
        checked.append(block)
    return tuple(checked)


def _check_sets(spec: SpectralData, sets: Sequence[Sequence[int]], n: int) -> tuple:
    if len(sets) != n:
        raise SiteError(f"Need {n} site sets, got {len(sets)}")
    return check_site_sets(sets, spec.n_sites)


def occupation_determinant(
    spec: SpectralData, intervals: IntervalSet, sites: Sequence[int]
) -> float:
    """|det(⟨δ_{x_k}, P_{I_j} δ_{x_k}⟩)_{j,k}|."""
    n = len(intervals)
    if n < 1:
        raise SiteError("At least one interval is required")
    if n > spec.n_sites:
        raise SiteError(f"n={n} exceeds |Λ|={spec.n_sites}")
    if len(sites) != n:
        raise SiteError(f"Need {n} sites for {n} intervals, got {len(sites)}")
    sites = check_distinct_sites(sites, spec.n_sites)
    if intervals.has_repeats():
        return 0.0
    matrix = projector_entries_batch(
        spec.eigenvalues[None, :], spec.eigenvectors[None, :, :], intervals, sites
    )[0]
    return abs(float(np.linalg.det(matrix)))


def occupation_determinants_batch(
    eigenvalues: np.ndarray,
    eigenvectors: np.ndarray,
    intervals: IntervalSet,
    sites: Sequence[int],
) -> np.ndarray:
    if intervals.has_repeats():
        return np.zeros(eigenvalues.shape[0])
    matrices = projector_entries_batch(eigenvalues, eigenvectors, intervals, sites)
    return np.abs(np.linalg.det(matrices))


def profile_determinant_sum(
    spec: SpectralData,
    eigenindices: Sequence[int],
    sets: Sequence[Sequence[int]],
) -> float:
    """Σ_{x_1∈B_1}…Σ_{x_n∈B_n} |det(|ψ_{j_m}(x_k)|²)|.

    Site tuples with a repeated site have two equal columns and add nothing.
    """
    indices = _check_eigenindices(spec, eigenindices)
    blocks = _check_sets(spec, sets, len(indices))
    return profile_sum_from_weights(spec.weights, indices, blocks)


@lru_cache(maxsize=256)
def distinct_site_tuples(blocks: Tuple[Tuple[int, ...], ...]) -> np.ndarray:
    """All (x_1, ..., x_n) in B_1 × ... × B_n with pairwise distinct entries."""
    tuples = np.array(
        [t for t in product(*blocks) if len(set(t)) == len(t)], dtype=int
    ).reshape(-1, len(blocks))
    tuples.setflags(write=False)
    return tuples


def profile_sum_from_weights(
    weights: np.ndarray,
    indices: Tuple[int, ...],
    blocks: Tuple[Tuple[int, ...], ...],
) -> float:
    """Unchecked core of ``profile_determinant_sum`` over a weight table [x, j]."""
    tuples = distinct_site_tuples(blocks)
    if tuples.shape[0] == 0:
        return 0.0
    # matrices[t, k, m] = |ψ_{j_m}(x_k)|²; the determinant is transpose invariant
    matrices = weights[:, list(indices)][tuples]
    return math.fsum(np.abs(np.linalg.det(matrices)))


def has_alpha_distinct_profiles(
    spec: SpectralData,
    eigenindices: Sequence[int],
    sets: Sequence[Sequence[int]],
    alpha: float,
) -> bool:
    return profile_determinant_sum(spec, eigenindices, sets) >= alpha ** len(eigenindices)


def occupation_minor(
    spec: SpectralData,
    eigenindices: Sequence[int],
    sets: Sequence[Sequence[int]],
) -> float:
    """|det(⟨ψ_j, 1_{B_k} ψ_j⟩)_{j,k}|, a lower bound for the profile sum."""
    indices = _check_eigenindices(spec, eigenindices)
    blocks = _check_sets(spec, sets, len(indices))
    if len(set(blocks)) < len(blocks):
        return 0.0
    weights = spec.weights
    matrix = np.array(
        [[weights[list(block), j].sum() for block in blocks] for j in indices]
    )
    return abs(float(np.linalg.det(matrix)))
