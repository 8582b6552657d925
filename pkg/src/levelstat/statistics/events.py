"""Per-realization indicators of the spectral events being estimated."""

from __future__ import annotations

from itertools import product
from typing import Sequence

import numpy as np

from ..errors import DomainError, EnumerationLimitError, SiteError
from ..spectral.decomposition import SpectralData
from ..spectral.determinants import check_site_sets, profile_sum_from_weights
from ..spectral.intervals import IntervalSet

DEFAULT_ASSIGNMENT_CAP = 10_000


def indicator_event_alpha(
    spec_data: SpectralData,
    intervals: IntervalSet,
    sets: Sequence[Sequence[int]],
    alpha: float,
    cap: int = DEFAULT_ASSIGNMENT_CAP,
) -> bool:
    """True iff some distinct eigen-indices j_1..j_n with E_{j_m} ∈ I_m have
    α-distinct profiles on B_1..B_n.

    Assignments are tried in lexicographic order until one qualifies; more
    than ``cap`` candidate assignments abort the sample.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if len(sets) != len(intervals):
        raise SiteError(f"{len(intervals)} intervals need as many site sets, got {len(sets)}")
    blocks = check_site_sets(sets, spec_data.n_sites)
    candidates = [
        np.flatnonzero(interval.mask(spec_data.eigenvalues)).tolist()
        for interval in intervals
    ]
    if any(not c for c in candidates):
        return False

    threshold = alpha ** len(intervals)
    weights = spec_data.weights
    tried = 0
    for assignment in product(*candidates):
        if len(set(assignment)) < len(assignment):
            continue
        tried += 1
        if tried > cap:
            raise EnumerationLimitError(
                f"More than {cap} eigen-index assignments for occupancies "
                f"{[len(c) for c in candidates]}"
            )
        if profile_sum_from_weights(weights, assignment, blocks) >= threshold:
            return True
    return False


def indicator_single_occupancy(spec_data: SpectralData, intervals: IntervalSet) -> bool:
    """Event J: every interval holds exactly one eigenvalue."""
    return all(
        np.count_nonzero(interval.mask(spec_data.eigenvalues)) == 1
        for interval in intervals
    )


def single_occupancy_batch(eigenvalues: np.ndarray, intervals: IntervalSet) -> np.ndarray:
    """Event J for every row of an (m, N) eigenvalue array."""
    flags = np.ones(eigenvalues.shape[0], dtype=bool)
    for interval in intervals:
        flags &= np.count_nonzero(interval.mask(eigenvalues), axis=-1) == 1
    return flags
