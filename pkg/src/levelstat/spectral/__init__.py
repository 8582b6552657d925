"""Spectra of single realizations: projectors, occupations and determinants."""

from .decomposition import (
    SimplicityReport,
    SpectralData,
    degenerate_mask,
    default_gap_tolerance,
    eigendecompose,
    eigendecompose_batch,
    min_gaps,
    simplicity_report,
)
from .determinants import (
    has_alpha_distinct_profiles,
    occupation_determinant,
    occupation_determinants_batch,
    occupation_minor,
    profile_determinant_sum,
)
from .intervals import (
    Interval,
    IntervalSet,
    count_in_interval,
    counts_batch,
    projector_entries_batch,
    projector_entry,
)
from .perturbation import FeynmanHellmannResult, feynman_hellmann_check

__all__ = [
    "SimplicityReport",
    "SpectralData",
    "degenerate_mask",
    "default_gap_tolerance",
    "eigendecompose",
    "eigendecompose_batch",
    "min_gaps",
    "simplicity_report",
    "has_alpha_distinct_profiles",
    "occupation_determinant",
    "occupation_determinants_batch",
    "occupation_minor",
    "profile_determinant_sum",
    "Interval",
    "IntervalSet",
    "count_in_interval",
    "counts_batch",
    "projector_entries_batch",
    "projector_entry",
    "FeynmanHellmannResult",
    "feynman_hellmann_check",
]
