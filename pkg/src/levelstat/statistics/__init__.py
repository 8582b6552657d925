"""Monte Carlo estimators for eigenvalue statistics and their bounds."""

from .bounds import (
    CONJECTURED,
    PROVEN,
    joint_interval_bound,
    minami_bound,
    multiplicity_bound,
    n_level_bound,
    profile_event_bound,
    spectral_averaging_bound,
    wegner_bound,
)
from .confidence import (
    ConfidenceSummary,
    confidence_interval,
    indicator_summary,
    mean_summary,
    normal_interval,
    wilson_interval,
)
from .estimators import (
    EstimatorReport,
    ExperimentSpec,
    estimate_joint_intervals,
    estimate_minami,
    estimate_n_level,
    estimate_profile_event,
    estimate_single_occupancy_determinant,
    estimate_spectral_averaging,
    estimate_wegner,
    sample_counts,
)
from .events import (
    indicator_event_alpha,
    indicator_single_occupancy,
    single_occupancy_batch,
)
from .exploratory import GapRoundingTable, fit_loglog_slope, gap_rounding_probe
from .sampling import SampleRunner, SpectralBatch

__all__ = [
    "CONJECTURED",
    "PROVEN",
    "joint_interval_bound",
    "minami_bound",
    "multiplicity_bound",
    "n_level_bound",
    "profile_event_bound",
    "spectral_averaging_bound",
    "wegner_bound",
    "ConfidenceSummary",
    "confidence_interval",
    "indicator_summary",
    "mean_summary",
    "normal_interval",
    "wilson_interval",
    "EstimatorReport",
    "ExperimentSpec",
    "estimate_joint_intervals",
    "estimate_minami",
    "estimate_n_level",
    "estimate_profile_event",
    "estimate_single_occupancy_determinant",
    "estimate_spectral_averaging",
    "estimate_wegner",
    "sample_counts",
    "indicator_event_alpha",
    "indicator_single_occupancy",
    "single_occupancy_batch",
    "GapRoundingTable",
    "fit_loglog_slope",
    "gap_rounding_probe",
    "SampleRunner",
    "SpectralBatch",
]
