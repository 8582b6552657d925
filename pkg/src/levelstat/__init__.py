"""levelstat: seeded numerical experiments on eigenvalue statistics of
random Schrödinger operators H = T + V(ω) on finite graphs."""

__version__ = "0.1.0"

from .errors import (
    BoundViolation,
    ConfigError,
    LevelStatError,
    MultiplicityBoundViolation,
)
from .experiments import RunConfig, parse_config, run
from .operators import GraphSpec, Hamiltonian, PotentialDistribution
from .spectral import Interval, IntervalSet
from .statistics import EstimatorReport, ExperimentSpec

__all__ = [
    "__version__",
    "BoundViolation",
    "ConfigError",
    "LevelStatError",
    "MultiplicityBoundViolation",
    "RunConfig",
    "parse_config",
    "run",
    "GraphSpec",
    "Hamiltonian",
    "PotentialDistribution",
    "Interval",
    "IntervalSet",
    "EstimatorReport",
    "ExperimentSpec",
]
