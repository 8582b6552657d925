"""Exception hierarchy shared by every levelstat module."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence


class LevelStatError(Exception):
    """Base class for all levelstat failures."""


class GraphError(LevelStatError, ValueError):
    """Malformed graph: self-loop, bad site index, or non-hermitian weights."""


class DistributionError(LevelStatError, ValueError):
    """Unsupported or invalid potential distribution."""


class DimensionError(LevelStatError, ValueError):
    """Operand shapes do not match."""


class SiteError(LevelStatError, ValueError):
    """Site index out of range or repeated where distinct sites are required."""


class DomainError(LevelStatError, ValueError):
    """Input lies outside the domain of a closed-form expression."""


class EigensolverError(LevelStatError, RuntimeError):
    """The dense eigensolver did not converge."""


class DegenerateSpectrumError(LevelStatError, RuntimeError):
    """An operation needs a simple eigenvalue but the gap is below threshold."""


class EnumerationLimitError(LevelStatError, RuntimeError):
    """An eigen-index search exceeded its assignment cap."""


class QuadratureError(LevelStatError, RuntimeError):
    """A quadrature estimate did not reach the requested accuracy."""


class DegenerateSystemError(LevelStatError, RuntimeError):
    """A target energy coincides with the spectrum of the frozen block."""


class BoundViolation(LevelStatError, AssertionError):
    """A run contradicted a proven statement."""


class MultiplicityBoundViolation(BoundViolation):
    """More than n! isolated solutions were found for an n-site system."""


class PointwiseBoundViolation(BoundViolation):
    """Samples broke a per-sample inequality between an indicator and a trace."""

    def __init__(self, inequality: str, n_breaking: int, n_samples: int):
        self.inequality = inequality
        self.n_breaking = n_breaking
        super().__init__(f"{n_breaking} of {n_samples} samples break {inequality}")


class DegreeFitError(LevelStatError, RuntimeError):
    """No polynomial degree reproduced the sampled values to tolerance."""


@dataclass(frozen=True)
class FieldError:
    """A single configuration problem located by its field path."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class ConfigError(LevelStatError, ValueError):
    """A run configuration failed validation; carries every field-level error."""

    def __init__(self, errors: Sequence[FieldError]):
        self.errors: List[FieldError] = list(errors)
        summary = "; ".join(str(error) for error in self.errors)
        super().__init__(f"Invalid run configuration: {summary}")
